//! Incremental sequence growth shared by the greedy solvers and the exact
//! search.
//!
//! A [`SequenceState`] grows a sequence one vertex at a time, either appending
//! (forward) or prepending (backward), while tracking which edges the current
//! sequence induces and the utility value of that edge set. In backward mode
//! the vertices are stored reversed so both modes only ever push.
//!
//! Detection of newly induced edges is local: appending a vertex can only
//! complete edges that end at it, and prepending a vertex can only complete
//! edges that start at it (any other edge would already have been induced).

use crate::error::Result;
use crate::hypergraph::{DirectedHypergraph, EdgeId, Sequence, VertexId};
use crate::utility::{EvalState, UtilityFunction};

const ABSENT: usize = usize::MAX;

pub(crate) struct SequenceState<'a> {
    hg: &'a DirectedHypergraph,
    utility: &'a UtilityFunction,
    forward: bool,
    /// Build order; the true sequence when forward, reversed when backward.
    seq: Vec<VertexId>,
    /// Build-order position per vertex, [`ABSENT`] when not selected.
    pos: Vec<usize>,
    state: EvalState,
    /// Journal marks per push, for exact backtracking.
    frames: Vec<usize>,
}

impl<'a> SequenceState<'a> {
    pub(crate) fn new(
        hg: &'a DirectedHypergraph,
        utility: &'a UtilityFunction,
        forward: bool,
    ) -> Self {
        Self {
            hg,
            utility,
            forward,
            seq: Vec::new(),
            pos: vec![ABSENT; hg.vertex_count()],
            state: utility.new_state(),
            frames: Vec::new(),
        }
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.seq.len()
    }

    #[inline]
    pub(crate) fn contains(&self, v: VertexId) -> bool {
        self.pos[v.index()] != ABSENT
    }

    /// Utility value of the currently induced edge set.
    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.state.value()
    }

    #[inline]
    pub(crate) fn eval_state(&self) -> &EvalState {
        &self.state
    }

    /// The sequence in its true order.
    pub(crate) fn sigma(&self) -> Sequence {
        let mut vs = self.seq.clone();
        if !self.forward {
            vs.reverse();
        }
        Sequence::from_distinct(vs)
    }

    /// Add `v` as the next vertex in build order (append when forward, prepend
    /// when backward) and fold every newly induced edge into the utility
    /// state. Returns the realized objective gain.
    pub(crate) fn push(&mut self, v: VertexId) -> Result<f64> {
        debug_assert!(!self.contains(v));
        let mark = self.utility.mark(&self.state);
        self.pos[v.index()] = self.seq.len();
        self.seq.push(v);
        let before = self.state.value();
        let candidates = if self.forward {
            self.hg.edges_ending_at(v)
        } else {
            self.hg.edges_starting_at(v)
        };
        for &e in candidates {
            if !self.state.contains(e) && self.induced(e) {
                self.utility.commit(&mut self.state, e)?;
            }
        }
        self.frames.push(mark);
        Ok(self.state.value() - before)
    }

    /// Undo the most recent push, restoring the utility state exactly.
    pub(crate) fn pop(&mut self) {
        let mark = self.frames.pop().expect("pop without a matching push");
        self.utility.rollback(&mut self.state, mark);
        let v = self.seq.pop().expect("sequence is non-empty");
        self.pos[v.index()] = ABSENT;
    }

    /// Number of the edge's vertices not yet in the sequence.
    pub(crate) fn missing_count(&self, e: EdgeId) -> usize {
        self.hg
            .edge_ref(e)
            .vertices()
            .iter()
            .filter(|v| !self.contains(**v))
            .count()
    }

    /// Whether the current sequence induces the edge: all vertices present and
    /// in the edge's order (increasing build positions forward, decreasing
    /// backward).
    pub(crate) fn induced(&self, e: EdgeId) -> bool {
        let mut prev: Option<usize> = None;
        for v in self.hg.edge_ref(e).vertices() {
            let p = self.pos[v.index()];
            if p == ABSENT {
                return false;
            }
            if let Some(q) = prev {
                let ordered = if self.forward { p > q } else { p < q };
                if !ordered {
                    return false;
                }
            }
            prev = Some(p);
        }
        true
    }

    /// Growth eligibility for the hyper solvers: forward requires the present
    /// vertices to form an in-order prefix of the edge, backward an in-order
    /// suffix.
    pub(crate) fn eligible(&self, e: EdgeId) -> bool {
        let vertices = self.hg.edge_ref(e).vertices();
        let mut prev: Option<usize> = None;
        if self.forward {
            let mut missing_seen = false;
            for v in vertices {
                let p = self.pos[v.index()];
                if p == ABSENT {
                    missing_seen = true;
                    continue;
                }
                if missing_seen {
                    return false;
                }
                if let Some(q) = prev {
                    if p <= q {
                        return false;
                    }
                }
                prev = Some(p);
            }
        } else {
            let mut present_seen = false;
            for v in vertices {
                let p = self.pos[v.index()];
                if p == ABSENT {
                    if present_seen {
                        return false;
                    }
                    continue;
                }
                present_seen = true;
                if let Some(q) = prev {
                    if p >= q {
                        return false;
                    }
                }
                prev = Some(p);
            }
        }
        true
    }

    /// Add the edge's missing vertices in the edge's order (reverse build
    /// order when backward, so the true sequence keeps the edge order).
    /// Returns the realized objective gain.
    pub(crate) fn grow_with(&mut self, e: EdgeId) -> Result<f64> {
        let vertices: Vec<VertexId> = self.hg.edge_ref(e).vertices().to_vec();
        let mut realized = 0.0;
        if self.forward {
            for v in vertices {
                if !self.contains(v) {
                    realized += self.push(v)?;
                }
            }
        } else {
            for v in vertices.into_iter().rev() {
                if !self.contains(v) {
                    realized += self.push(v)?;
                }
            }
        }
        Ok(realized)
    }
}
