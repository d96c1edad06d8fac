//! Greedy sequence solvers and their approximation-bound calculators.
//!
//! The pairwise solvers handle digraphs (edges of at most two vertices) and
//! pick, at each step, the eligible edge of maximum marginal gain; forward
//! eligibility excludes edges whose end point is already in the sequence,
//! backward eligibility excludes edges whose start point is. The hyper solvers
//! generalize eligibility to "the present vertices form an in-order prefix
//! (forward) or suffix (backward) of the edge".
//!
//! Selected edges append (forward) or prepend (backward) their missing
//! vertices without changing their order. The main loop follows the published
//! guards (`|sigma| <= k - 2` pairwise, `|sigma| <= k - r` hyper), so a run
//! may return fewer than `k` vertices; the fill-to-k heuristic keeps selecting
//! among edges with at most `k - |sigma|` new vertices until nothing adds
//! value.
//!
//! One liberty taken for termination: an eligible edge all of whose vertices
//! are already selected adds neither vertices nor value, so the argmax skips
//! it. On digraphs this makes the hyper eligible set coincide exactly with the
//! pairwise rule, which the degeneracy tests rely on.

use serde::{Deserialize, Serialize};

use crate::engine::SequenceState;
use crate::error::{Error, Result};
use crate::hypergraph::{DirectedHypergraph, EdgeId, Sequence, VertexId};
use crate::utility::UtilityFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    Both,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Forward => write!(f, "forward"),
            Direction::Backward => write!(f, "backward"),
            Direction::Both => write!(f, "both"),
        }
    }
}

/// Deterministic argmax tie rule. Only one rule exists today; it is recorded
/// in every report for reproducibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieBreak {
    #[default]
    #[serde(rename = "smallest-edge-id")]
    SmallestEdgeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Cardinality parameter; the output never exceeds it. `k = 0` yields the
    /// empty sequence.
    pub k: usize,
    pub direction: Direction,
    pub fill_to_k: bool,
    pub tie_break: TieBreak,
}

impl SolveConfig {
    /// Defaults for the pairwise solvers: forward, no fill (faithful to the
    /// published loop, which can leave one slot unused).
    pub fn pairwise(k: usize) -> Self {
        Self {
            k,
            direction: Direction::Forward,
            fill_to_k: false,
            tie_break: TieBreak::SmallestEdgeId,
        }
    }

    /// Defaults for the hyper solvers: forward, fill enabled (selecting up to
    /// `k` vertices is safe under a monotone utility).
    pub fn hyper(k: usize) -> Self {
        Self {
            k,
            direction: Direction::Forward,
            fill_to_k: true,
            tie_break: TieBreak::SmallestEdgeId,
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_fill(mut self, fill_to_k: bool) -> Self {
        self.fill_to_k = fill_to_k;
        self
    }
}

/// One greedy selection: the chosen edge, its marginal gain when chosen, the
/// realized objective delta (at least the gain; side-induced edges can add
/// more), and the sequence length after the step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub edge: EdgeId,
    pub gain: f64,
    pub realized: f64,
    pub sigma_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: String,
    pub direction_used: Direction,
    pub sigma: Sequence,
    pub objective: f64,
    /// Instance-specific approximation guarantee for the algorithm and
    /// direction(s) run; zero for the frequency baseline.
    pub bound: f64,
    pub tie_break: TieBreak,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Pairwise,
    Hyper,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Pairwise => "sequence-greedy",
            Family::Hyper => "hyper-sequence-greedy",
        }
    }
}

/// Sequence-Greedy on a digraph. Errors if any edge has more than two
/// vertices.
pub fn sequence_greedy(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    dispatch(hg, utility, cfg, Family::Pairwise)
}

pub fn sequence_greedy_forward(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    run_greedy(hg, utility, cfg, Family::Pairwise, true)
}

pub fn sequence_greedy_backward(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    run_greedy(hg, utility, cfg, Family::Pairwise, false)
}

/// Hyper Sequence-Greedy on a directed hypergraph.
pub fn hyper_sequence_greedy(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    dispatch(hg, utility, cfg, Family::Hyper)
}

pub fn hyper_sequence_greedy_forward(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    run_greedy(hg, utility, cfg, Family::Hyper, true)
}

pub fn hyper_sequence_greedy_backward(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    run_greedy(hg, utility, cfg, Family::Hyper, false)
}

fn dispatch(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    cfg: &SolveConfig,
    family: Family,
) -> Result<SolveReport> {
    match cfg.direction {
        Direction::Forward => run_greedy(hg, utility, cfg, family, true),
        Direction::Backward => run_greedy(hg, utility, cfg, family, false),
        Direction::Both => best_of_both(hg, utility, cfg, family),
    }
}

/// Run both directions and keep the higher objective; ties go to forward. The
/// reported bound is the better of the two directional guarantees, which the
/// maximum of the two runs attains.
fn best_of_both(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    cfg: &SolveConfig,
    family: Family,
) -> Result<SolveReport> {
    let forward = run_greedy(hg, utility, cfg, family, true)?;
    let backward = run_greedy(hg, utility, cfg, family, false)?;
    let bound = forward.bound.max(backward.bound);
    let mut winner = if backward.objective > forward.objective {
        backward
    } else {
        forward
    };
    winner.bound = bound;
    Ok(winner)
}

fn run_greedy(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    cfg: &SolveConfig,
    family: Family,
    forward: bool,
) -> Result<SolveReport> {
    let TieBreak::SmallestEdgeId = cfg.tie_break;
    let guard_step = match family {
        Family::Pairwise => {
            for (id, e) in hg.edges() {
                if e.len() > 2 {
                    return Err(Error::PairwiseRequired {
                        edge: id.0,
                        len: e.len(),
                    });
                }
            }
            2
        }
        Family::Hyper => hg.max_edge_size(),
    };

    let mut ss = SequenceState::new(hg, utility, forward);
    let mut eligible: Vec<EdgeId> = hg.edge_ids().collect();
    let mut trace = Vec::new();

    loop {
        if ss.len() as i64 > cfg.k as i64 - guard_step as i64 {
            break;
        }
        retain_eligible(&mut eligible, &ss, hg, family, forward);
        let chosen = argmax_gain(&eligible, &ss, utility, family, None)?;
        let Some((edge, gain)) = chosen else { break };
        let realized = ss.grow_with(edge)?;
        trace.push(TraceStep {
            edge,
            gain,
            realized,
            sigma_len: ss.len(),
        });
    }

    if cfg.fill_to_k {
        fill_to_k(&mut ss, &mut eligible, hg, utility, cfg.k, family, forward, &mut trace)?;
    }

    finish_report(hg, utility, ss, trace, cfg.k, family, forward, cfg.tie_break)
}

/// Drop edges that can no longer be selected. Eligibility only shrinks as the
/// sequence grows, so dropped edges never come back.
fn retain_eligible(
    eligible: &mut Vec<EdgeId>,
    ss: &SequenceState<'_>,
    hg: &DirectedHypergraph,
    family: Family,
    forward: bool,
) {
    match family {
        Family::Pairwise => eligible.retain(|e| {
            let edge = hg.edge_ref(*e);
            let anchor = if forward { edge.last() } else { edge.first() };
            !ss.contains(anchor)
        }),
        Family::Hyper => eligible.retain(|e| ss.eligible(*e)),
    }
}

/// Argmax of marginal gain over the eligible set, smallest edge id on ties.
/// Skips edges adding no new vertex (their gain is zero and selecting them
/// would not advance the sequence) and, when `missing_cap` is set, edges
/// adding more vertices than the remaining budget.
fn argmax_gain(
    eligible: &[EdgeId],
    ss: &SequenceState<'_>,
    utility: &UtilityFunction,
    family: Family,
    missing_cap: Option<usize>,
) -> Result<Option<(EdgeId, f64)>> {
    let mut best: Option<(EdgeId, f64)> = None;
    for &e in eligible {
        if family == Family::Hyper || missing_cap.is_some() {
            let missing = ss.missing_count(e);
            if missing == 0 {
                continue;
            }
            if let Some(cap) = missing_cap {
                if missing > cap {
                    continue;
                }
            }
        }
        let gain = utility.peek_gain(ss.eval_state(), e)?;
        match best {
            Some((_, b)) if gain <= b => {}
            _ => best = Some((e, gain)),
        }
    }
    Ok(best)
}

/// Keep selecting among edges whose missing vertices fit the remaining budget
/// until the sequence reaches `k` or no eligible edge adds value.
#[allow(clippy::too_many_arguments)]
fn fill_to_k(
    ss: &mut SequenceState<'_>,
    eligible: &mut Vec<EdgeId>,
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    k: usize,
    family: Family,
    forward: bool,
    trace: &mut Vec<TraceStep>,
) -> Result<()> {
    loop {
        let budget = k.saturating_sub(ss.len());
        if budget == 0 {
            break;
        }
        retain_eligible(eligible, ss, hg, family, forward);
        let chosen = argmax_gain(eligible, ss, utility, family, Some(budget))?;
        match chosen {
            Some((edge, gain)) if gain > 0.0 => {
                let realized = ss.grow_with(edge)?;
                trace.push(TraceStep {
                    edge,
                    gain,
                    realized,
                    sigma_len: ss.len(),
                });
            }
            _ => break,
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    ss: SequenceState<'_>,
    trace: Vec<TraceStep>,
    k: usize,
    family: Family,
    forward: bool,
    tie_break: TieBreak,
) -> Result<SolveReport> {
    let sigma = ss.sigma();
    debug_assert!(sigma.len() <= k);
    let objective = utility.value(&hg.induced_edges(&sigma)?)?;
    debug_assert!(
        (objective - ss.value()).abs() < 1e-9,
        "incremental objective drifted from scratch evaluation"
    );
    let degree = if forward {
        hg.max_in_degree()
    } else {
        hg.max_out_degree()
    };
    let bound_r = match family {
        Family::Pairwise => 2,
        Family::Hyper => hg.max_edge_size().max(1),
    };
    Ok(SolveReport {
        algorithm: family.name().to_string(),
        direction_used: if forward {
            Direction::Forward
        } else {
            Direction::Backward
        },
        sigma,
        objective,
        bound: theorem_bound(k, degree, bound_r),
        tie_break,
        trace,
    })
}

/// Ranks vertices by their total self-loop value (0 when absent), excludes
/// history vertices, and returns the top `k` in descending value; ties and
/// vertices without self-loops fall back to ascending vertex id.
pub fn frequency_baseline(
    hg: &DirectedHypergraph,
    utility: &UtilityFunction,
    k: usize,
    history: &Sequence,
) -> Result<SolveReport> {
    let mut score = vec![0.0f64; hg.vertex_count()];
    for (_, e) in hg.edges() {
        if e.is_self_loop() {
            score[e.first().index()] += e.value();
        }
    }
    let mut candidates: Vec<u32> = (0..hg.vertex_count() as u32)
        .filter(|v| !history.contains(VertexId(*v)))
        .collect();
    candidates.sort_by(|a, b| {
        score[*b as usize]
            .partial_cmp(&score[*a as usize])
            .expect("edge values are finite")
            .then(a.cmp(b))
    });
    let sigma =
        Sequence::from_distinct(candidates.into_iter().take(k).map(VertexId).collect());
    let objective = utility.value(&hg.induced_edges(&sigma)?)?;
    Ok(SolveReport {
        algorithm: "frequency".to_string(),
        direction_used: Direction::Forward,
        sigma,
        objective,
        bound: 0.0,
        tie_break: TieBreak::SmallestEdgeId,
        trace: Vec::new(),
    })
}

/// Finite-k approximation guarantee of the greedy solvers.
///
/// For digraphs (`r <= 2`) this is `(1 - e^{-(1 - 1/k)}) / (2 deg + 1)`; for
/// larger edges it is `(1 - e^{-(1 - r/k)}) / (r deg + 1)`. With `r = 1` the
/// two coincide at `(1 - e^{-(1 - 1/k)}) / (deg + 1)`.
pub fn theorem_bound(k: usize, degree: u32, r: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let r = r.max(1);
    let exponent = if r <= 2 {
        1.0 - 1.0 / k as f64
    } else {
        1.0 - r as f64 / k as f64
    };
    (1.0 - (-exponent).exp()) / (r as f64 * degree as f64 + 1.0)
}

/// The applicable finite-k bound for the direction(s) run: forward substitutes
/// the maximum in-degree, backward the maximum out-degree, and running both
/// directions earns the better of the two.
pub fn approx_bound(k: usize, d_in: u32, d_out: u32, r: usize, direction: Direction) -> f64 {
    match direction {
        Direction::Forward => theorem_bound(k, d_in, r),
        Direction::Backward => theorem_bound(k, d_out, r),
        Direction::Both => theorem_bound(k, d_in, r).max(theorem_bound(k, d_out, r)),
    }
}

/// Large-k limit of the guarantee, `(1 - 1/e) / (r delta + 1)`.
pub fn asymptotic_bound(delta: u32, r: usize) -> f64 {
    (1.0 - (-1.0f64).exp()) / (r.max(1) as f64 * delta as f64 + 1.0)
}
