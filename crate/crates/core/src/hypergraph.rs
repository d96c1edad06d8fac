//! Directed hypergraphs whose edges are ordered vertex sequences.
//!
//! An edge is a non-empty, non-repeating sequence of vertices; a length-1 edge
//! is a self-loop carrying standalone vertex value. A candidate solution (or a
//! user history) is a [`Sequence`]: an ordered list of distinct vertices. The
//! edges *induced* by a sequence are those whose vertices all appear in the
//! sequence in the edge's order; the objective of a sequence is a submodular
//! set function evaluated on its induced edge set.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense vertex identifier in `[0, n)` for the owning hypergraph.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of an edge, its index in the owning hypergraph's edge list.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An ordered, non-repeating sequence of vertices with an attached value.
///
/// The value is a plain payload here; the utility function decides whether it
/// is a weight or a probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperedge {
    vertices: Vec<VertexId>,
    value: f64,
}

impl Hyperedge {
    pub fn new(vertices: Vec<VertexId>, value: f64) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyEdge);
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(*v) {
                return Err(Error::RepeatedEdgeVertex { vertex: v.0 });
            }
        }
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidEdgeValue { value });
        }
        Ok(Self { vertices, value })
    }

    #[inline]
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false // constructor rejects empty edges
    }

    #[inline]
    pub fn is_self_loop(&self) -> bool {
        self.vertices.len() == 1
    }

    /// First vertex (the start point).
    #[inline]
    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    /// Last vertex (the end point, `s_l` in the conditional-probability reading).
    #[inline]
    pub fn last(&self) -> VertexId {
        *self.vertices.last().expect("edges are non-empty")
    }
}

/// An ordered list of distinct vertices: both candidate solutions and user
/// histories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<VertexId>", into = "Vec<VertexId>")]
pub struct Sequence(Vec<VertexId>);

impl Sequence {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(*v) {
                return Err(Error::RepeatedSequenceVertex { vertex: v.0 });
            }
        }
        Ok(Self(vertices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Construct from vertices already known to be distinct.
    pub(crate) fn from_distinct(vertices: Vec<VertexId>) -> Self {
        debug_assert!({
            let set: BTreeSet<_> = vertices.iter().collect();
            set.len() == vertices.len()
        });
        Self(vertices)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    /// First `len` items (the whole sequence when shorter).
    pub fn prefix(&self, len: usize) -> Sequence {
        Sequence(self.0[..len.min(self.0.len())].to_vec())
    }

    /// Subsequence of `self` restricted to members of `vertex_set`, order
    /// preserved. This is the "intersection of a sequence and a set".
    pub fn ordered_intersection(&self, vertex_set: &BTreeSet<VertexId>) -> Sequence {
        Sequence(
            self.0
                .iter()
                .copied()
                .filter(|v| vertex_set.contains(v))
                .collect(),
        )
    }

    /// Order-preserving (not necessarily contiguous) subsequence containment.
    pub fn is_subsequence_of(&self, other: &Sequence) -> bool {
        is_subsequence(&self.0, &other.0)
    }
}

impl From<Sequence> for Vec<VertexId> {
    fn from(s: Sequence) -> Self {
        s.0
    }
}

impl TryFrom<Vec<VertexId>> for Sequence {
    type Error = Error;

    fn try_from(vertices: Vec<VertexId>) -> Result<Self> {
        Sequence::new(vertices)
    }
}

/// Order-preserving containment of `needle` in `haystack`.
pub(crate) fn is_subsequence(needle: &[VertexId], haystack: &[VertexId]) -> bool {
    let mut it = haystack.iter();
    needle.iter().all(|v| it.any(|w| w == v))
}

/// A set of edge ids, the argument domain of the submodular utility.
///
/// Backed by a `BTreeSet` so iteration order is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeSet(BTreeSet<EdgeId>);

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, e: EdgeId) -> bool {
        self.0.insert(e)
    }

    pub fn remove(&mut self, e: EdgeId) -> bool {
        self.0.remove(&e)
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.contains(&e)
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<T: IntoIterator<Item = EdgeId>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Immutable directed hypergraph: a vertex universe `[0, n)` plus an ordered
/// edge list. Degree tables and the maximum edge size are computed once at
/// construction.
///
/// Degree rule: a self-loop contributes 1 to both the in- and out-degree of
/// its vertex; any other edge contributes 1 to `d_in(v)` for each of its
/// non-first vertices `v` and 1 to `d_out(v)` for each of its non-last
/// vertices.
#[derive(Debug, Clone)]
pub struct DirectedHypergraph {
    n: usize,
    edges: Vec<Hyperedge>,
    d_in: Vec<u32>,
    d_out: Vec<u32>,
    max_d_in: u32,
    max_d_out: u32,
    max_edge_size: usize,
    ending_at: Vec<Vec<EdgeId>>,
    starting_at: Vec<Vec<EdgeId>>,
}

impl DirectedHypergraph {
    pub fn new(n: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        let mut d_in = vec![0u32; n];
        let mut d_out = vec![0u32; n];
        let mut ending_at = vec![Vec::new(); n];
        let mut starting_at = vec![Vec::new(); n];
        let mut max_edge_size = 0usize;

        for (idx, edge) in edges.iter().enumerate() {
            let id = EdgeId(idx as u32);
            for v in edge.vertices() {
                if v.index() >= n {
                    return Err(Error::VertexOutOfRange { vertex: v.0, n });
                }
            }
            max_edge_size = max_edge_size.max(edge.len());
            if edge.is_self_loop() {
                let v = edge.first().index();
                d_in[v] += 1;
                d_out[v] += 1;
            } else {
                let last = edge.len() - 1;
                for (i, v) in edge.vertices().iter().enumerate() {
                    if i != 0 {
                        d_in[v.index()] += 1;
                    }
                    if i != last {
                        d_out[v.index()] += 1;
                    }
                }
            }
            ending_at[edge.last().index()].push(id);
            starting_at[edge.first().index()].push(id);
        }

        let max_d_in = d_in.iter().copied().max().unwrap_or(0);
        let max_d_out = d_out.iter().copied().max().unwrap_or(0);

        Ok(Self {
            n,
            edges,
            d_in,
            d_out,
            max_d_in,
            max_d_out,
            max_edge_size,
            ending_at,
            starting_at,
        })
    }

    /// Build from `(vertex list, value)` pairs.
    pub fn from_edge_lists(n: usize, specs: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        let edges = specs
            .into_iter()
            .map(|(vs, value)| Hyperedge::new(vs.into_iter().map(VertexId).collect(), value))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, edges)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Hyperedge> {
        self.edges.get(id.index()).ok_or(Error::UnknownEdge {
            edge: id.0,
            m: self.edges.len(),
        })
    }

    /// Access for internally produced ids.
    #[inline]
    pub(crate) fn edge_ref(&self, id: EdgeId) -> &Hyperedge {
        &self.edges[id.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Hyperedge)> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| (EdgeId(i as u32), e))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    /// Maximum edge cardinality `r`; 0 for an edgeless hypergraph.
    #[inline]
    pub fn max_edge_size(&self) -> usize {
        self.max_edge_size
    }

    pub fn in_degree(&self, v: VertexId) -> u32 {
        self.d_in[v.index()]
    }

    pub fn out_degree(&self, v: VertexId) -> u32 {
        self.d_out[v.index()]
    }

    #[inline]
    pub fn max_in_degree(&self) -> u32 {
        self.max_d_in
    }

    #[inline]
    pub fn max_out_degree(&self) -> u32 {
        self.max_d_out
    }

    /// `min(max d_in, max d_out)`, the degree term in the approximation bounds.
    #[inline]
    pub fn delta(&self) -> u32 {
        self.max_d_in.min(self.max_d_out)
    }

    /// Edges whose last vertex is `v`.
    pub fn edges_ending_at(&self, v: VertexId) -> &[EdgeId] {
        &self.ending_at[v.index()]
    }

    /// Edges whose first vertex is `v`.
    pub fn edges_starting_at(&self, v: VertexId) -> &[EdgeId] {
        &self.starting_at[v.index()]
    }

    fn position_map(&self, sigma: &Sequence) -> Result<Vec<usize>> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, v) in sigma.iter().enumerate() {
            if v.index() >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v.0, n: self.n });
            }
            pos[v.index()] = i;
        }
        Ok(pos)
    }

    /// The edges induced by `sigma`: every edge whose vertices all appear in
    /// `sigma` in the edge's order.
    pub fn induced_edges(&self, sigma: &Sequence) -> Result<EdgeSet> {
        let pos = self.position_map(sigma)?;
        Ok(self
            .edges()
            .filter(|(_, e)| edge_induced(e.vertices(), &pos))
            .map(|(id, _)| id)
            .collect())
    }

    /// Edges whose ordered intersection with `sigma` is a prefix of the edge.
    ///
    /// A fully induced edge is its own prefix and stays in the set; its
    /// marginal gain under a monotone utility is zero, so greedy selection is
    /// unaffected.
    pub fn eligible_prefix_edges(&self, sigma: &Sequence) -> Result<EdgeSet> {
        let pos = self.position_map(sigma)?;
        Ok(self
            .edges()
            .filter(|(_, e)| prefix_eligible(e.vertices(), &pos))
            .map(|(id, _)| id)
            .collect())
    }

    /// Mirror of [`Self::eligible_prefix_edges`] with a suffix test, used by
    /// the backward solvers.
    pub fn eligible_suffix_edges(&self, sigma: &Sequence) -> Result<EdgeSet> {
        let pos = self.position_map(sigma)?;
        Ok(self
            .edges()
            .filter(|(_, e)| suffix_eligible(e.vertices(), &pos))
            .map(|(id, _)| id)
            .collect())
    }

    /// Restriction to edges with at most two vertices, for running the
    /// pairwise solvers on hypergraph-trained models. Edge ids are renumbered.
    pub fn pairwise_restriction(&self) -> DirectedHypergraph {
        let edges = self
            .edges
            .iter()
            .filter(|e| e.len() <= 2)
            .cloned()
            .collect();
        DirectedHypergraph::new(self.n, edges).expect("restriction of a valid hypergraph is valid")
    }
}

/// All vertices present, positions strictly increasing along the edge order.
fn edge_induced(vertices: &[VertexId], pos: &[usize]) -> bool {
    let mut prev = None;
    for v in vertices {
        let p = pos[v.index()];
        if p == usize::MAX {
            return false;
        }
        if let Some(q) = prev {
            if p <= q {
                return false;
            }
        }
        prev = Some(p);
    }
    true
}

/// The vertices of the edge present in the sequence must be exactly the first
/// `t` vertices of the edge, appearing in the sequence in edge order.
fn prefix_eligible(vertices: &[VertexId], pos: &[usize]) -> bool {
    let mut prev = None;
    let mut in_prefix = true;
    for v in vertices {
        let p = pos[v.index()];
        if p == usize::MAX {
            in_prefix = false;
            continue;
        }
        if !in_prefix {
            return false; // present vertex after a missing one: not a prefix
        }
        if let Some(q) = prev {
            if p <= q {
                return false; // out of order in the sequence
            }
        }
        prev = Some(p);
    }
    true
}

/// Mirror of [`prefix_eligible`]: present vertices form a suffix of the edge.
fn suffix_eligible(vertices: &[VertexId], pos: &[usize]) -> bool {
    let mut prev = None;
    let mut seen_present = false;
    for v in vertices {
        let p = pos[v.index()];
        if p == usize::MAX {
            if seen_present {
                return false; // missing vertex after a present one: not a suffix
            }
            continue;
        }
        seen_present = true;
        if let Some(q) = prev {
            if p <= q {
                return false;
            }
        }
        prev = Some(p);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(ids: &[u32]) -> Sequence {
        Sequence::new(ids.iter().copied().map(VertexId).collect()).unwrap()
    }

    fn vset(ids: &[u32]) -> BTreeSet<VertexId> {
        ids.iter().copied().map(VertexId).collect()
    }

    /// Fig-style three-vertex fixture: F=0, T=1, R=2 isolated; self-loops on F
    /// and T plus the pair edge (F, T), all with unit value.
    fn lotr() -> DirectedHypergraph {
        DirectedHypergraph::from_edge_lists(
            3,
            vec![(vec![0, 1], 1.0), (vec![0], 1.0), (vec![1], 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn ordered_intersection_keeps_sequence_order() {
        let sigma = seq(&[0, 2, 1]);
        assert_eq!(sigma.ordered_intersection(&vset(&[1, 2])), seq(&[2, 1]));
        assert_eq!(Sequence::empty().ordered_intersection(&vset(&[1])), seq(&[]));
        // (F, T, R) restricted to {F, R} keeps (F, R)
        assert_eq!(seq(&[0, 1, 2]).ordered_intersection(&vset(&[0, 2])), seq(&[0, 2]));
    }

    #[test]
    fn ordered_intersection_matches_naive_filter() {
        let sigma = seq(&[4, 1, 3, 0]);
        let set = vset(&[0, 1, 5]);
        let naive: Vec<VertexId> = sigma.iter().filter(|v| set.contains(v)).collect();
        assert_eq!(sigma.ordered_intersection(&set).as_slice(), naive.as_slice());
    }

    #[test]
    fn induced_edges_on_worked_example() {
        let hg = lotr();
        let fwd = hg.induced_edges(&seq(&[0, 1])).unwrap();
        assert_eq!(fwd.len(), 3);
        let rev = hg.induced_edges(&seq(&[1, 0])).unwrap();
        assert_eq!(rev.len(), 2);
        assert!(!rev.contains(EdgeId(0))); // (F, T) not induced by (T, F)
        assert!(hg.induced_edges(&Sequence::empty()).unwrap().is_empty());
    }

    #[test]
    fn induced_requires_all_vertices_in_order() {
        let hg = DirectedHypergraph::from_edge_lists(4, vec![(vec![0, 1, 2], 1.0)]).unwrap();
        assert_eq!(hg.induced_edges(&seq(&[0, 1, 2])).unwrap().len(), 1);
        assert_eq!(hg.induced_edges(&seq(&[0, 3, 1, 2])).unwrap().len(), 1);
        assert!(hg.induced_edges(&seq(&[0, 2, 1])).unwrap().is_empty());
        assert!(hg.induced_edges(&seq(&[0, 1])).unwrap().is_empty());
    }

    #[test]
    fn prefix_eligibility_cases() {
        let hg = DirectedHypergraph::from_edge_lists(4, vec![(vec![0, 1, 2], 1.0)]).unwrap();
        let e = EdgeId(0);
        assert!(hg.eligible_prefix_edges(&seq(&[0, 1])).unwrap().contains(e));
        assert!(!hg.eligible_prefix_edges(&seq(&[1])).unwrap().contains(e));
        assert!(hg.eligible_prefix_edges(&Sequence::empty()).unwrap().contains(e));
        // interleaved foreign vertices do not matter
        assert!(hg.eligible_prefix_edges(&seq(&[3, 0])).unwrap().contains(e));
        // full containment in order keeps the edge eligible
        assert!(hg.eligible_prefix_edges(&seq(&[0, 1, 2])).unwrap().contains(e));
        // present but out of order is not
        assert!(!hg.eligible_prefix_edges(&seq(&[1, 0])).unwrap().contains(e));
    }

    #[test]
    fn suffix_eligibility_cases() {
        let hg = DirectedHypergraph::from_edge_lists(4, vec![(vec![0, 1, 2], 1.0), (vec![3], 1.0)])
            .unwrap();
        let e = EdgeId(0);
        assert!(hg.eligible_suffix_edges(&seq(&[1, 2])).unwrap().contains(e));
        assert!(!hg.eligible_suffix_edges(&seq(&[0])).unwrap().contains(e));
        assert!(hg.eligible_suffix_edges(&Sequence::empty()).unwrap().contains(EdgeId(1)));
        assert!(hg.eligible_suffix_edges(&seq(&[2])).unwrap().contains(e));
        assert!(!hg.eligible_suffix_edges(&seq(&[2, 1])).unwrap().contains(e));
    }

    #[test]
    fn eligible_prefix_of_empty_sequence_is_every_edge() {
        let hg = lotr();
        let all = hg.eligible_prefix_edges(&Sequence::empty()).unwrap();
        assert_eq!(all.len(), hg.edge_count());
    }

    #[test]
    fn degree_rule() {
        // single self-loop
        let hg = DirectedHypergraph::from_edge_lists(1, vec![(vec![0], 1.0)]).unwrap();
        assert_eq!(hg.in_degree(VertexId(0)), 1);
        assert_eq!(hg.out_degree(VertexId(0)), 1);
        assert_eq!(hg.delta(), 1);

        // single edge (a, b, c)
        let hg = DirectedHypergraph::from_edge_lists(3, vec![(vec![0, 1, 2], 1.0)]).unwrap();
        assert_eq!(
            (0..3).map(|v| hg.in_degree(VertexId(v))).collect::<Vec<_>>(),
            vec![0, 1, 1]
        );
        assert_eq!(
            (0..3).map(|v| hg.out_degree(VertexId(v))).collect::<Vec<_>>(),
            vec![1, 1, 0]
        );

        // empty edge list
        let hg = DirectedHypergraph::new(2, Vec::new()).unwrap();
        assert_eq!(hg.max_in_degree(), 0);
        assert_eq!(hg.max_out_degree(), 0);
        assert_eq!(hg.delta(), 0);
        assert_eq!(hg.max_edge_size(), 0);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(Hyperedge::new(vec![], 1.0), Err(Error::EmptyEdge)));
        assert!(matches!(
            Hyperedge::new(vec![VertexId(1), VertexId(1)], 1.0),
            Err(Error::RepeatedEdgeVertex { .. })
        ));
        assert!(matches!(
            Hyperedge::new(vec![VertexId(0)], -1.0),
            Err(Error::InvalidEdgeValue { .. })
        ));
        assert!(matches!(
            DirectedHypergraph::from_edge_lists(1, vec![(vec![3], 1.0)]),
            Err(Error::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            Sequence::new(vec![VertexId(0), VertexId(0)]),
            Err(Error::RepeatedSequenceVertex { .. })
        ));
    }

    #[test]
    fn duplicate_edges_are_distinct_ids() {
        let hg =
            DirectedHypergraph::from_edge_lists(2, vec![(vec![0, 1], 0.3), (vec![0, 1], 0.5)])
                .unwrap();
        let induced = hg.induced_edges(&seq(&[0, 1])).unwrap();
        assert_eq!(induced.len(), 2);
    }

    #[test]
    fn induced_is_monotone_under_extension() {
        let hg = lotr();
        let shorter = hg.induced_edges(&seq(&[0])).unwrap();
        let longer = hg.induced_edges(&seq(&[0, 1])).unwrap();
        assert!(shorter.is_subset(&longer));
    }

    #[test]
    fn pairwise_restriction_drops_large_edges() {
        let hg = DirectedHypergraph::from_edge_lists(
            3,
            vec![(vec![0, 1, 2], 1.0), (vec![0, 1], 1.0), (vec![2], 1.0)],
        )
        .unwrap();
        let restricted = hg.pairwise_restriction();
        assert_eq!(restricted.edge_count(), 2);
        assert_eq!(restricted.max_edge_size(), 2);
    }

    #[test]
    fn subsequence_containment() {
        assert!(seq(&[1, 3]).is_subsequence_of(&seq(&[0, 1, 2, 3])));
        assert!(!seq(&[3, 1]).is_subsequence_of(&seq(&[0, 1, 2, 3])));
        assert!(Sequence::empty().is_subsequence_of(&seq(&[0])));
    }
}
