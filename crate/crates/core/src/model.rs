//! Hypergraph value types and exact density arithmetic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::ExactDensity;

pub type VertexId = u32;

/// Identity of a live edge. Handles are never reused within one structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EdgeHandle(pub u64);

impl fmt::Display for EdgeHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A hyperedge in canonical form: strictly increasing vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperedge(Box<[VertexId]>);

impl Hyperedge {
    /// Sorts the input; repeated vertices are rejected rather than collapsed.
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyEdge);
        }
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateVertex(w[0]));
        }
        Ok(Self(vertices.into_boxed_slice()))
    }

    /// Like [`Hyperedge::new`] but also enforces the universe size and rank.
    pub fn checked(vertices: Vec<VertexId>, n: usize, rank: usize) -> Result<Self> {
        let e = Self::new(vertices)?;
        e.validate(n, rank)?;
        Ok(e)
    }

    pub fn validate(&self, n: usize, rank: usize) -> Result<()> {
        if self.len() > rank {
            return Err(Error::RankExceeded { size: self.len(), rank });
        }
        match self.0.last() {
            Some(&v) if v as usize >= n => Err(Error::VertexOutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// True iff every vertex of the edge is flagged in `inside`.
    pub fn inside(&self, inside: &[bool]) -> bool {
        self.0.iter().all(|&v| inside.get(v as usize).copied().unwrap_or(false))
    }
}

impl TryFrom<Vec<VertexId>> for Hyperedge {
    type Error = Error;

    fn try_from(v: Vec<VertexId>) -> Result<Self> {
        Self::new(v)
    }
}

/// Weighted rank-`r` hypergraph on the universe `[0, n)`, with edges keyed by
/// handle so parallel copies of one vertex set stay distinguishable.
#[derive(Debug, Clone)]
pub struct WeightedHypergraph {
    n: usize,
    rank: usize,
    next_handle: u64,
    edges: BTreeMap<EdgeHandle, (Hyperedge, u64)>,
}

impl WeightedHypergraph {
    pub fn new(n: usize, rank: usize) -> Self {
        Self { n, rank, next_handle: 0, edges: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of live edges (handles), i.e. `m`.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn insert(&mut self, edge: Hyperedge, weight: u64) -> Result<EdgeHandle> {
        if weight == 0 {
            return Err(Error::ZeroWeight);
        }
        edge.validate(self.n, self.rank)?;
        let h = EdgeHandle(self.next_handle);
        self.next_handle += 1;
        self.edges.insert(h, (edge, weight));
        Ok(h)
    }

    pub fn remove(&mut self, handle: EdgeHandle) -> Result<(Hyperedge, u64)> {
        self.edges.remove(&handle).ok_or(Error::UnknownHandle(handle))
    }

    pub fn get(&self, handle: EdgeHandle) -> Option<(&Hyperedge, u64)> {
        self.edges.get(&handle).map(|(e, w)| (e, *w))
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeHandle, &Hyperedge, u64)> + '_ {
        self.edges.iter().map(|(h, (e, w))| (*h, e, *w))
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().map(|(_, w)| w).sum()
    }

    /// `w_max`, or 0 on the empty graph.
    pub fn max_weight(&self) -> u64 {
        self.edges.values().map(|(_, w)| *w).max().unwrap_or(0)
    }

    /// Sorted union of all edge vertex sets.
    pub fn support(&self) -> Vec<VertexId> {
        let mut seen = vec![false; self.n];
        for (e, _) in self.edges.values() {
            for &v in e.vertices() {
                seen[v as usize] = true;
            }
        }
        (0..self.n as VertexId).filter(|&v| seen[v as usize]).collect()
    }

    /// Largest multiplicity of a vertex set in the unweighted expansion:
    /// weights of handles sharing a vertex set add up.
    pub fn max_multiplicity(&self) -> u64 {
        let mut by_set: HashMap<&Hyperedge, u64> = HashMap::new();
        for (e, w) in self.edges.values() {
            *by_set.entry(e).or_default() += w;
        }
        by_set.into_values().max().unwrap_or(0)
    }

    /// Multiplies every weight by `k`.
    pub fn scaled(&self, k: u64) -> Self {
        let mut out = self.clone();
        for (_, w) in out.edges.values_mut() {
            *w *= k;
        }
        out
    }

    /// Total weight of edges lying entirely inside `subset`.
    pub fn induced_weight(&self, subset: &[VertexId]) -> Result<u64> {
        let mask = self.mask(subset)?;
        Ok(self.edges.values().filter(|(e, _)| e.inside(&mask)).map(|(_, w)| w).sum())
    }

    /// `rho(U)`: weight of the edges induced by `U`, divided by `|U|`.
    pub fn density(&self, subset: &[VertexId]) -> Result<ExactDensity> {
        let weight = self.induced_weight(subset)?;
        let size = self.mask(subset)?.iter().filter(|&&b| b).count() as u64;
        Ok(ExactDensity::new(weight, size))
    }

    fn mask(&self, subset: &[VertexId]) -> Result<Vec<bool>> {
        if subset.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let mut mask = vec![false; self.n];
        for &v in subset {
            let slot = mask
                .get_mut(v as usize)
                .ok_or(Error::VertexOutOfRange { vertex: v, n: self.n })?;
            *slot = true;
        }
        Ok(mask)
    }
}

/// Free-function form of [`WeightedHypergraph::density`].
pub fn density(h: &WeightedHypergraph, subset: &[VertexId]) -> Result<ExactDensity> {
    h.density(subset)
}

/// Free-function form of [`WeightedHypergraph::max_multiplicity`].
pub fn max_multiplicity(h: &WeightedHypergraph) -> u64 {
    h.max_multiplicity()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[VertexId]) -> Hyperedge {
        Hyperedge::new(v.to_vec()).unwrap()
    }

    fn triangle_plus() -> WeightedHypergraph {
        let mut h = WeightedHypergraph::new(3, 3);
        for s in [&[0, 1][..], &[1, 2], &[0, 2], &[0, 1, 2]] {
            h.insert(e(s), 1).unwrap();
        }
        h
    }

    #[test]
    fn canonical_form() {
        assert_eq!(e(&[3, 1, 2]).vertices(), &[1, 2, 3]);
        assert_eq!(Hyperedge::new(vec![1, 1]), Err(Error::DuplicateVertex(1)));
        assert_eq!(Hyperedge::new(vec![]), Err(Error::EmptyEdge));
        assert!(matches!(
            Hyperedge::checked(vec![0, 1, 2], 5, 2),
            Err(Error::RankExceeded { size: 3, rank: 2 })
        ));
        assert!(matches!(
            Hyperedge::checked(vec![0, 7], 5, 2),
            Err(Error::VertexOutOfRange { vertex: 7, n: 5 })
        ));
    }

    #[test]
    fn density_examples() {
        let mut h = WeightedHypergraph::new(4, 2);
        h.insert(e(&[1, 3]), 9).unwrap();
        assert_eq!(h.density(&[1, 3]).unwrap(), ExactDensity::new(9, 2));

        let t = triangle_plus();
        assert_eq!(t.density(&[0, 1, 2]).unwrap(), ExactDensity::new(4, 3));
        assert_eq!(t.density(&[0, 1]).unwrap(), ExactDensity::new(1, 2));
        assert_eq!(t.density(&[]), Err(Error::EmptyVertexSet));
    }

    #[test]
    fn multiplicity_examples() {
        let mut h = WeightedHypergraph::new(3, 2);
        assert_eq!(h.max_multiplicity(), 0);
        h.insert(e(&[0, 1]), 7).unwrap();
        assert_eq!(max_multiplicity(&h), 7);

        let mut h = WeightedHypergraph::new(3, 2);
        h.insert(e(&[0, 1]), 3).unwrap();
        h.insert(e(&[0, 1]), 4).unwrap();
        assert_eq!(h.max_multiplicity(), 7);

        let mut h = WeightedHypergraph::new(3, 2);
        h.insert(e(&[0, 1]), 2).unwrap();
        h.insert(e(&[1, 2]), 5).unwrap();
        assert_eq!(h.max_multiplicity(), 5);
    }

    #[test]
    fn rejects_zero_weight_and_unknown_handles() {
        let mut h = WeightedHypergraph::new(3, 2);
        assert_eq!(h.insert(e(&[0, 1]), 0), Err(Error::ZeroWeight));
        assert_eq!(h.remove(EdgeHandle(4)), Err(Error::UnknownHandle(EdgeHandle(4))));
    }
}
