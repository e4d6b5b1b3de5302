#![allow(dead_code)]

use dshp::{Hyperedge, VertexId, WeightedHypergraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn edge(v: &[VertexId]) -> Hyperedge {
    Hyperedge::new(v.to_vec()).unwrap()
}

/// Uniform random edge of size `1..=r` over `[0, n)`.
pub fn random_edge(rng: &mut impl Rng, n: u32, r: usize) -> Hyperedge {
    let k = rng.random_range(1..=r.min(n as usize));
    let mut pool: Vec<VertexId> = (0..n).collect();
    let vs = (0..k).map(|_| pool.swap_remove(rng.random_range(0..pool.len()))).collect();
    Hyperedge::new(vs).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strategy for small weighted hypergraphs.
pub fn small_graph(max_n: u32, max_r: usize, max_m: usize, max_w: u64) -> impl Strategy<Value = WeightedHypergraph> {
    (2..=max_n, 1..=max_r).prop_flat_map(move |(n, r)| {
        let edge = proptest::collection::btree_set(0..n, 1..=r.min(n as usize));
        proptest::collection::vec((edge, 1..=max_w), 0..=max_m).prop_map(move |edges| {
            let mut h = WeightedHypergraph::new(n as usize, r);
            for (vs, w) in edges {
                h.insert(Hyperedge::new(vs.into_iter().collect()).unwrap(), w).unwrap();
            }
            h
        })
    })
}

/// Naive density by recomputing the induced weight edge by edge.
pub fn naive_density(h: &WeightedHypergraph, set: &[VertexId]) -> (u64, u64) {
    let w = h.iter().filter(|(_, e, _)| e.vertices().iter().all(|v| set.contains(v))).map(|(_, _, w)| w).sum();
    (w, set.len() as u64)
}
