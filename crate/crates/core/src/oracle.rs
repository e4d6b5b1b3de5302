//! Ground truth and baselines: exhaustive exact densest subset and greedy
//! peeling. Everything here runs in exact integer arithmetic.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{VertexId, WeightedHypergraph};
use crate::scalar::ExactDensity;

/// Largest support the exhaustive oracle will enumerate.
pub const ORACLE_SUPPORT_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub best_set: Vec<VertexId>,
    pub best_density: ExactDensity,
}

/// Edges of `h` as bitmasks over the index positions of `support`.
fn edge_masks(h: &WeightedHypergraph, support: &[VertexId]) -> Vec<(u32, u64)> {
    let mut index = vec![u32::MAX; h.n()];
    for (i, &v) in support.iter().enumerate() {
        index[v as usize] = i as u32;
    }
    h.iter()
        .map(|(_, e, w)| {
            let mask = e.vertices().iter().fold(0u32, |m, &v| m | 1 << index[v as usize]);
            (mask, w)
        })
        .collect()
}

fn mask_to_set(mask: u32, support: &[VertexId]) -> Vec<VertexId> {
    support.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect()
}

/// Compares (weight_a / size_a) with (weight_b / size_b) exactly.
fn cmp_density(wa: u64, sa: u64, wb: u64, sb: u64) -> Ordering {
    (wa as u128 * sb as u128).cmp(&(wb as u128 * sa as u128))
}

/// Lexicographic comparison of the sorted vertex lists encoded by two masks.
/// Support indices are increasing in vertex id, so walking bits from the
/// lowest one reproduces the sorted lists.
fn cmp_lex(a: u32, b: u32) -> Ordering {
    let (mut a, mut b) = (a, b);
    loop {
        match (a == 0, b == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ia, ib) = (a.trailing_zeros(), b.trailing_zeros());
        if ia != ib {
            return ia.cmp(&ib);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

struct Best {
    mask: u32,
    weight: u64,
    size: u64,
}

impl Best {
    fn offer(&mut self, mask: u32, weight: u64) {
        let size = mask.count_ones() as u64;
        let better = match cmp_density(weight, size, self.weight, self.size) {
            Ordering::Greater => true,
            Ordering::Equal => cmp_lex(mask, self.mask) == Ordering::Less,
            Ordering::Less => false,
        };
        if better {
            *self = Best { mask, weight, size };
        }
    }
}

fn prepare(h: &WeightedHypergraph) -> Result<Vec<VertexId>> {
    let support = h.support();
    if support.len() > ORACLE_SUPPORT_LIMIT {
        return Err(Error::SupportTooLarge { support: support.len(), limit: ORACLE_SUPPORT_LIMIT });
    }
    Ok(support)
}

fn finish(best: Best, support: &[VertexId]) -> OracleResult {
    OracleResult {
        best_set: mask_to_set(best.mask, support),
        best_density: ExactDensity::new(best.weight, best.size.max(1)),
    }
}

/// Exact densest subset by enumerating every nonempty subset of the support.
/// Ties go to the lexicographically smallest vertex list. On the empty graph
/// the result is the empty set with density 0.
///
/// Induced weights for all subsets come from a subset-sum transform over the
/// edge masks.
pub fn exact_densest_bruteforce(h: &WeightedHypergraph) -> Result<OracleResult> {
    let support = prepare(h)?;
    let k = support.len();
    let mut best = Best { mask: 0, weight: 0, size: 1 };
    if k == 0 {
        return Ok(finish(best, &support));
    }
    let mut induced = vec![0u64; 1usize << k];
    for (mask, w) in edge_masks(h, &support) {
        induced[mask as usize] += w;
    }
    for bit in 0..k {
        for s in 0..induced.len() {
            if s >> bit & 1 == 1 {
                induced[s] += induced[s ^ (1 << bit)];
            }
        }
    }
    best.mask = (1u32 << k) - 1;
    best.weight = induced[best.mask as usize];
    best.size = k as u64;
    for (s, &w) in induced.iter().enumerate().skip(1) {
        best.offer(s as u32, w);
    }
    Ok(finish(best, &support))
}

/// Same contract as [`exact_densest_bruteforce`], computed along a reflected
/// Gray code: one vertex enters or leaves per step and the induced weight is
/// patched from that vertex's incident edges.
pub fn exact_densest_gray(h: &WeightedHypergraph) -> Result<OracleResult> {
    let support = prepare(h)?;
    let k = support.len();
    let mut best = Best { mask: 0, weight: 0, size: 1 };
    if k == 0 {
        return Ok(finish(best, &support));
    }
    let masks = edge_masks(h, &support);
    let mut incident: Vec<Vec<(u32, u64)>> = vec![Vec::new(); k];
    for &(m, w) in &masks {
        for (i, list) in incident.iter_mut().enumerate() {
            if m >> i & 1 == 1 {
                list.push((m, w));
            }
        }
    }
    let full = (1u32 << k) - 1;
    best.mask = full;
    best.weight = masks.iter().map(|(_, w)| w).sum();
    best.size = k as u64;

    let mut current = 0u32;
    let mut weight = 0u64;
    for step in 1u64..(1u64 << k) {
        let bit = step.trailing_zeros() as usize;
        let flag = 1u32 << bit;
        if current & flag == 0 {
            current |= flag;
            weight += incident[bit].iter().filter(|(m, _)| m & !current == 0).map(|(_, w)| w).sum::<u64>();
        } else {
            weight -= incident[bit].iter().filter(|(m, _)| m & !current == 0).map(|(_, w)| w).sum::<u64>();
            current &= !flag;
        }
        best.offer(current, weight);
    }
    Ok(finish(best, &support))
}

/// Greedy peeling: repeatedly delete a vertex of minimum weighted degree
/// (ties to the smallest id) and keep the densest intermediate set. No
/// approximation guarantee is claimed beyond rank 2.
pub fn greedy_peel(h: &WeightedHypergraph) -> Result<OracleResult> {
    if h.is_empty() {
        return Err(Error::EmptyHypergraph);
    }
    let n = h.n();
    let edges: Vec<(&[VertexId], u64)> = h.iter().map(|(_, e, w)| (e.vertices(), w)).collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut degree = vec![0u64; n];
    for (i, (vs, w)) in edges.iter().enumerate() {
        for &v in *vs {
            incident[v as usize].push(i);
            degree[v as usize] += w;
        }
    }
    let support = h.support();
    let mut alive_vertex = vec![false; n];
    let mut queue: BTreeSet<(u64, VertexId)> = BTreeSet::new();
    for &v in &support {
        alive_vertex[v as usize] = true;
        queue.insert((degree[v as usize], v));
    }
    let mut alive_edge = vec![true; edges.len()];
    let mut weight: u64 = edges.iter().map(|(_, w)| w).sum();
    let mut size = support.len() as u64;

    let (mut best_w, mut best_s, mut best_removed) = (weight, size, 0usize);
    let mut order = Vec::with_capacity(support.len());
    while let Some((_, v)) = queue.pop_first() {
        alive_vertex[v as usize] = false;
        order.push(v);
        for &ei in &incident[v as usize] {
            if !alive_edge[ei] {
                continue;
            }
            alive_edge[ei] = false;
            let (vs, w) = edges[ei];
            weight -= w;
            for &u in vs {
                if u != v && alive_vertex[u as usize] {
                    queue.remove(&(degree[u as usize], u));
                    degree[u as usize] -= w;
                    queue.insert((degree[u as usize], u));
                }
            }
        }
        size -= 1;
        if size > 0 && cmp_density(weight, size, best_w, best_s) == Ordering::Greater {
            (best_w, best_s, best_removed) = (weight, size, order.len());
        }
    }
    let removed: BTreeSet<VertexId> = order[..best_removed].iter().copied().collect();
    let best_set = support.into_iter().filter(|v| !removed.contains(v)).collect();
    Ok(OracleResult { best_set, best_density: ExactDensity::new(best_w, best_s) })
}
