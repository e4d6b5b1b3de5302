//! Unweighted wrapper: parallel orientation copies for doubling load guesses.
//!
//! Copy `i` (1-based) runs with `D~ = 2^(i-1)`. The active copy is the one
//! whose maximum load sits in `[D~, 2 D~]`; every query goes to it. Copies
//! above the active index receive every edge. Copies at or below it only take
//! an edge while its least-loaded vertex stays under `2 D~`; the rest wait in
//! a per-copy FIFO pending list and are swapped in as deletions free room.
//!
//! Each logical edge is stored `dup` times so that the slack of the copies
//! that matter is at least one.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use log::debug;

use crate::error::{Error, Result};
use crate::hop::{Hop, HopConfig, SubsetMode};
use crate::model::{EdgeHandle, Hyperedge, VertexId};
use crate::scalar::{log2_clamped, ExactDensity, Scalar};

pub const DEFAULT_DUP_CONSTANT: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UdshpConfig<F> {
    pub n: usize,
    /// Upper bound on live logical edges at any time.
    pub m_bound: u64,
    pub rank: usize,
    pub epsilon: F,
    /// Lower bound on the maximum multiplicity of the input, at least 1.
    pub w_star: F,
    pub dup_constant: F,
    pub subset_mode: SubsetMode,
}

impl<F: Scalar> UdshpConfig<F> {
    pub fn new(n: usize, m_bound: u64, rank: usize, epsilon: F) -> Self {
        Self {
            n,
            m_bound,
            rank,
            epsilon,
            w_star: F::one(),
            dup_constant: F::of(DEFAULT_DUP_CONSTANT),
            subset_mode: SubsetMode::Theory,
        }
    }

    pub fn with_w_star(mut self, w_star: F) -> Self {
        self.w_star = w_star;
        self
    }

    pub fn with_dup_constant(mut self, c: F) -> Self {
        self.dup_constant = c;
        self
    }

    pub fn with_subset_mode(mut self, mode: SubsetMode) -> Self {
        self.subset_mode = mode;
        self
    }

    /// `max(ceil(C r eps^-2 log n / w*), 1)`.
    pub fn dup(&self) -> u64 {
        let raw = self.dup_constant * F::of(self.rank as f64) * log2_clamped::<F>(self.n as u64)
            / (self.epsilon * self.epsilon * self.w_star);
        raw.ceil().to_u64().unwrap_or(u64::MAX).max(1)
    }

    /// `ceil(log2(m_bound * dup))`, at least 1.
    pub fn copies(&self) -> usize {
        let total = self.m_bound.saturating_mul(self.dup()).max(2);
        (64 - (total - 1).leading_zeros()) as usize
    }

    fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::Config("rank must be positive".into()));
        }
        if self.m_bound == 0 {
            return Err(Error::Config("edge bound must be positive".into()));
        }
        if !(self.w_star >= F::one()) || !(self.dup_constant > F::zero()) {
            return Err(Error::Config(format!(
                "w* = {} and duplication constant {} must be >= 1 and > 0",
                self.w_star, self.dup_constant
            )));
        }
        if !(self.epsilon > F::zero() && self.epsilon < F::one()) {
            return Err(Error::Config(format!("epsilon {} must lie in (0, 1)", self.epsilon)));
        }
        Ok(())
    }
}

/// FIFO of edges waiting to enter one copy, indexed by vertex.
#[derive(Debug, Clone, Default)]
struct Pending {
    seq: u64,
    order: BTreeMap<u64, EdgeHandle>,
    seq_of: HashMap<EdgeHandle, u64>,
    by_vertex: HashMap<VertexId, BTreeSet<u64>>,
}

impl Pending {
    fn push(&mut self, handle: EdgeHandle, edge: &Hyperedge) {
        let s = self.seq;
        self.seq += 1;
        self.order.insert(s, handle);
        self.seq_of.insert(handle, s);
        for &v in edge.vertices() {
            self.by_vertex.entry(v).or_default().insert(s);
        }
    }

    fn remove(&mut self, handle: EdgeHandle, edge: &Hyperedge) -> bool {
        let Some(s) = self.seq_of.remove(&handle) else { return false };
        self.order.remove(&s);
        for &v in edge.vertices() {
            if let Some(set) = self.by_vertex.get_mut(&v) {
                set.remove(&s);
                if set.is_empty() {
                    self.by_vertex.remove(&v);
                }
            }
        }
        true
    }

    fn first_containing(&self, v: VertexId) -> Option<EdgeHandle> {
        let s = self.by_vertex.get(&v)?.first()?;
        Some(self.order[s])
    }

    fn pop_front(&self) -> Option<EdgeHandle> {
        self.order.first_key_value().map(|(_, &h)| h)
    }

    fn len(&self) -> usize {
        self.order.len()
    }

    fn contains(&self, handle: EdgeHandle) -> bool {
        self.seq_of.contains_key(&handle)
    }
}

#[derive(Debug, Clone)]
pub struct Udshp<F> {
    config: UdshpConfig<F>,
    dup: u64,
    copies: Vec<Hop<F>>,
    pending: Vec<Pending>,
    /// 0 means no copy is active yet.
    active: usize,
    edges: HashMap<EdgeHandle, Hyperedge>,
    next_handle: u64,
    forced: u64,
}

impl<F: Scalar> Udshp<F> {
    pub fn new(config: UdshpConfig<F>) -> Result<Self> {
        config.validate()?;
        let dup = config.dup();
        let k = config.copies();
        let copies = (1..=k)
            .map(|i| Hop::new(HopConfig::new(config.n, F::of(2f64.powi(i as i32 - 1)), config.epsilon)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config,
            dup,
            copies,
            pending: vec![Pending::default(); k],
            active: 0,
            edges: HashMap::new(),
            next_handle: 0,
            forced: 0,
        })
    }

    pub fn config(&self) -> &UdshpConfig<F> {
        &self.config
    }

    pub fn dup(&self) -> u64 {
        self.dup
    }

    /// 1-based index of the active copy, 0 before the first edge.
    pub fn active(&self) -> usize {
        self.active
    }

    pub fn copies(&self) -> &[Hop<F>] {
        &self.copies
    }

    pub fn pending_len(&self, copy: usize) -> usize {
        self.pending[copy - 1].len()
    }

    /// Pending edges inserted unconditionally when their copy became active.
    pub fn forced_inserts(&self) -> u64 {
        self.forced
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge(&self, handle: EdgeHandle) -> Option<&Hyperedge> {
        self.edges.get(&handle)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeHandle, &Hyperedge)> + '_ {
        self.edges.iter().map(|(h, e)| (*h, e))
    }

    fn d_tilde_bound(i: usize) -> u64 {
        1u64 << i.min(63)
    }

    fn load(&self, i: usize) -> u64 {
        self.copies[i - 1].max_load()
    }

    fn internal(&self, handle: EdgeHandle) -> impl Iterator<Item = EdgeHandle> {
        let base = handle.0 * self.dup;
        (base..base + self.dup).map(EdgeHandle)
    }

    fn logical(&self, internal: EdgeHandle) -> EdgeHandle {
        EdgeHandle(internal.0 / self.dup)
    }

    pub fn insert(&mut self, edge: Hyperedge) -> Result<EdgeHandle> {
        edge.validate(self.config.n, self.config.rank)?;
        if self.edges.len() as u64 >= self.config.m_bound {
            return Err(Error::CapacityExceeded { capacity: self.config.m_bound });
        }
        let handle = EdgeHandle(self.next_handle);
        if handle.0.checked_mul(self.dup).and_then(|b| b.checked_add(self.dup)).is_none() {
            return Err(Error::CapacityExceeded { capacity: self.next_handle });
        }
        self.next_handle += 1;
        for x in self.internal(handle).collect::<Vec<_>>() {
            self.insert_internal(x, &edge)?;
        }
        self.edges.insert(handle, edge);
        Ok(handle)
    }

    fn insert_internal(&mut self, x: EdgeHandle, edge: &Hyperedge) -> Result<()> {
        let k = self.copies.len();
        for j in self.active + 1..=k {
            self.copies[j - 1].insert(x, edge)?;
        }
        let mut lower = self.active;
        if self.active >= 1 {
            let a = self.active;
            if self.load(a) < Self::d_tilde_bound(a) || a == k {
                self.copies[a - 1].insert(x, edge)?;
                lower = a - 1;
            } else {
                self.active += 1;
            }
        }
        for j in 1..=lower {
            if self.copies[j - 1].min_load(edge.vertices()) < Self::d_tilde_bound(j) {
                self.copies[j - 1].insert(x, edge)?;
            } else {
                self.pending[j - 1].push(x, edge);
            }
        }
        self.settle()
    }

    pub fn delete(&mut self, handle: EdgeHandle) -> Result<()> {
        let edge = self.edges.get(&handle).ok_or(Error::UnknownHandle(handle))?.clone();
        for x in self.internal(handle).collect::<Vec<_>>() {
            self.delete_internal(x, &edge)?;
        }
        self.edges.remove(&handle);
        Ok(())
    }

    fn delete_internal(&mut self, x: EdgeHandle, edge: &Hyperedge) -> Result<()> {
        let k = self.copies.len();
        for j in self.active + 1..=k {
            self.copies[j - 1].delete(x)?;
        }
        let mut demoted = false;
        if self.active >= 1 {
            let a = self.active;
            if self.load(a) > Self::d_tilde_bound(a - 1) {
                self.copies[a - 1].delete(x)?;
            } else {
                self.copies[a - 1].delete(x)?;
                self.active -= 1;
                demoted = true;
            }
        }
        let lower = if demoted { self.active } else { self.active.saturating_sub(1) };
        for j in 1..=lower {
            self.delete_from_lower(j, x, edge)?;
        }
        if demoted && self.active >= 1 {
            self.flush(self.active)?;
        }
        self.settle()
    }

    /// Removes `x` from copy `j`, either from its pending list or from the
    /// orientation; in the latter case the first pending edge through the
    /// freed head takes its place.
    fn delete_from_lower(&mut self, j: usize, x: EdgeHandle, edge: &Hyperedge) -> Result<()> {
        if self.pending[j - 1].remove(x, edge) {
            return Ok(());
        }
        let head = self.copies[j - 1].head(x).ok_or(Error::UnknownHandle(x))?;
        self.copies[j - 1].delete(x)?;
        if let Some(p) = self.pending[j - 1].first_containing(head) {
            let pe = self.edges[&self.logical(p)].clone();
            self.pending[j - 1].remove(p, &pe);
            self.copies[j - 1].insert(p, &pe)?;
        }
        Ok(())
    }

    /// Moves every pending edge of copy `j` into its orientation.
    fn flush(&mut self, j: usize) -> Result<()> {
        while let Some(p) = self.pending[j - 1].pop_front() {
            let pe = self.edges[&self.logical(p)].clone();
            self.pending[j - 1].remove(p, &pe);
            self.copies[j - 1].insert(p, &pe)?;
            self.forced += 1;
        }
        Ok(())
    }

    /// Re-checks the active index after an update. A single logical update
    /// inserts `dup` internal edges, so the maximum load can cross more than
    /// one power of two.
    fn settle(&mut self) -> Result<()> {
        let k = self.copies.len();
        if self.active == 0 && !self.copies[0].is_empty() {
            self.active = 1;
            self.flush(1)?;
        }
        let mut promoted = false;
        while self.active >= 1 && self.active < k && self.load(self.active) > Self::d_tilde_bound(self.active) {
            self.active += 1;
            promoted = true;
        }
        if !promoted {
            while self.active >= 1 && self.load(self.active) < Self::d_tilde_bound(self.active - 1) {
                self.active -= 1;
                debug!("active copy demoted to {}", self.active);
                if self.active >= 1 {
                    self.flush(self.active)?;
                }
            }
        }
        Ok(())
    }

    /// Active copy's density estimate divided by the duplication factor.
    pub fn max_density(&self) -> F {
        if self.active == 0 {
            return F::zero();
        }
        self.copies[self.active - 1].query_density() / F::of_u64(self.dup)
    }

    pub fn densest_subset(&self) -> Result<Vec<VertexId>> {
        self.densest_subset_with(self.config.subset_mode)
    }

    pub fn densest_subset_with(&self, mode: SubsetMode) -> Result<Vec<VertexId>> {
        if self.active == 0 || self.is_empty() {
            return Err(Error::EmptyHypergraph);
        }
        self.copies[self.active - 1].query_subset(mode)
    }

    /// Exact density of `subset` in the logical (non-duplicated) graph.
    pub fn density_of(&self, subset: &[VertexId]) -> Result<ExactDensity> {
        if subset.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let mut inside = vec![false; self.config.n];
        for &v in subset {
            *inside.get_mut(v as usize).ok_or(Error::VertexOutOfRange { vertex: v, n: self.config.n })? = true;
        }
        let size = inside.iter().filter(|&&b| b).count() as u64;
        let weight = self.edges.values().filter(|e| e.inside(&inside)).count() as u64;
        Ok(ExactDensity::new(weight, size))
    }

    /// Checks the bookkeeping invariants: copies at or above the active index
    /// hold every live internal edge and nothing is pending there; lower
    /// copies hold each live internal edge exactly once, either inserted or
    /// pending.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let live: BTreeSet<EdgeHandle> = self.edges.keys().flat_map(|&h| self.internal(h)).collect();
        for (idx, copy) in self.copies.iter().enumerate() {
            let j = idx + 1;
            let stored: BTreeSet<EdgeHandle> = copy.handles().collect();
            let pending = &self.pending[idx];
            if j >= self.active.max(1) && pending.len() > 0 {
                return Err(format!("copy {j} has {} pending edges at or above active {}", pending.len(), self.active));
            }
            if stored.iter().any(|h| pending.contains(*h)) {
                return Err(format!("copy {j} holds an edge that is also pending"));
            }
            if stored.len() + pending.len() != live.len()
                || !stored.iter().chain(pending.seq_of.keys()).all(|h| live.contains(h))
            {
                return Err(format!(
                    "copy {j}: {} stored + {} pending != {} live",
                    stored.len(),
                    pending.len(),
                    live.len()
                ));
            }
        }
        Ok(())
    }

    /// Whether the active copy's load lies in `[D~, 2 D~]`.
    pub fn active_in_range(&self) -> bool {
        if self.active == 0 {
            return self.is_empty();
        }
        let d = self.load(self.active);
        d >= Self::d_tilde_bound(self.active - 1) && d <= Self::d_tilde_bound(self.active)
    }
}
