//! Weighted densest subhypergraph through sampling.
//!
//! For each density guess `rho_i = (w_max / r)(1 + eps)^i` the weighted graph
//! is rounded to powers of `1 + eps` and thinned: an edge of weight class `j`
//! becomes `Bin(floor((1 + eps)^j), q_i)` unweighted copies, with
//! `q_i = min(c eps^-2 log n / rho_i, 1)`. Each guess feeds its own
//! [`Udshp`]. The answer comes from the largest guess whose sampled graph is
//! still dense, i.e. whose estimate reaches `(1 - eps) c eps^-2 log n`.

use std::collections::HashMap;

use log::warn;

use crate::error::{Error, Result};
use crate::hop::SubsetMode;
use crate::model::{EdgeHandle, Hyperedge, VertexId};
use crate::sampler::SampleTable;
use crate::scalar::{log2_clamped, Scalar};
use crate::udshp::{Udshp, UdshpConfig, DEFAULT_DUP_CONSTANT};

pub const DEFAULT_SAMPLING_CONSTANT: f64 = 8.0;

/// Largest `eps <= delta / 5` with `(1 - 2 eps) / (1 + eps)^3 >= 1 / (1 + delta)`,
/// by bisection. Falls back to `delta / 8` if even tiny values fail.
pub fn epsilon_for_delta(delta: f64) -> f64 {
    let ok = |e: f64| (1.0 - 2.0 * e) / (1.0 + e).powi(3) >= 1.0 / (1.0 + delta);
    let hi = delta / 5.0;
    if ok(hi) {
        return hi;
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo > 0.0 && ok(lo) {
        lo
    } else {
        delta / 8.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WdshpConfig<F> {
    pub n: usize,
    /// Upper bound on live weighted edges at any time.
    pub m_bound: u64,
    pub rank: usize,
    pub delta: F,
    pub w_max: u64,
    pub c: F,
    pub seed: u64,
    pub dup_constant: F,
    pub subset_mode: SubsetMode,
}

impl<F: Scalar> WdshpConfig<F> {
    pub fn new(n: usize, m_bound: u64, rank: usize, delta: F, w_max: u64, seed: u64) -> Self {
        Self {
            n,
            m_bound,
            rank,
            delta,
            w_max,
            c: F::of(DEFAULT_SAMPLING_CONSTANT),
            seed,
            dup_constant: F::of(DEFAULT_DUP_CONSTANT),
            subset_mode: SubsetMode::Theory,
        }
    }

    pub fn epsilon(&self) -> F {
        F::of(epsilon_for_delta(self.delta.to_f64_lossy()))
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > F::zero() && self.delta < F::one()) {
            return Err(Error::Config(format!("delta {} must lie in (0, 1)", self.delta)));
        }
        if self.w_max == 0 {
            return Err(Error::Config("w_max must be positive".into()));
        }
        if !(self.c > F::zero()) {
            return Err(Error::Config(format!("sampling constant {} must be positive", self.c)));
        }
        if self.rank == 0 || self.m_bound == 0 || self.n == 0 {
            return Err(Error::Config("n, rank and edge bound must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Record {
    edge: Hyperedge,
    weight: u64,
    /// Per guess, the unweighted copies inserted into that guess's structure.
    copies: Vec<Vec<EdgeHandle>>,
}

#[derive(Debug, Clone)]
pub struct Wdshp<F> {
    config: WdshpConfig<F>,
    epsilon: F,
    guesses: Vec<F>,
    w_star: Vec<F>,
    structures: Vec<Option<Udshp<F>>>,
    table: SampleTable,
    records: HashMap<EdgeHandle, Record>,
    next_handle: u64,
}

impl<F: Scalar> Wdshp<F> {
    pub fn new(config: WdshpConfig<F>) -> Result<Self> {
        config.validate()?;
        let epsilon = config.epsilon();
        let base = F::one() + epsilon;
        let r = F::of(config.rank as f64);
        let w_max = F::of_u64(config.w_max);

        let top = (F::of_u64(config.m_bound) * r).ln() / base.ln();
        let count = top.max(F::zero()).ceil().to_usize().unwrap_or(0) + 1;
        let guesses: Vec<F> = (0..count).map(|i| w_max / r * base.powi(i as i32)).collect();
        let sparse = config.c * log2_clamped::<F>(config.n as u64) / (epsilon * epsilon);
        let probs: Vec<F> = guesses.iter().map(|&g| (sparse / g).min(F::one())).collect();
        let w_star = probs.iter().map(|&q| (w_max * q / F::of(2.0)).max(F::one())).collect();

        let classes = weight_class(config.w_max, epsilon) + 1;
        let trials: Vec<u64> = (0..classes).map(|j| class_size(j, epsilon)).collect();
        let table = SampleTable::new(config.seed, probs.iter().map(|q| q.to_f64_lossy()).collect(), trials)?;
        Ok(Self {
            structures: vec![None; guesses.len()],
            config,
            epsilon,
            guesses,
            w_star,
            table,
            records: HashMap::new(),
            next_handle: 0,
        })
    }

    pub fn config(&self) -> &WdshpConfig<F> {
        &self.config
    }

    pub fn epsilon(&self) -> F {
        self.epsilon
    }

    pub fn guesses(&self) -> &[F] {
        &self.guesses
    }

    pub fn probabilities(&self) -> &[f64] {
        self.table.probs()
    }

    /// `(1 - eps) c eps^-2 log n`.
    pub fn threshold(&self) -> F {
        (F::one() - self.epsilon) * self.config.c * log2_clamped::<F>(self.config.n as u64)
            / (self.epsilon * self.epsilon)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The structure for guess `i`, if any edge has been sampled into it.
    pub fn structure(&self, i: usize) -> Option<&Udshp<F>> {
        self.structures.get(i).and_then(Option::as_ref)
    }

    /// Copies of `handle` held by each guess.
    pub fn sample_counts(&self, handle: EdgeHandle) -> Option<Vec<u64>> {
        self.records.get(&handle).map(|r| r.copies.iter().map(|c| c.len() as u64).collect())
    }

    /// One draw for guess `i` and weight class `j`.
    pub fn sample_count(&mut self, i: usize, j: usize) -> Result<u64> {
        self.table.sample(i, j)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeHandle, &Hyperedge, u64)> + '_ {
        self.records.iter().map(|(h, r)| (*h, &r.edge, r.weight))
    }

    fn structure_mut(&mut self, i: usize) -> Result<&mut Udshp<F>> {
        if self.structures[i].is_none() {
            let trials = *self.table.trials().last().expect("at least one weight class");
            let cfg = UdshpConfig::new(
                self.config.n,
                self.config.m_bound.saturating_mul(trials),
                self.config.rank,
                self.epsilon,
            )
            .with_w_star(self.w_star[i])
            .with_dup_constant(self.config.dup_constant)
            .with_subset_mode(self.config.subset_mode);
            self.structures[i] = Some(Udshp::new(cfg)?);
        }
        Ok(self.structures[i].as_mut().expect("just created"))
    }

    pub fn insert(&mut self, edge: Hyperedge, weight: u64) -> Result<EdgeHandle> {
        if weight == 0 {
            return Err(Error::ZeroWeight);
        }
        if weight > self.config.w_max {
            return Err(Error::WeightAboveMax { weight, w_max: self.config.w_max });
        }
        edge.validate(self.config.n, self.config.rank)?;
        if self.records.len() as u64 >= self.config.m_bound {
            return Err(Error::CapacityExceeded { capacity: self.config.m_bound });
        }
        let j = weight_class(weight, self.epsilon);
        let mut copies = Vec::with_capacity(self.guesses.len());
        for i in 0..self.guesses.len() {
            let s = self.table.sample(i, j)?;
            let mut handles = Vec::with_capacity(s as usize);
            if s > 0 {
                let u = self.structure_mut(i)?;
                for _ in 0..s {
                    handles.push(u.insert(edge.clone())?);
                }
            }
            copies.push(handles);
        }
        let handle = EdgeHandle(self.next_handle);
        self.next_handle += 1;
        self.records.insert(handle, Record { edge, weight, copies });
        Ok(handle)
    }

    pub fn delete(&mut self, handle: EdgeHandle) -> Result<()> {
        let record = self.records.remove(&handle).ok_or(Error::UnknownHandle(handle))?;
        for (i, handles) in record.copies.iter().enumerate() {
            for &h in handles {
                self.structures[i].as_mut().expect("structure holds sampled copies").delete(h)?;
            }
        }
        Ok(())
    }

    /// Density estimate of guess `i`'s sampled structure, 0 if it was never used.
    pub fn estimate(&self, i: usize) -> F {
        self.structure(i).map_or(F::zero(), Udshp::max_density)
    }

    fn qualifies(&self, i: usize) -> bool {
        self.estimate(i) >= self.threshold()
    }

    /// Largest guess whose estimate reaches the threshold, by binary search.
    /// Debug builds cross-check with a linear scan and prefer it on mismatch.
    pub fn i_star(&self) -> Option<usize> {
        let (mut lo, mut hi) = (0usize, self.guesses.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.qualifies(mid) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let found = lo.checked_sub(1).filter(|&i| self.qualifies(i));
        if cfg!(debug_assertions) {
            let linear = (0..self.guesses.len()).rev().find(|&i| self.qualifies(i));
            if linear != found {
                warn!("guess estimates not monotone: binary search {found:?}, linear scan {linear:?}");
                return linear;
            }
        }
        found
    }

    /// `(1 - 2 eps) / (1 + eps) * rho_{i*}`, or 0 when no guess qualifies.
    pub fn max_density(&self) -> F {
        match self.i_star() {
            Some(i) => (F::one() - F::of(2.0) * self.epsilon) / (F::one() + self.epsilon) * self.guesses[i],
            None => F::zero(),
        }
    }

    pub fn densest_subset(&self) -> Result<Vec<VertexId>> {
        if self.is_empty() {
            return Err(Error::EmptyHypergraph);
        }
        let i = self.i_star().ok_or(Error::NoQualifyingGuess)?;
        self.structures[i].as_ref().expect("qualifying guess has edges").densest_subset()
    }

    /// True when no structure holds any edge, orientation or pending entry.
    pub fn structurally_empty(&self) -> bool {
        self.records.is_empty()
            && self.structures.iter().flatten().all(|u| {
                u.is_empty()
                    && u.copies().iter().all(|c| c.is_empty())
                    && (1..=u.copies().len()).all(|j| u.pending_len(j) == 0)
            })
    }
}

/// Smallest `j` with `(1 + eps)^j >= w`.
pub fn weight_class<F: Scalar>(w: u64, epsilon: F) -> usize {
    let base = F::one() + epsilon;
    let target = F::of_u64(w);
    let mut j = (target.ln() / base.ln()).ceil().to_usize().unwrap_or(0);
    while j > 0 && base.powi(j as i32 - 1) >= target {
        j -= 1;
    }
    while base.powi(j as i32) < target {
        j += 1;
    }
    j
}

/// `floor((1 + eps)^j)`.
pub fn class_size<F: Scalar>(j: usize, epsilon: F) -> u64 {
    (F::one() + epsilon).powi(j as i32).floor().to_u64().unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_solver() {
        let e = epsilon_for_delta(0.5);
        assert!(e <= 0.1);
        assert!((1.0 - 2.0 * e) / (1.0 + e).powi(3) >= 1.0 / 1.5);
        assert!((1.0 - 2.0 * (e + 1e-6)) / (1.0 + e + 1e-6).powi(3) < 1.0 / 1.5);
        assert!((e - 0.0797).abs() < 1e-3, "{e}");
    }

    #[test]
    fn weight_classes_round_up() {
        let eps = 0.1f64;
        assert_eq!(weight_class(1, eps), 0);
        assert_eq!(class_size(0, eps), 1);
        for w in 1..=200u64 {
            let j = weight_class(w, eps);
            let size = class_size(j, eps);
            assert!(size >= w && (size as f64) <= 1.1 * w as f64 + 1e-9, "w={w} j={j} size={size}");
        }
    }

    #[test]
    fn guess_grid() {
        let w = Wdshp::new(WdshpConfig::<f64>::new(16, 50, 3, 0.5, 100, 1)).unwrap();
        let eps = w.epsilon();
        assert!((w.guesses()[0] - 100.0 / 3.0).abs() < 1e-9);
        let last = *w.guesses().last().unwrap();
        assert!(last >= 100.0 / 3.0 * 150.0 - 1e-6 && last < 100.0 / 3.0 * 150.0 * (1.0 + eps));
        assert!(w.probabilities().iter().all(|&q| q > 0.0 && q <= 1.0));
        assert!(w.probabilities().windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn rejects_bad_weights_and_handles() {
        let mut w = Wdshp::new(WdshpConfig::<f64>::new(4, 10, 2, 0.5, 10, 1)).unwrap();
        let e = Hyperedge::new(vec![0, 1]).unwrap();
        assert_eq!(w.insert(e.clone(), 11), Err(Error::WeightAboveMax { weight: 11, w_max: 10 }));
        assert_eq!(w.insert(e, 0), Err(Error::ZeroWeight));
        assert_eq!(w.delete(EdgeHandle(3)), Err(Error::UnknownHandle(EdgeHandle(3))));
        assert_eq!(w.max_density(), 0.0);
        assert_eq!(w.densest_subset(), Err(Error::EmptyHypergraph));
    }
}
