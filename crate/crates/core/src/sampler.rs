//! Seeded binomial draws indexed by (density guess, weight class).

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// `Bin(trials[j], probs[i])` for every pair `(i, j)`. Each pair draws from
/// its own ChaCha stream derived from one root seed, so the sequence seen by
/// one pair does not depend on how often the others were used.
#[derive(Debug, Clone)]
pub struct SampleTable {
    seed: u64,
    probs: Vec<f64>,
    trials: Vec<u64>,
    streams: HashMap<(usize, usize), (Binomial, ChaCha8Rng)>,
}

impl SampleTable {
    pub fn new(seed: u64, probs: Vec<f64>, trials: Vec<u64>) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!("sampling probability {p} outside [0, 1]")));
        }
        Ok(Self { seed, probs, trials, streams: HashMap::new() })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn trials(&self) -> &[u64] {
        &self.trials
    }

    /// One draw from `Bin(trials[j], probs[i])`.
    pub fn sample(&mut self, i: usize, j: usize) -> Result<u64> {
        if i >= self.probs.len() || j >= self.trials.len() {
            return Err(Error::SamplerIndex { i, j });
        }
        let (p, n, seed) = (self.probs[i], self.trials[j], self.seed);
        let (dist, rng) = self.streams.entry((i, j)).or_insert_with(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((i as u64) << 32) | j as u64);
            (Binomial::new(n, p).expect("probability checked on construction"), rng)
        });
        Ok(dist.sample(rng))
    }
}
