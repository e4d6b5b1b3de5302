mod common;

use common::{random_edge, rng};
use dshp::{class_size, weight_class, SampleTable, Wdshp, WdshpConfig};
use proptest::prelude::*;
use rand::Rng;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

fn cheap(n: usize, m: u64, w_max: u64, seed: u64) -> Wdshp<f64> {
    let mut cfg = WdshpConfig::new(n, m, 3, 0.5, w_max, seed);
    cfg.dup_constant = 0.05;
    Wdshp::new(cfg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Copies held by every guess match the recorded sample counts, and
    /// guesses that keep everything hold the full class size.
    #[test]
    fn copies_are_conserved(
        seed in any::<u64>(),
        seq in proptest::collection::vec((any::<bool>(), 1u64..=40, any::<u64>()), 1..25),
    ) {
        let mut w = cheap(8, 40, 40, seed);
        let mut r = rng(seed);
        let mut live = Vec::new();
        let eps = w.epsilon();
        for (ins, weight, k) in seq {
            if ins || live.is_empty() {
                let h = w.insert(random_edge(&mut r, 8, 3), weight).unwrap();
                let counts = w.sample_counts(h).unwrap();
                let full = class_size(weight_class(weight, eps), eps);
                for (i, &q) in w.probabilities().iter().enumerate() {
                    if q >= 1.0 {
                        prop_assert_eq!(counts[i], full);
                    }
                    prop_assert!(counts[i] <= full);
                }
                live.push(h);
            } else {
                let h = live.swap_remove((k as usize) % live.len());
                w.delete(h).unwrap();
            }
            for i in 0..w.guesses().len() {
                let held = w.structure(i).map_or(0, |u| u.len()) as u64;
                let recorded: u64 = live.iter().map(|&h| w.sample_counts(h).unwrap()[i]).sum();
                prop_assert_eq!(held, recorded);
                if let Some(u) = w.structure(i) {
                    prop_assert_eq!(u.check_invariants(), Ok(()));
                }
            }
        }
        for h in live {
            w.delete(h).unwrap();
        }
        prop_assert!(w.structurally_empty());
        prop_assert_eq!(w.max_density(), 0.0);
    }
}

#[test]
fn class_sizes_cover_weights() {
    let eps = dshp::epsilon_for_delta(0.5);
    for w in 1..=500u64 {
        let j = weight_class(w, eps);
        let s = class_size(j, eps);
        assert!((1.0 + eps).powi(j as i32) >= w as f64);
        assert!(s as f64 >= w as f64 - 1.0 && (s as f64) < (w as f64) * (1.0 + eps) + 1.0, "w {w} class {j} size {s}");
    }
}

#[test]
fn binomial_draws_pass_chi_square() {
    let mut t = SampleTable::new(2024, vec![0.25], vec![16]).unwrap();
    let n = 20_000;
    let mut counts = [0u64; 17];
    for _ in 0..n {
        counts[t.sample(0, 0).unwrap() as usize] += 1;
    }
    let dist = Binomial::new(0.25, 16).unwrap();
    // Pool the sparse tail so every expected count is at least 5.
    let mut stat = 0.0;
    let mut bins = 0;
    let (mut obs, mut exp) = (0.0, 0.0);
    for k in 0..=16u64 {
        obs += counts[k as usize] as f64;
        exp += dist.pmf(k) * n as f64;
        if exp >= 5.0 && (k == 16 || (k + 1..=16).map(|x| dist.pmf(x) * n as f64).sum::<f64>() >= 5.0) {
            stat += (obs - exp).powi(2) / exp;
            bins += 1;
            obs = 0.0;
            exp = 0.0;
        }
    }
    let p = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat);
    assert!(p > 0.001, "chi-square {stat} over {bins} bins, p = {p}");
}

#[test]
fn same_seed_same_samples() {
    let run = |seed| {
        let mut t = SampleTable::new(seed, vec![0.3, 0.7], vec![1, 9]).unwrap();
        (0..200).map(|k| t.sample(k % 2, k / 2 % 2).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(run(7), run(7));
    assert_ne!(run(7), run(8));
}

#[test]
fn full_probability_guesses_keep_every_copy() {
    let mut w = cheap(10, 30, 20, 1);
    let eps = w.epsilon();
    let mut r = rng(3);
    for _ in 0..10 {
        let wt = r.random_range(1..=20);
        let h = w.insert(random_edge(&mut r, 10, 3), wt).unwrap();
        let full = class_size(weight_class(wt, eps), eps);
        assert!(w.sample_counts(h).unwrap().iter().all(|&c| c == full));
    }
}
