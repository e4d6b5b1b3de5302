use dshp::Hyperedge;
use dshp_harness::{
    assign_weights, csv_string, driver_live_sets, naive_live_sets, run_stream, summarize, Algo, Mode, ReportPoint,
    RunConfig, TemporalEvent, WeightMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_stream(seed: u64, len: usize, n: u32, horizon: i64) -> Vec<TemporalEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events: Vec<TemporalEvent> = (0..len)
        .map(|_| {
            let k = rng.random_range(1..=3usize);
            let mut pool: Vec<u32> = (0..n).collect();
            let vs: Vec<u32> = (0..k).map(|_| pool.swap_remove(rng.random_range(0..pool.len()))).collect();
            TemporalEvent {
                timestamp: rng.random_range(0..horizon),
                edge: Hyperedge::new(vs).unwrap(),
                weight: rng.random_range(1..=5),
            }
        })
        .collect();
    events.sort_by_key(|e| e.timestamp);
    events
}

fn point(est: f64, exact: f64) -> ReportPoint {
    ReportPoint {
        report_time: 0,
        density_estimate: Some(est),
        exact_density: Some(exact),
        subset: vec![],
        updates: 0,
        total_update_us: None,
        max_update_us: None,
        live_edges: 0,
        oracle_skipped: false,
    }
}

#[test]
fn empty_stream_has_no_reports() {
    let (points, _) = run_stream(&[], &RunConfig::default()).unwrap();
    assert!(points.is_empty());
}

#[test]
fn small_window_matches_naive_replay() {
    let events = random_stream(1, 10, 6, 10);
    let config = RunConfig { mode: Mode::Window(3), report_interval: 1, ..Default::default() };
    assert_eq!(driver_live_sets(&events, &config).unwrap(), naive_live_sets(&events, &config));
}

#[test]
fn replay_matches_across_seeds_and_modes() {
    for seed in 0..20 {
        let events = random_stream(seed, 300, 8, 60);
        for mode in [Mode::InsertOnly, Mode::Window(1), Mode::Window(7)] {
            for dedupe in [false, true] {
                let config = RunConfig { mode, report_interval: 4, dedupe, ..Default::default() };
                assert_eq!(
                    driver_live_sets(&events, &config).unwrap(),
                    naive_live_sets(&events, &config),
                    "seed {seed} mode {mode:?} dedupe {dedupe}"
                );
            }
        }
    }
}

#[test]
fn exact_and_greedy_reports() {
    let events = random_stream(5, 60, 9, 20);
    let exact = RunConfig { algo: Algo::Exact, report_interval: 5, timing: false, ..Default::default() };
    let (points, shape) = run_stream(&events, &exact).unwrap();
    assert_eq!(shape.n, 9);
    assert!(points.iter().all(|p| p.relative_error_pct() == Some(0.0) || p.exact_density == Some(0.0)));
    let greedy = RunConfig { algo: Algo::Greedy, ..exact.clone() };
    let (points, _) = run_stream(&events, &greedy).unwrap();
    for p in &points {
        let (est, ex) = (p.density_estimate.unwrap(), p.exact_density.unwrap());
        assert!(est <= ex + 1e-12 && est * 3.0 >= ex - 1e-12, "{est} vs {ex}");
    }
}

#[test]
fn csv_is_deterministic_without_timing() {
    let events = random_stream(9, 200, 10, 50);
    for algo in [Algo::Exact, Algo::Greedy] {
        let config = RunConfig { algo, mode: Mode::Window(10), report_interval: 5, timing: false, ..Default::default() };
        let a = csv_string(&run_stream(&events, &config).unwrap().0).unwrap();
        let b = csv_string(&run_stream(&events, &config).unwrap().0).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(
            "report_time,density_estimate,exact_density,relative_error_pct,subset_size,updates,avg_update_us,max_update_us\n"
        ));
        assert!(a.lines().skip(1).all(|l| l.ends_with(",,")));
    }
}

#[test]
fn oracle_marker_beyond_support_limit() {
    let events: Vec<TemporalEvent> = (0..30u32)
        .map(|k| TemporalEvent { timestamp: 0, edge: Hyperedge::new(vec![k, k + 1]).unwrap(), weight: 1 })
        .collect();
    let config = RunConfig { algo: Algo::Exact, ..Default::default() };
    let (points, _) = run_stream(&events, &config).unwrap();
    assert_eq!(points.len(), 1);
    assert!(points[0].oracle_skipped);
    assert_eq!(points[0].density_estimate, None);
    assert_eq!(points[0].relative_error_pct(), None);
}

#[test]
fn config_errors() {
    let events = random_stream(1, 5, 4, 5);
    for bad in [
        RunConfig { report_interval: 0, ..Default::default() },
        RunConfig { mode: Mode::Window(0), ..Default::default() },
        RunConfig { epsilon: 1.5, ..Default::default() },
    ] {
        let err = run_stream(&events, &bad).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}

#[test]
fn weight_modes() {
    let events = random_stream(2, 100_000, 5, 10);
    let unit = assign_weights(events.clone(), WeightMode::Unit).unwrap();
    assert!(unit.iter().all(|e| e.weight == 1));
    let ones = assign_weights(events.clone(), WeightMode::Uniform { lo: 1, hi: 1, seed: 3 }).unwrap();
    assert!(ones.iter().all(|e| e.weight == 1));
    let w = assign_weights(events.clone(), WeightMode::Uniform { lo: 1, hi: 100, seed: 3 }).unwrap();
    let mean = w.iter().map(|e| e.weight as f64).sum::<f64>() / w.len() as f64;
    assert!((mean - 50.5).abs() < 0.3, "{mean}");
    assert!(w.iter().all(|e| (1..=100).contains(&e.weight)));
    let again = assign_weights(events.clone(), WeightMode::Uniform { lo: 1, hi: 100, seed: 3 }).unwrap();
    assert_eq!(w, again);
    assert!(assign_weights(events, WeightMode::Uniform { lo: 5, hi: 2, seed: 0 }).is_err());
    assert_eq!("uniform:1:100:7".parse::<WeightMode>().unwrap(), WeightMode::Uniform { lo: 1, hi: 100, seed: 7 });
    assert!("uniform:1".parse::<WeightMode>().is_err());
}

#[test]
fn summary_arithmetic() {
    let s = summarize(&[point(2.0, 2.0)]).unwrap();
    assert_eq!(s.avg_relative_error_pct, Some(0.0));
    let s = summarize(&[point(1.1, 1.0), point(0.7, 1.0)]).unwrap();
    assert!((s.avg_relative_error_pct.unwrap() - 20.0).abs() < 1e-9);
    assert!((s.max_relative_error_pct.unwrap() - 30.0).abs() < 1e-9);
    let mut none = point(1.0, 1.0);
    none.exact_density = None;
    let s = summarize(&[none]).unwrap();
    assert_eq!(s.avg_relative_error_pct, None);
    assert_eq!(s.max_relative_error_pct, None);
    assert!(summarize(&[]).is_err());
}

#[test]
fn relative_error_by_hand() {
    assert!((point(3.0, 4.0).relative_error_pct().unwrap() - 25.0).abs() < 1e-12);
    assert!((point(5.0, 4.0).relative_error_pct().unwrap() - 25.0).abs() < 1e-12);
    assert_eq!(point(1.0, 0.0).relative_error_pct(), None);
}

#[test]
fn average_update_time_is_total_over_count() {
    let events = random_stream(4, 150, 8, 30);
    let config = RunConfig { algo: Algo::Greedy, mode: Mode::Window(5), report_interval: 3, ..Default::default() };
    let (points, _) = run_stream(&events, &config).unwrap();
    let s = summarize(&points).unwrap();
    let total: f64 = points.iter().map(|p| p.total_update_us.unwrap()).sum();
    let count: u64 = points.iter().map(|p| p.updates).sum();
    assert_eq!(s.total_updates, count);
    assert!((s.avg_update_us.unwrap() - total / count as f64).abs() < 1e-9);
    // Every arrival and every expiry is one update.
    assert!(count >= events.len() as u64);
}

#[test]
fn udshp_reports_stay_within_approximation() {
    // Reduced duplication keeps this quick; the default constant is exercised
    // by the acceptance suite.
    let events = random_stream(11, 60, 7, 30);
    let events = assign_weights(events, WeightMode::Unit).unwrap();
    let config = RunConfig {
        algo: Algo::Udshp,
        epsilon: 0.5,
        report_interval: 3,
        mode: Mode::Window(9),
        timing: false,
        dup_constant: Some(4.0),
        ..Default::default()
    };
    let (points, _) = run_stream(&events, &config).unwrap();
    for p in &points {
        if let (Some(est), Some(ex)) = (p.density_estimate, p.exact_density) {
            assert!(est <= ex + 1e-9, "estimate {est} above exact {ex}");
        }
    }
}

#[test]
#[ignore = "hours at the default duplication constant"]
fn udshp_insert_only_500_events() {
    let events = assign_weights(random_stream(3, 500, 12, 100), WeightMode::Unit).unwrap();
    let config = RunConfig { algo: Algo::Udshp, epsilon: 0.3, report_interval: 10, ..Default::default() };
    let (points, _) = run_stream(&events, &config).unwrap();
    let bound = 100.0 * (1.0 - 1.0 / 1.3);
    for p in &points {
        assert!(p.relative_error_pct().unwrap() <= bound + 1e-9);
    }
}
