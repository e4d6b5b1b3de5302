//! Stream driver: replays timestamped events against one estimator and
//! records a report at every interval boundary.

use std::collections::{HashMap, VecDeque};
use std::str::FromStr;
use std::time::Instant;

use dshp::{
    exact_densest_bruteforce, greedy_peel, ratio_to, EdgeHandle, Hyperedge, SubsetMode, Udshp64, UdshpConfig,
    VertexId, Wdshp64, WdshpConfig, WeightedHypergraph, ORACLE_SUPPORT_LIMIT,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::HarnessError;
use crate::load::TemporalEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    InsertOnly,
    /// Events stay live for this many timestamp units.
    Window(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Udshp,
    Wdshp,
    Exact,
    Greedy,
}

impl FromStr for Algo {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "udshp" => Ok(Algo::Udshp),
            "wdshp" => Ok(Algo::Wdshp),
            "exact" => Ok(Algo::Exact),
            "greedy" => Ok(Algo::Greedy),
            _ => Err(HarnessError::Config(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    Unit,
    Uniform { lo: u64, hi: u64, seed: u64 },
}

impl FromStr for WeightMode {
    type Err = HarnessError;

    /// `unit` or `uniform:LO:HI:SEED`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HarnessError::Config(format!("bad weight mode {s:?}; expected unit or uniform:LO:HI:SEED"));
        if s == "unit" {
            return Ok(WeightMode::Unit);
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["uniform", lo, hi, seed] => Ok(WeightMode::Uniform {
                lo: lo.parse().map_err(|_| bad())?,
                hi: hi.parse().map_err(|_| bad())?,
                seed: seed.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Overwrites event weights: all ones, or independent uniform integers in
/// `[lo, hi]` drawn from a seeded generator.
pub fn assign_weights(mut events: Vec<TemporalEvent>, mode: WeightMode) -> Result<Vec<TemporalEvent>, HarnessError> {
    match mode {
        WeightMode::Unit => events.iter_mut().for_each(|e| e.weight = 1),
        WeightMode::Uniform { lo, hi, seed } => {
            if lo == 0 || lo > hi {
                return Err(HarnessError::Config(format!("weight range [{lo}, {hi}] must satisfy 1 <= lo <= hi")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            events.iter_mut().for_each(|e| e.weight = rng.random_range(lo..=hi));
        }
    }
    Ok(events)
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub report_interval: i64,
    pub algo: Algo,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub dedupe: bool,
    pub timing: bool,
    /// Compute the exact density at report points when the support allows.
    pub oracle: bool,
    pub subset_mode: SubsetMode,
    pub rank: Option<usize>,
    /// Replaces the default duplication constant of the unweighted wrapper.
    pub dup_constant: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::InsertOnly,
            report_interval: 1,
            algo: Algo::Udshp,
            epsilon: 0.5,
            delta: 0.5,
            seed: 0,
            dedupe: false,
            timing: true,
            oracle: true,
            subset_mode: SubsetMode::Theory,
            rank: None,
            dup_constant: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.report_interval <= 0 {
            return Err(HarnessError::Config("report interval must be positive".into()));
        }
        if let Mode::Window(w) = self.mode {
            if w <= 0 {
                return Err(HarnessError::Config("window length must be positive".into()));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(HarnessError::Config("epsilon and delta must lie in (0, 1)".into()));
        }
        if self.dup_constant.is_some_and(|c| !(c > 0.0)) {
            return Err(HarnessError::Config("duplication constant must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportPoint {
    pub report_time: i64,
    pub density_estimate: Option<f64>,
    pub exact_density: Option<f64>,
    pub subset: Vec<VertexId>,
    pub updates: u64,
    pub total_update_us: Option<f64>,
    pub max_update_us: Option<f64>,
    pub live_edges: usize,
    /// The oracle was wanted but the live support was too large.
    pub oracle_skipped: bool,
}

impl ReportPoint {
    /// `|estimate - exact| / exact * 100`, when both exist and exact > 0.
    pub fn relative_error_pct(&self) -> Option<f64> {
        match (self.density_estimate, self.exact_density) {
            (Some(est), Some(exact)) if exact > 0.0 => Some((est - exact).abs() / exact * 100.0),
            _ => None,
        }
    }

    pub fn avg_update_us(&self) -> Option<f64> {
        self.total_update_us.map(|t| if self.updates == 0 { 0.0 } else { t / self.updates as f64 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub reports: usize,
    pub avg_relative_error_pct: Option<f64>,
    pub max_relative_error_pct: Option<f64>,
    pub avg_update_us: Option<f64>,
    pub total_updates: u64,
    pub max_live_edges: usize,
}

pub fn summarize(points: &[ReportPoint]) -> Result<RunSummary, HarnessError> {
    if points.is_empty() {
        return Err(HarnessError::Config("cannot summarize an empty run".into()));
    }
    let errors: Vec<f64> = points.iter().filter_map(ReportPoint::relative_error_pct).collect();
    let total_updates: u64 = points.iter().map(|p| p.updates).sum();
    let total_time: Option<f64> = points.iter().map(|p| p.total_update_us).sum();
    Ok(RunSummary {
        reports: points.len(),
        avg_relative_error_pct: (!errors.is_empty()).then(|| errors.iter().sum::<f64>() / errors.len() as f64),
        max_relative_error_pct: errors.iter().copied().reduce(f64::max),
        avg_update_us: total_time.map(|t| if total_updates == 0 { 0.0 } else { t / total_updates as f64 }),
        total_updates,
        max_live_edges: points.iter().map(|p| p.live_edges).max().unwrap_or(0),
    })
}

/// Parameters the estimators need up front, read off the whole stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamShape {
    pub n: usize,
    pub r: usize,
    pub w_max: u64,
    /// Most logical edges live at once.
    pub max_live: u64,
    /// Largest live total weight.
    pub max_live_weight: u64,
}

/// Replays the stream with counters only to size the estimators.
pub fn prescan(events: &[TemporalEvent], config: &RunConfig) -> StreamShape {
    let mut shape = StreamShape { n: 1, r: 1, w_max: 1, max_live: 0, max_live_weight: 0 };
    let mut live: Live<()> = Live::new(config.dedupe);
    let (mut count, mut weight) = (0u64, 0u64);
    for e in events {
        shape.n = shape.n.max(e.edge.vertices().last().map_or(0, |&v| v as usize + 1));
        shape.r = shape.r.max(e.edge.len());
        shape.w_max = shape.w_max.max(e.weight);
        if let Mode::Window(w) = config.mode {
            for (_, wt, _) in live.expire(e.timestamp - w) {
                count -= 1;
                weight -= wt;
            }
        }
        if live.arrive(e, || ()).is_some() {
            count += 1;
            weight += e.weight;
        }
        shape.max_live = shape.max_live.max(count);
        shape.max_live_weight = shape.max_live_weight.max(weight);
    }
    if let Some(r) = config.rank {
        shape.r = shape.r.max(r);
    }
    shape
}

/// Live events in arrival order, with optional collapsing of repeated
/// vertex sets into one reference-counted edge. A collapsed edge keeps the
/// weight of the arrival that created it.
struct Live<T> {
    dedupe: bool,
    queue: VecDeque<(i64, Hyperedge)>,
    entries: HashMap<Hyperedge, Vec<(u64, T)>>,
    counts: HashMap<Hyperedge, usize>,
}

impl<T> Live<T> {
    fn new(dedupe: bool) -> Self {
        Self { dedupe, queue: VecDeque::new(), entries: HashMap::new(), counts: HashMap::new() }
    }

    /// Records an arrival; returns the payload slot if the estimator must see
    /// a new edge.
    fn arrive(&mut self, e: &TemporalEvent, make: impl FnOnce() -> T) -> Option<()> {
        self.queue.push_back((e.timestamp, e.edge.clone()));
        let c = self.counts.entry(e.edge.clone()).or_default();
        *c += 1;
        if self.dedupe && *c > 1 {
            return None;
        }
        self.entries.entry(e.edge.clone()).or_default().push((e.weight, make()));
        Some(())
    }

    /// Removes events with timestamp `<= cutoff`; returns the edges the
    /// estimator must drop.
    fn expire(&mut self, cutoff: i64) -> Vec<(Hyperedge, u64, T)> {
        let mut out = Vec::new();
        while self.queue.front().is_some_and(|(t, _)| *t <= cutoff) {
            let (_, edge) = self.queue.pop_front().expect("front exists");
            let c = self.counts.get_mut(&edge).expect("live edge is counted");
            *c -= 1;
            let last = *c == 0;
            if last {
                self.counts.remove(&edge);
            }
            if !self.dedupe || last {
                let list = self.entries.get_mut(&edge).expect("live edge has an entry");
                let (w, payload) = list.remove(0);
                if list.is_empty() {
                    self.entries.remove(&edge);
                }
                out.push((edge, w, payload));
            }
        }
        out
    }

    fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }
}

enum Estimator {
    Udshp(Box<Udshp64>),
    Wdshp(Box<Wdshp64>),
    Shadow(Algo),
}

/// Handles held for one live logical edge.
struct Handles {
    shadow: EdgeHandle,
    inner: Vec<EdgeHandle>,
}

impl Estimator {
    fn build(config: &RunConfig, shape: &StreamShape) -> Result<Self, HarnessError> {
        Ok(match config.algo {
            Algo::Udshp => {
                let mut cfg = UdshpConfig::new(shape.n, shape.max_live_weight.max(1), shape.r, config.epsilon)
                    .with_subset_mode(config.subset_mode);
                if let Some(c) = config.dup_constant {
                    cfg = cfg.with_dup_constant(c);
                }
                Estimator::Udshp(Box::new(Udshp64::new(cfg)?))
            }
            Algo::Wdshp => {
                let mut cfg =
                    WdshpConfig::new(shape.n, shape.max_live.max(1), shape.r, config.delta, shape.w_max, config.seed);
                cfg.subset_mode = config.subset_mode;
                if let Some(c) = config.dup_constant {
                    cfg.dup_constant = c;
                }
                Estimator::Wdshp(Box::new(Wdshp64::new(cfg)?))
            }
            algo => Estimator::Shadow(algo),
        })
    }

    /// Unit-weight structures see an edge of weight `w` as `w` parallel copies.
    fn insert(&mut self, edge: &Hyperedge, weight: u64) -> Result<Vec<EdgeHandle>, HarnessError> {
        Ok(match self {
            Estimator::Udshp(u) => (0..weight).map(|_| u.insert(edge.clone())).collect::<Result<_, _>>()?,
            Estimator::Wdshp(w) => vec![w.insert(edge.clone(), weight)?],
            Estimator::Shadow(_) => Vec::new(),
        })
    }

    fn delete(&mut self, handles: &[EdgeHandle]) -> Result<(), HarnessError> {
        for &h in handles {
            match self {
                Estimator::Udshp(u) => u.delete(h)?,
                Estimator::Wdshp(w) => w.delete(h)?,
                Estimator::Shadow(_) => {}
            }
        }
        Ok(())
    }

    fn query(&self, shadow: &WeightedHypergraph) -> Result<(Option<f64>, Vec<VertexId>), HarnessError> {
        Ok(match self {
            Estimator::Udshp(u) => (Some(u.max_density()), u.densest_subset().unwrap_or_default()),
            Estimator::Wdshp(w) => (Some(w.max_density()), w.densest_subset().unwrap_or_default()),
            Estimator::Shadow(Algo::Greedy) => match greedy_peel(shadow) {
                Ok(r) => (Some(ratio_to(&r.best_density)), r.best_set),
                Err(_) => (Some(0.0), Vec::new()),
            },
            Estimator::Shadow(_) => match exact_densest_bruteforce(shadow) {
                Ok(r) => (Some(ratio_to(&r.best_density)), r.best_set),
                Err(dshp::Error::SupportTooLarge { .. }) => (None, Vec::new()),
                Err(e) => return Err(e.into()),
            },
        })
    }
}

#[derive(Default)]
struct Interval {
    updates: u64,
    total_us: f64,
    max_us: f64,
}

struct Run<'a> {
    config: &'a RunConfig,
    estimator: Estimator,
    shadow: WeightedHypergraph,
    live: Live<Handles>,
    interval: Interval,
}

impl Run<'_> {
    fn timed<T>(&mut self, f: impl FnOnce(&mut Estimator, &mut WeightedHypergraph) -> T) -> T {
        let start = Instant::now();
        let out = f(&mut self.estimator, &mut self.shadow);
        let us = start.elapsed().as_secs_f64() * 1e6;
        self.interval.updates += 1;
        self.interval.total_us += us;
        self.interval.max_us = self.interval.max_us.max(us);
        out
    }

    fn expire(&mut self, now: i64) -> Result<(), HarnessError> {
        if let Mode::Window(w) = self.config.mode {
            for (_, _, handles) in self.live.expire(now - w) {
                self.timed(|est, shadow| -> Result<(), HarnessError> {
                    est.delete(&handles.inner)?;
                    shadow.remove(handles.shadow)?;
                    Ok(())
                })?;
            }
        }
        Ok(())
    }

    fn arrive(&mut self, e: &TemporalEvent) -> Result<(), HarnessError> {
        let fresh = self.live.arrive(e, || Handles { shadow: EdgeHandle(0), inner: Vec::new() });
        if fresh.is_none() {
            return Ok(());
        }
        let (shadow, inner) = self.timed(|est, shadow| -> Result<_, HarnessError> {
            let inner = est.insert(&e.edge, e.weight)?;
            let s = shadow.insert(e.edge.clone(), e.weight)?;
            Ok((s, inner))
        })?;
        let slot = self.live.entries.get_mut(&e.edge).and_then(|l| l.last_mut()).expect("just inserted");
        slot.1 = Handles { shadow, inner };
        Ok(())
    }

    fn report(&mut self, time: i64) -> Result<ReportPoint, HarnessError> {
        let (estimate, subset) = self.estimator.query(&self.shadow)?;
        let support = self.shadow.support().len();
        let fits = support <= ORACLE_SUPPORT_LIMIT;
        let exact = if self.config.algo == Algo::Exact {
            estimate.filter(|_| self.config.oracle)
        } else if self.config.oracle && fits {
            Some(ratio_to(&exact_densest_bruteforce(&self.shadow)?.best_density))
        } else {
            None
        };
        let interval = std::mem::take(&mut self.interval);
        Ok(ReportPoint {
            report_time: time,
            density_estimate: estimate,
            exact_density: exact,
            subset,
            updates: interval.updates,
            total_update_us: self.config.timing.then_some(interval.total_us),
            max_update_us: self.config.timing.then_some(interval.max_us),
            live_edges: self.live.len(),
            oracle_skipped: (self.config.oracle || self.config.algo == Algo::Exact) && !fits,
        })
    }
}

/// Drives `events` (sorted by timestamp) through the configured estimator.
///
/// Report boundaries sit at `t0 + k * interval` for `k >= 1`, where `t0` is
/// the first timestamp. The report at boundary `b` reflects every event with
/// timestamp below `b`; in window mode only those newer than `b - window`.
pub fn run_stream(events: &[TemporalEvent], config: &RunConfig) -> Result<(Vec<ReportPoint>, StreamShape), HarnessError> {
    config.validate()?;
    if events.windows(2).any(|w| w[0].timestamp > w[1].timestamp) {
        return Err(HarnessError::Config("events must be sorted by timestamp".into()));
    }
    let shape = prescan(events, config);
    let Some(first) = events.first() else { return Ok((Vec::new(), shape)) };
    let mut run = Run {
        config,
        estimator: Estimator::build(config, &shape)?,
        shadow: WeightedHypergraph::new(shape.n, shape.r),
        live: Live::new(config.dedupe),
        interval: Interval::default(),
    };
    let mut points = Vec::new();
    let mut boundary = first.timestamp + config.report_interval;
    for e in events {
        while e.timestamp >= boundary {
            run.expire(boundary)?;
            points.push(run.report(boundary)?);
            boundary += config.report_interval;
        }
        run.expire(e.timestamp)?;
        run.arrive(e)?;
    }
    run.expire(boundary)?;
    points.push(run.report(boundary)?);
    Ok((points, shape))
}

/// Live edge multiset at each boundary, by direct filtering of the event
/// list. Reference for [`run_stream`]'s window bookkeeping.
pub fn naive_live_sets(events: &[TemporalEvent], config: &RunConfig) -> Vec<(i64, Vec<(Hyperedge, u64)>)> {
    let Some(first) = events.first() else { return Vec::new() };
    let last = events.last().expect("nonempty").timestamp;
    let mut out = Vec::new();
    let mut b = first.timestamp + config.report_interval;
    loop {
        let mut live: Vec<(Hyperedge, u64)> = events
            .iter()
            .filter(|e| e.timestamp < b)
            .filter(|e| match config.mode {
                Mode::InsertOnly => true,
                Mode::Window(w) => e.timestamp > b - w,
            })
            .map(|e| (e.edge.clone(), e.weight))
            .collect();
        if config.dedupe {
            // Collapsed edges are compared as vertex sets only.
            live.iter_mut().for_each(|(_, w)| *w = 1);
            live.sort();
            live.dedup();
        }
        live.sort();
        out.push((b, live));
        if b > last {
            break;
        }
        b += config.report_interval;
    }
    out
}

/// Live multiset the driver holds after each report, for comparison with
/// [`naive_live_sets`].
pub fn driver_live_sets(events: &[TemporalEvent], config: &RunConfig) -> Result<Vec<(i64, Vec<(Hyperedge, u64)>)>, HarnessError> {
    let config = RunConfig { algo: Algo::Greedy, oracle: false, timing: false, ..config.clone() };
    config.validate()?;
    let Some(first) = events.first() else { return Ok(Vec::new()) };
    let shape = prescan(events, &config);
    let mut run = Run {
        config: &config,
        estimator: Estimator::Shadow(Algo::Greedy),
        shadow: WeightedHypergraph::new(shape.n, shape.r),
        live: Live::new(config.dedupe),
        interval: Interval::default(),
    };
    let snapshot = |run: &Run| {
        let mut v: Vec<(Hyperedge, u64)> = run
            .shadow
            .iter()
            .map(|(_, e, w)| (e.clone(), if run.config.dedupe { 1 } else { w }))
            .collect();
        v.sort();
        v
    };
    let mut out = Vec::new();
    let mut boundary = first.timestamp + config.report_interval;
    for e in events {
        while e.timestamp >= boundary {
            run.expire(boundary)?;
            out.push((boundary, snapshot(&run)));
            boundary += config.report_interval;
        }
        run.expire(e.timestamp)?;
        run.arrive(e)?;
    }
    run.expire(boundary)?;
    out.push((boundary, snapshot(&run)));
    Ok(out)
}
