//! Hypergraph orientation with bounded local slack.
//!
//! Every edge points at one of its vertices (its head). The structure keeps
//!
//! ```text
//! d_in(h(e)) <= d_in(u) + eta    for every edge e and every u in e
//! ```
//!
//! under insertions and deletions by rotating chains of tight edges, and
//! reads a `(1 + eps)`-approximate densest subset off the in-degree level
//! sets. Vertices learn about their neighbours' in-degrees lazily: after each
//! change of `d_in(v)` only the next `ceil(4 d_in(v) / eta)` edges of `In(v)`
//! are refreshed, round-robin.
//!
//! Probing for tight in-edges and refreshing mirrors walk `In(v)` with two
//! independent round-robin cursors. Both are move-to-back queues, so an edge
//! that joins `In(v)` is visited after every edge already there.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{EdgeHandle, Hyperedge, VertexId};
use crate::scalar::{log2_clamped, ExactDensity, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopConfig<F> {
    pub n: usize,
    /// The load estimate `D~`; guarantees need `D~ <= D^ <= 2 D~`.
    pub d_tilde: F,
    pub epsilon: F,
    /// Replaces the derived slack. Only meant for tests that need a small
    /// exact `eta`.
    pub eta_override: Option<F>,
}

impl<F: Scalar> HopConfig<F> {
    pub fn new(n: usize, d_tilde: F, epsilon: F) -> Self {
        Self { n, d_tilde, epsilon, eta_override: None }
    }

    pub fn with_eta(n: usize, eta: F, epsilon: F) -> Self {
        Self { n, d_tilde: F::one(), epsilon, eta_override: Some(eta) }
    }

    /// `eps^2 * D~ / (32 log n)` unless overridden.
    pub fn eta(&self) -> F {
        self.eta_override.unwrap_or_else(|| {
            self.epsilon * self.epsilon * self.d_tilde / (F::of(32.0) * log2_clamped::<F>(self.n as u64))
        })
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > u32::MAX as usize {
            return Err(Error::Config(format!("vertex count {} out of range", self.n)));
        }
        if !(self.epsilon > F::zero() && self.epsilon < F::one()) {
            return Err(Error::Config(format!("epsilon {} must lie in (0, 1)", self.epsilon)));
        }
        if !(self.d_tilde > F::zero()) || !self.d_tilde.is_finite() {
            return Err(Error::Config(format!("load estimate {} must be positive", self.d_tilde)));
        }
        let eta = self.eta();
        if !(eta > F::zero()) || !eta.is_finite() {
            return Err(Error::Config(format!("slack {eta} must be positive")));
        }
        Ok(())
    }
}

/// Which level set `query_subset` returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsetMode {
    /// Stop at the first level set whose growth ratio drops below `1 + gamma`.
    #[default]
    Theory,
    /// Evaluate every level set exactly and keep the densest.
    BestOfLevels,
}

#[derive(Debug, Clone)]
struct EdgeSlot {
    handle: EdgeHandle,
    vertices: Box<[VertexId]>,
    head: VertexId,
    /// Head in-degree as last reported to the other members.
    mirror: u64,
    /// Bumped whenever the edge leaves `In(head)`; stale queue entries carry
    /// an older value.
    gen: u32,
    /// Bumped whenever the edge's `Out` keys change.
    version: u32,
    alive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct OutEntry {
    key: u64,
    handle: EdgeHandle,
    slot: u32,
    version: u32,
}

impl Ord for OutEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.key, self.handle).cmp(&(other.key, other.handle))
    }
}

impl PartialOrd for OutEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Move-to-back queue over the edges headed at one vertex. Entries of edges
/// that have since left are skipped and dropped lazily.
#[derive(Debug, Clone, Default)]
struct RoundRobin {
    queue: VecDeque<(u32, u32)>,
}

impl RoundRobin {
    fn next(&mut self, slots: &[EdgeSlot]) -> Option<u32> {
        while let Some((slot, gen)) = self.queue.pop_front() {
            let s = &slots[slot as usize];
            if s.alive && s.gen == gen {
                self.queue.push_back((slot, gen));
                return Some(slot);
            }
        }
        None
    }

    fn push(&mut self, slot: u32, gen: u32, live: u64, slots: &[EdgeSlot]) {
        self.queue.push_back((slot, gen));
        if self.queue.len() as u64 > 2 * live + 32 {
            self.queue.retain(|&(s, g)| slots[s as usize].alive && slots[s as usize].gen == g);
        }
    }

    /// Live entries from the cursor onwards.
    fn live<'a>(&'a self, slots: &'a [EdgeSlot]) -> impl Iterator<Item = u32> + 'a {
        self.queue
            .iter()
            .filter(move |&&(s, g)| slots[s as usize].alive && slots[s as usize].gen == g)
            .map(|&(s, _)| s)
    }
}

#[derive(Debug, Clone, Default)]
struct VertexState {
    d_in: u64,
    /// Live size of `In(v)`; equals `d_in` between public operations.
    in_live: u64,
    probe: RoundRobin,
    inform: RoundRobin,
    out: BinaryHeap<OutEntry>,
    out_live: u64,
}

/// Results of a full consistency scan, see [`Hop::audit`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Audit {
    /// (edge, member) pairs with `d_in(head) > d_in(member) + eta`.
    pub slack_violations: usize,
    /// Largest `|d_in(head) - mirror|` over live edges.
    pub max_staleness: u64,
    /// Pairs whose staleness exceeds `eta / 4`.
    pub staleness_violations: usize,
    /// Structural mismatches: degree sums, `In`/`Out` membership, in-degree index.
    pub structural_errors: Vec<String>,
}

impl Audit {
    pub fn is_clean(&self) -> bool {
        self.slack_violations == 0 && self.staleness_violations == 0 && self.structural_errors.is_empty()
    }
}

/// The orientation structure for one load estimate `D~`.
#[derive(Debug, Clone)]
pub struct Hop<F> {
    config: HopConfig<F>,
    eta: F,
    half_eta: F,
    log_n: F,
    slots: Vec<EdgeSlot>,
    free: Vec<u32>,
    index: HashMap<EdgeHandle, u32>,
    vertices: Vec<VertexState>,
    /// `(d_in(v), v)` for every vertex.
    indegrees: BTreeSet<(u64, VertexId)>,
    last_rotations: usize,
    total_rotations: u64,
}

impl<F: Scalar> Hop<F> {
    pub fn new(config: HopConfig<F>) -> Result<Self> {
        config.validate()?;
        let eta = config.eta();
        Ok(Self {
            eta,
            half_eta: eta / F::of(2.0),
            log_n: log2_clamped(config.n as u64),
            slots: Vec::new(),
            free: Vec::new(),
            index: HashMap::new(),
            vertices: vec![VertexState::default(); config.n],
            indegrees: (0..config.n as VertexId).map(|v| (0, v)).collect(),
            last_rotations: 0,
            total_rotations: 0,
            config,
        })
    }

    pub fn config(&self) -> &HopConfig<F> {
        &self.config
    }

    pub fn eta(&self) -> F {
        self.eta
    }

    /// Raises `D~` (and with it `eta`). Lowering is refused: a smaller slack
    /// would not hold for the current orientation.
    pub fn raise_estimate(&mut self, d_tilde: F) -> Result<()> {
        if !(d_tilde >= self.config.d_tilde) || !d_tilde.is_finite() {
            return Err(Error::Config(format!("load estimate {d_tilde} below current {}", self.config.d_tilde)));
        }
        self.config.d_tilde = d_tilde;
        if self.config.eta_override.is_none() {
            self.eta = self.config.eta();
            self.half_eta = self.eta / F::of(2.0);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn contains(&self, handle: EdgeHandle) -> bool {
        self.index.contains_key(&handle)
    }

    pub fn d_in(&self, v: VertexId) -> u64 {
        self.vertices[v as usize].d_in
    }

    /// `D^ = max_v d_in(v)`, 0 when empty.
    pub fn max_load(&self) -> u64 {
        self.indegrees.last().map_or(0, |&(d, _)| d)
    }

    pub fn head(&self, handle: EdgeHandle) -> Option<VertexId> {
        self.index.get(&handle).map(|&s| self.slots[s as usize].head)
    }

    pub fn edge(&self, handle: EdgeHandle) -> Option<&[VertexId]> {
        self.index.get(&handle).map(|&s| &*self.slots[s as usize].vertices)
    }

    /// Mirror of the head in-degree held by the other members of the edge.
    pub fn mirror(&self, handle: EdgeHandle) -> Option<u64> {
        self.index.get(&handle).map(|&s| self.slots[s as usize].mirror)
    }

    /// Rotations performed by the most recent insert or delete.
    pub fn last_rotations(&self) -> usize {
        self.last_rotations
    }

    pub fn total_rotations(&self) -> u64 {
        self.total_rotations
    }

    /// Minimum in-degree over the vertices of `edge`.
    pub fn min_load(&self, edge: &[VertexId]) -> u64 {
        edge.iter().map(|&v| self.vertices[v as usize].d_in).min().unwrap_or(0)
    }

    /// Edges headed at `v`, in probe order.
    pub fn in_edges(&self, v: VertexId) -> Vec<EdgeHandle> {
        self.vertices[v as usize].probe.live(&self.slots).map(|s| self.slots[s as usize].handle).collect()
    }

    /// Edges containing `v` but headed elsewhere, sorted by handle.
    pub fn out_edges(&self, v: VertexId) -> Vec<EdgeHandle> {
        let mut out: Vec<EdgeHandle> = self
            .index
            .values()
            .map(|&s| &self.slots[s as usize])
            .filter(|s| s.head != v && s.vertices.contains(&v))
            .map(|s| s.handle)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn handles(&self) -> impl Iterator<Item = EdgeHandle> + '_ {
        self.index.keys().copied()
    }

    /// Vertex with the smallest in-degree in the edge, ties to the smallest id.
    fn argmin(&self, vertices: &[VertexId]) -> VertexId {
        let mut best = vertices[0];
        let mut best_d = self.vertices[best as usize].d_in;
        for &v in &vertices[1..] {
            let d = self.vertices[v as usize].d_in;
            if d < best_d {
                best = v;
                best_d = d;
            }
        }
        best
    }

    /// `ceil(4 d / eta)` clamped to `limit`.
    fn window(&self, d: u64, limit: u64) -> u64 {
        if d == 0 || limit == 0 {
            return 0;
        }
        let w = (F::of(4.0) * F::of_u64(d) / self.eta).ceil();
        w.to_u64().map_or(limit, |w| w.min(limit))
    }

    fn alloc(&mut self, handle: EdgeHandle, vertices: Box<[VertexId]>, head: VertexId) -> u32 {
        let mirror = self.vertices[head as usize].d_in;
        match self.free.pop() {
            Some(slot) => {
                let s = &mut self.slots[slot as usize];
                s.handle = handle;
                s.vertices = vertices;
                s.head = head;
                s.mirror = mirror;
                s.gen = s.gen.wrapping_add(1);
                s.version = s.version.wrapping_add(1);
                s.alive = true;
                slot
            }
            None => {
                self.slots.push(EdgeSlot { handle, vertices, head, mirror, gen: 0, version: 0, alive: true });
                (self.slots.len() - 1) as u32
            }
        }
    }

    fn attach(&mut self, slot: u32) {
        let (head, gen, version, mirror, handle) = {
            let s = &self.slots[slot as usize];
            (s.head, s.gen, s.version, s.mirror, s.handle)
        };
        let hv = &mut self.vertices[head as usize];
        hv.in_live += 1;
        let live = hv.in_live;
        hv.probe.push(slot, gen, live, &self.slots);
        hv.inform.push(slot, gen, live, &self.slots);
        let entry = OutEntry { key: mirror, handle, slot, version };
        for i in 0..self.slots[slot as usize].vertices.len() {
            let u = self.slots[slot as usize].vertices[i];
            if u != head {
                let uv = &mut self.vertices[u as usize];
                uv.out_live += 1;
                uv.out.push(entry);
            }
        }
    }

    fn detach(&mut self, slot: u32) {
        let s = &mut self.slots[slot as usize];
        s.gen = s.gen.wrapping_add(1);
        s.version = s.version.wrapping_add(1);
        let head = s.head;
        self.vertices[head as usize].in_live -= 1;
        for &u in self.slots[slot as usize].vertices.iter() {
            if u != head {
                self.vertices[u as usize].out_live -= 1;
            }
        }
    }

    /// Reassigns the head of an edge. No in-degree changes.
    pub fn rotate(&mut self, handle: EdgeHandle, v: VertexId) -> Result<()> {
        let slot = *self.index.get(&handle).ok_or(Error::UnknownHandle(handle))?;
        let s = &self.slots[slot as usize];
        if !s.vertices.contains(&v) {
            return Err(Error::Config(format!("vertex {v} is not in edge {handle}")));
        }
        if s.head != v {
            self.rotate_slot(slot, v);
        }
        Ok(())
    }

    fn rotate_slot(&mut self, slot: u32, v: VertexId) {
        self.detach(slot);
        let s = &mut self.slots[slot as usize];
        s.head = v;
        s.mirror = self.vertices[v as usize].d_in;
        self.attach(slot);
        self.last_rotations += 1;
        self.total_rotations += 1;
    }

    /// Probes the next window of `In(v)` for an edge whose least-loaded
    /// vertex `u` has `d_in(u) <= d_in(v) - eta/2`.
    pub fn tight_in_edge(&mut self, v: VertexId) -> Option<EdgeHandle> {
        self.tight_in_slot(v).map(|s| self.slots[s as usize].handle)
    }

    fn tight_in_slot(&mut self, v: VertexId) -> Option<u32> {
        let d = self.vertices[v as usize].d_in;
        let count = self.window(d, self.vertices[v as usize].in_live);
        let threshold = F::of_u64(d) - self.half_eta;
        for _ in 0..count {
            let slot = self.vertices[v as usize].probe.next(&self.slots)?;
            let u = self.argmin(&self.slots[slot as usize].vertices);
            if F::of_u64(self.vertices[u as usize].d_in) <= threshold {
                return Some(slot);
            }
        }
        None
    }

    /// The maximum-mirror edge of `Out(v)` if its mirror is at least
    /// `d_in(v) + eta/2`.
    pub fn tight_out_edge(&mut self, v: VertexId) -> Option<EdgeHandle> {
        self.tight_out_slot(v).map(|s| self.slots[s as usize].handle)
    }

    fn peek_out(&mut self, v: VertexId) -> Option<OutEntry> {
        let slots = &self.slots;
        let vs = &mut self.vertices[v as usize];
        while let Some(top) = vs.out.peek() {
            let s = &slots[top.slot as usize];
            if s.alive && s.version == top.version {
                return Some(*top);
            }
            vs.out.pop();
        }
        None
    }

    fn tight_out_slot(&mut self, v: VertexId) -> Option<u32> {
        let top = self.peek_out(v)?;
        let threshold = F::of_u64(self.vertices[v as usize].d_in) + self.half_eta;
        (F::of_u64(top.key) >= threshold).then_some(top.slot)
    }

    fn set_degree(&mut self, v: VertexId, d: u64) {
        let old = self.vertices[v as usize].d_in;
        self.indegrees.remove(&(old, v));
        self.indegrees.insert((d, v));
        self.vertices[v as usize].d_in = d;
    }

    /// Refreshes the mirrors of the next window of `In(v)`.
    fn inform(&mut self, v: VertexId) {
        let d = self.vertices[v as usize].d_in;
        let count = self.window(d, self.vertices[v as usize].in_live);
        for _ in 0..count {
            let Some(slot) = self.vertices[v as usize].inform.next(&self.slots) else { break };
            let s = &mut self.slots[slot as usize];
            s.mirror = d;
            s.version = s.version.wrapping_add(1);
            let entry = OutEntry { key: d, handle: s.handle, slot, version: s.version };
            for i in 0..self.slots[slot as usize].vertices.len() {
                let u = self.slots[slot as usize].vertices[i];
                if u != v {
                    let uv = &mut self.vertices[u as usize];
                    uv.out.push(entry);
                    if uv.out.len() as u64 > 4 * uv.out_live + 64 {
                        compact_out(&mut uv.out, &self.slots);
                    }
                }
            }
        }
    }

    fn increment(&mut self, v: VertexId) {
        let d = self.vertices[v as usize].d_in + 1;
        self.set_degree(v, d);
        self.inform(v);
    }

    fn decrement(&mut self, v: VertexId) {
        let d = self.vertices[v as usize].d_in;
        debug_assert!(d > 0, "decrement at zero load");
        self.set_degree(v, d - 1);
        self.inform(v);
    }

    /// Inserts an edge under a caller-chosen handle. Exactly one in-degree
    /// grows by one.
    pub fn insert(&mut self, handle: EdgeHandle, edge: &Hyperedge) -> Result<()> {
        if self.index.contains_key(&handle) {
            return Err(Error::DuplicateHandle(handle));
        }
        edge.validate(self.config.n, usize::MAX)?;
        self.last_rotations = 0;
        let mut v = self.argmin(edge.vertices());
        let slot = self.alloc(handle, edge.vertices().into(), v);
        self.index.insert(handle, slot);
        self.attach(slot);
        while let Some(f) = self.tight_in_slot(v) {
            let u = self.argmin(&self.slots[f as usize].vertices);
            self.rotate_slot(f, u);
            v = u;
        }
        self.increment(v);
        Ok(())
    }

    /// Deletes an edge. Exactly one in-degree shrinks by one.
    pub fn delete(&mut self, handle: EdgeHandle) -> Result<()> {
        let slot = self.index.remove(&handle).ok_or(Error::UnknownHandle(handle))?;
        self.last_rotations = 0;
        let mut v = self.slots[slot as usize].head;
        self.detach(slot);
        let s = &mut self.slots[slot as usize];
        s.alive = false;
        s.vertices = Box::new([]);
        self.free.push(slot);
        while let Some(f) = self.tight_out_slot(v) {
            let w = self.slots[f as usize].head;
            self.rotate_slot(f, v);
            v = w;
        }
        self.decrement(v);
        Ok(())
    }

    /// `D^ (1 - eps/2)`, 0 when empty.
    pub fn query_density(&self) -> F {
        F::of_u64(self.max_load()) * (F::one() - self.config.epsilon / F::of(2.0))
    }

    /// Vertices with `d_in >= threshold`, in descending load order.
    fn level_set(&self, threshold: u64) -> Vec<VertexId> {
        self.indegrees.range((threshold, 0)..).rev().map(|&(_, v)| v).collect()
    }

    pub fn query_subset(&self, mode: SubsetMode) -> Result<Vec<VertexId>> {
        if self.is_empty() {
            return Err(Error::EmptyHypergraph);
        }
        let mut set = match mode {
            SubsetMode::Theory => self.theory_subset(),
            SubsetMode::BestOfLevels => self.best_level_subset(),
        };
        set.sort_unstable();
        Ok(set)
    }

    /// Walks the level sets `S_i = {v : d_in(v) >= D^ - i * step}` until
    /// `|S_{i+1}| / |S_i| < 1 + gamma` and returns `S_{i+1}`, with
    /// `gamma = sqrt(2 eta log n / D^)`. Loads are integral, so the step
    /// never goes below one.
    fn theory_subset(&self) -> Vec<VertexId> {
        let top = self.max_load();
        let gamma = (F::of(2.0) * self.eta * self.log_n / F::of_u64(top)).sqrt();
        let step = self.eta.max(F::one());
        let count_at_least = |t: F| -> usize {
            if t <= F::zero() {
                return self.config.n;
            }
            let t = t.ceil().to_u64().unwrap_or(u64::MAX);
            self.indegrees.range((t, 0)..).count()
        };
        let mut level = F::of_u64(top);
        let mut a = count_at_least(level);
        let mut b = count_at_least(level - step);
        while F::of(b as f64) >= (F::one() + gamma) * F::of(a as f64) {
            level = level - step;
            a = b;
            b = count_at_least(level - step);
        }
        let t = level - step;
        if t <= F::zero() {
            (0..self.config.n as VertexId).collect()
        } else {
            self.level_set(t.ceil().to_u64().unwrap_or(u64::MAX))
        }
    }

    /// Densest set among `{v : d_in(v) >= t}` over every threshold `t`.
    /// An edge lies inside the level set for `t` iff its least-loaded vertex
    /// has load at least `t`.
    fn best_level_subset(&self) -> Vec<VertexId> {
        let mut edge_floor: Vec<u64> =
            self.index.values().map(|&s| self.min_load(&self.slots[s as usize].vertices)).collect();
        edge_floor.sort_unstable_by(|a, b| b.cmp(a));
        let mut thresholds: Vec<u64> = self.indegrees.iter().map(|&(d, _)| d).collect();
        thresholds.dedup();
        let (mut best_t, mut best_w, mut best_s) = (0u64, 0u64, 1u64);
        let mut first = true;
        for &t in thresholds.iter().rev() {
            let size = self.indegrees.range((t, 0)..).count() as u64;
            let weight = edge_floor.partition_point(|&f| f >= t) as u64;
            if first || (weight as u128 * best_s as u128) > (best_w as u128 * size as u128) {
                (best_t, best_w, best_s) = (t, weight, size);
                first = false;
            }
        }
        self.level_set(best_t)
    }

    /// Exact density of `subset` over the stored (unit-weight) edges.
    pub fn density_of(&self, subset: &[VertexId]) -> Result<ExactDensity> {
        if subset.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let mut inside = vec![false; self.config.n];
        for &v in subset {
            *inside.get_mut(v as usize).ok_or(Error::VertexOutOfRange { vertex: v, n: self.config.n })? =
                true;
        }
        let size = inside.iter().filter(|&&b| b).count() as u64;
        let count = self
            .index
            .values()
            .filter(|&&s| self.slots[s as usize].vertices.iter().all(|&v| inside[v as usize]))
            .count() as u64;
        Ok(ExactDensity::new(count, size))
    }

    /// Full scan of every invariant the structure promises.
    pub fn audit(&self) -> Audit {
        let mut audit = Audit::default();
        let quarter = self.eta / F::of(4.0);
        // Loads are integral, so a slack below one is enforced as one.
        let slack = self.eta.max(F::one());
        let mut in_count = vec![0u64; self.config.n];
        let mut out_count = vec![0u64; self.config.n];
        let mut listed: HashMap<(VertexId, u32), usize> = HashMap::new();
        for (u, vs) in self.vertices.iter().enumerate() {
            for e in vs.out.iter() {
                let s = &self.slots[e.slot as usize];
                if s.alive && s.version == e.version && s.mirror == e.key {
                    *listed.entry((u as VertexId, e.slot)).or_default() += 1;
                }
            }
        }
        for (&handle, &slot) in &self.index {
            let s = &self.slots[slot as usize];
            if s.handle != handle || !s.alive || !s.vertices.contains(&s.head) {
                audit.structural_errors.push(format!("edge {handle} has a corrupt slot"));
                continue;
            }
            in_count[s.head as usize] += 1;
            let dh = self.vertices[s.head as usize].d_in;
            for &u in s.vertices.iter().filter(|&&u| u != s.head) {
                out_count[u as usize] += 1;
                if F::of_u64(dh) > F::of_u64(self.vertices[u as usize].d_in) + slack {
                    audit.slack_violations += 1;
                }
                let stale = dh.abs_diff(s.mirror);
                audit.max_staleness = audit.max_staleness.max(stale);
                if F::of_u64(stale) > quarter {
                    audit.staleness_violations += 1;
                }
                let listed = listed.get(&(u, slot)).copied().unwrap_or(0);
                if listed != 1 {
                    audit.structural_errors.push(format!("edge {handle} listed {listed} times in Out({u})"));
                }
            }
        }
        let total: u64 = self.vertices.iter().map(|v| v.d_in).sum();
        if total != self.index.len() as u64 {
            audit.structural_errors.push(format!("sum of loads {total} != {} edges", self.index.len()));
        }
        for (v, vs) in self.vertices.iter().enumerate() {
            let probe: Vec<u32> = vs.probe.live(&self.slots).collect();
            let inform: Vec<u32> = vs.inform.live(&self.slots).collect();
            if vs.d_in != in_count[v] || vs.in_live != in_count[v] {
                audit.structural_errors.push(format!("vertex {v}: load {} but {} edges headed", vs.d_in, in_count[v]));
            }
            for (name, list) in [("probe", &probe), ("inform", &inform)] {
                let mut sorted = list.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if list.len() as u64 != in_count[v] || sorted.len() != list.len() {
                    audit.structural_errors.push(format!("vertex {v}: {name} queue lists {} edges", list.len()));
                }
            }
            if vs.out_live != out_count[v] {
                audit.structural_errors.push(format!("vertex {v}: out count {} != {}", vs.out_live, out_count[v]));
            }
        }
        let rebuilt: BTreeSet<(u64, VertexId)> =
            self.vertices.iter().enumerate().map(|(v, s)| (s.d_in, v as VertexId)).collect();
        if rebuilt != self.indegrees {
            audit.structural_errors.push("in-degree index out of sync".into());
        }
        audit
    }
}

fn compact_out(heap: &mut BinaryHeap<OutEntry>, slots: &[EdgeSlot]) {
    heap.retain(|e| {
        let s = &slots[e.slot as usize];
        s.alive && s.version == e.version
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[VertexId]) -> Hyperedge {
        Hyperedge::new(v.to_vec()).unwrap()
    }

    fn hop(n: usize, eta: f64) -> Hop<f64> {
        Hop::new(HopConfig::with_eta(n, eta, 0.5)).unwrap()
    }

    fn loads(h: &Hop<f64>) -> Vec<u64> {
        (0..h.n() as VertexId).map(|v| h.d_in(v)).collect()
    }

    #[test]
    fn eta_formula() {
        let c = HopConfig::<f64>::new(1024, 4096.0, 0.5);
        assert!((c.eta() - 0.25 * 4096.0 / 320.0).abs() < 1e-12);
        assert_eq!(HopConfig::<f64>::with_eta(4, 2.0, 0.5).eta(), 2.0);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(Hop::new(HopConfig::<f64>::new(4, 8.0, 1.5)).is_err());
        assert!(Hop::new(HopConfig::<f64>::new(0, 8.0, 0.5)).is_err());
        assert!(Hop::new(HopConfig::<f64>::new(4, 0.0, 0.5)).is_err());
    }

    #[test]
    fn first_inserts_break_ties_to_smallest_id() {
        let mut h = hop(2, 2.0);
        h.insert(EdgeHandle(1), &e(&[0, 1])).unwrap();
        assert_eq!(h.head(EdgeHandle(1)), Some(0));
        assert_eq!(loads(&h), [1, 0]);
        h.insert(EdgeHandle(2), &e(&[0, 1])).unwrap();
        assert_eq!(h.head(EdgeHandle(2)), Some(1));
        assert_eq!(loads(&h), [1, 1]);
    }

    #[test]
    fn insert_without_chain() {
        let mut h = hop(2, 2.0);
        for k in 0..3 {
            h.insert(EdgeHandle(k), &e(&[0, 1])).unwrap();
        }
        assert_eq!(loads(&h), [2, 1]);
        h.insert(EdgeHandle(3), &e(&[0, 1])).unwrap();
        assert_eq!(h.head(EdgeHandle(3)), Some(1));
        assert_eq!(loads(&h), [2, 2]);
        assert_eq!(h.last_rotations(), 0);
    }

    #[test]
    fn duplicate_and_unknown_handles() {
        let mut h = hop(2, 2.0);
        h.insert(EdgeHandle(1), &e(&[0, 1])).unwrap();
        assert_eq!(h.insert(EdgeHandle(1), &e(&[0, 1])), Err(Error::DuplicateHandle(EdgeHandle(1))));
        assert_eq!(h.delete(EdgeHandle(9)), Err(Error::UnknownHandle(EdgeHandle(9))));
        assert!(h.insert(EdgeHandle(2), &e(&[0, 5])).is_err());
    }

    #[test]
    fn delete_single_and_conservation() {
        let mut h = hop(2, 2.0);
        h.insert(EdgeHandle(1), &e(&[0, 1])).unwrap();
        h.delete(EdgeHandle(1)).unwrap();
        assert!(h.is_empty());
        assert_eq!(loads(&h), [0, 0]);

        for k in 0..9 {
            h.insert(EdgeHandle(10 + k), &e(&[0, 1])).unwrap();
        }
        for k in [3, 0, 8, 1, 5, 2, 7, 4, 6] {
            h.delete(EdgeHandle(10 + k)).unwrap();
            assert!(h.audit().is_clean());
        }
        assert_eq!(loads(&h), [0, 0]);
        assert_eq!(h.max_load(), 0);
    }

    #[test]
    fn delete_runs_inward_chain() {
        // Loads (3, 1): three edges on vertex 0 and one on vertex 1.
        let mut h = hop(3, 2.0);
        h.insert(EdgeHandle(0), &e(&[0])).unwrap();
        h.insert(EdgeHandle(1), &e(&[0])).unwrap();
        h.insert(EdgeHandle(2), &e(&[0, 2])).unwrap();
        h.insert(EdgeHandle(3), &e(&[1, 2])).unwrap();
        h.insert(EdgeHandle(4), &e(&[2])).unwrap();
        h.insert(EdgeHandle(5), &e(&[2])).unwrap();
        h.insert(EdgeHandle(6), &e(&[0, 1])).unwrap();
        // {0,1} landed on 1; move everything so that 0 carries {0},{0},{0,1}.
        h.rotate(EdgeHandle(6), 0).unwrap();
        // rotate() leaves loads alone, so rebuild the load bookkeeping by hand.
        h.set_degree(0, 3);
        h.set_degree(1, 1);
        h.set_degree(2, 3);
        for v in 0..3 {
            h.inform(v);
        }
        assert_eq!(loads(&h)[..2], [3, 1]);
        assert_eq!(h.head(EdgeHandle(6)), Some(0));
        assert_eq!(h.mirror(EdgeHandle(6)), Some(3));
        assert_eq!(h.head(EdgeHandle(3)), Some(1));

        h.delete(EdgeHandle(3)).unwrap();
        assert_eq!(h.head(EdgeHandle(6)), Some(1));
        assert_eq!(h.last_rotations(), 1);
        assert_eq!(loads(&h)[..2], [2, 1]);
    }

    #[test]
    fn rotate_bookkeeping() {
        let mut h = hop(3, 2.0);
        h.insert(EdgeHandle(7), &e(&[0, 1, 2])).unwrap();
        assert_eq!(h.head(EdgeHandle(7)), Some(0));
        let sum: u64 = loads(&h).iter().sum();
        h.rotate(EdgeHandle(7), 2).unwrap();
        assert_eq!(h.head(EdgeHandle(7)), Some(2));
        assert_eq!(h.in_edges(2), [EdgeHandle(7)]);
        assert_eq!(h.out_edges(0), [EdgeHandle(7)]);
        assert_eq!(h.out_edges(1), [EdgeHandle(7)]);
        assert!(h.in_edges(0).is_empty());
        assert_eq!(loads(&h).iter().sum::<u64>(), sum);
        h.rotate(EdgeHandle(7), 0).unwrap();
        assert_eq!(h.in_edges(0), [EdgeHandle(7)]);
        assert_eq!(h.out_edges(2), [EdgeHandle(7)]);
        assert!(h.out_edges(0).is_empty());
        assert!(h.rotate(EdgeHandle(7), 5).is_err());
    }

    /// Vertex 0 carries four edges {0, 1}; vertex 1 is given load `other`.
    fn probe_state(other: u64) -> Hop<f64> {
        let mut h = hop(3, 2.0);
        for k in 0..4 {
            h.insert(EdgeHandle(k), &e(&[0, 1])).unwrap();
        }
        for k in 0..4 {
            h.rotate(EdgeHandle(k), 0).unwrap();
        }
        h.set_degree(0, 4);
        h.set_degree(1, other);
        h
    }

    #[test]
    fn tight_in_edge_threshold() {
        let mut fresh = hop(2, 2.0);
        assert_eq!(fresh.tight_in_edge(0), None);
        let mut h = probe_state(4);
        assert_eq!(h.tight_in_edge(0), None);
        // The threshold is inclusive: 3 <= 4 - 1.
        let mut h = probe_state(3);
        assert!(h.tight_in_edge(0).is_some());
        let mut h = probe_state(1);
        assert!(h.tight_in_edge(0).is_some());
    }

    #[test]
    fn tight_out_edge_threshold() {
        let mut h = hop(3, 2.0);
        assert_eq!(h.tight_out_edge(1), None);
        h.insert(EdgeHandle(0), &e(&[0, 1])).unwrap();
        h.set_degree(0, 3);
        h.set_degree(1, 1);
        h.inform(0);
        assert_eq!(h.mirror(EdgeHandle(0)), Some(3));
        assert_eq!(h.tight_out_edge(1), Some(EdgeHandle(0)));
        h.set_degree(0, 1);
        h.inform(0);
        assert_eq!(h.tight_out_edge(1), None);
    }

    #[test]
    fn small_eta_keeps_mirrors_exact() {
        let mut h = hop(4, 1.0);
        let mut k = 0;
        for a in 0..4 {
            for b in a + 1..4 {
                for _ in 0..3 {
                    h.insert(EdgeHandle(k), &e(&[a, b])).unwrap();
                    k += 1;
                    assert_eq!(h.audit().max_staleness, 0);
                }
            }
        }
    }

    #[test]
    fn window_formula() {
        let h = hop(2, 3.0);
        assert_eq!(h.window(0, 10), 0);
        assert_eq!(h.window(1, 10), 2);
        assert_eq!(h.window(3, 10), 4);
        assert_eq!(h.window(30, 10), 10);
    }

    #[test]
    fn queries() {
        let mut h = hop(3, 2.0);
        assert_eq!(h.query_density(), 0.0);
        assert_eq!(h.query_subset(SubsetMode::Theory), Err(Error::EmptyHypergraph));
        for k in 0..5 {
            h.insert(EdgeHandle(k), &e(&[1])).unwrap();
        }
        assert_eq!(h.max_load(), 5);
        assert_eq!(h.query_density(), 3.75);
        assert_eq!(h.query_subset(SubsetMode::Theory).unwrap(), [1]);
        assert_eq!(h.query_subset(SubsetMode::BestOfLevels).unwrap(), [1]);
    }

    #[test]
    fn increment_then_decrement_restores_index() {
        let mut h = hop(3, 2.0);
        h.insert(EdgeHandle(0), &e(&[0, 1])).unwrap();
        let before = h.indegrees.clone();
        h.increment(2);
        h.decrement(2);
        assert_eq!(h.indegrees, before);
    }
}
