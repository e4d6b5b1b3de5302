//! Readers for temporal hypergraph streams.
//!
//! The three-file simplicial format stores, for dataset `NAME`:
//! `NAME-nverts.txt` (one simplex size per line), `NAME-simplices.txt` (all
//! vertex ids back to back, one per line) and `NAME-times.txt` (one timestamp
//! per simplex). The plain event format has one event per line:
//! `t w v1 v2 ... vk`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use dshp::{Hyperedge, VertexId};

use crate::error::HarnessError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalEvent {
    pub timestamp: i64,
    pub edge: Hyperedge,
    pub weight: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub rejected_rank: usize,
    pub rejected_duplicate_vertex: usize,
    /// Original id of every remapped vertex.
    pub original_ids: Vec<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct Loaded {
    pub events: Vec<TemporalEvent>,
    pub report: LoadReport,
}

/// Assigns dense ids in order of first appearance.
#[derive(Debug, Default)]
struct Remap {
    ids: HashMap<u64, VertexId>,
    original: Vec<u64>,
}

impl Remap {
    fn get(&mut self, raw: u64) -> VertexId {
        let next = self.original.len() as VertexId;
        *self.ids.entry(raw).or_insert_with(|| {
            self.original.push(raw);
            next
        })
    }
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_owned(), source })
}

fn parse_lines<T: std::str::FromStr>(path: &Path, text: &str) -> Result<Vec<T>, HarnessError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse().map_err(|_| HarnessError::Format {
                path: path.to_owned(),
                line: i + 1,
                message: format!("cannot parse {:?}", l.trim()),
            })
        })
        .collect()
}

/// Paths of the three files for a dataset prefix. A directory `D` stands for
/// the prefix `D/<basename of D>`.
pub fn benson_paths(input: &Path) -> [PathBuf; 3] {
    let prefix = if input.is_dir() {
        input.join(input.file_name().unwrap_or_default())
    } else {
        input.to_owned()
    };
    let with = |suffix: &str| {
        let mut s = prefix.clone().into_os_string();
        s.push(suffix);
        PathBuf::from(s)
    };
    [with("-nverts.txt"), with("-simplices.txt"), with("-times.txt")]
}

/// Loads a three-file dataset. Simplices with repeated vertices or with more
/// than `rank` vertices are skipped and counted. Events come back stably
/// sorted by timestamp with vertices renumbered densely.
pub fn load_benson(
    nverts: &Path,
    simplices: &Path,
    times: &Path,
    rank: Option<usize>,
) -> Result<Loaded, HarnessError> {
    let sizes: Vec<usize> = parse_lines(nverts, &read(nverts)?)?;
    let verts: Vec<u64> = parse_lines(simplices, &read(simplices)?)?;
    let stamps: Vec<i64> = parse_lines(times, &read(times)?)?;

    if stamps.len() != sizes.len() {
        let line = sizes.len().min(stamps.len()) + 1;
        let (path, message) = if stamps.len() < sizes.len() {
            (times, format!("{} timestamps for {} simplices", stamps.len(), sizes.len()))
        } else {
            (times, format!("extra timestamp; only {} simplices", sizes.len()))
        };
        return Err(HarnessError::Format { path: path.to_owned(), line, message });
    }
    let total: usize = sizes.iter().sum();
    if total != verts.len() {
        let line = total.min(verts.len()) + 1;
        return Err(HarnessError::Format {
            path: simplices.to_owned(),
            line,
            message: format!("sizes add up to {total} vertices but {} are listed", verts.len()),
        });
    }

    let mut remap = Remap::default();
    let mut report = LoadReport {
        name: nverts
            .file_name()
            .and_then(|f| f.to_str())
            .map(|f| f.trim_end_matches("-nverts.txt").to_owned())
            .unwrap_or_default(),
        ..Default::default()
    };
    let mut events = Vec::with_capacity(sizes.len());
    let mut offset = 0;
    for (k, (&size, &t)) in sizes.iter().zip(&stamps).enumerate() {
        let raw = &verts[offset..offset + size];
        offset += size;
        if size == 0 {
            return Err(HarnessError::Format { path: nverts.to_owned(), line: k + 1, message: "empty simplex".into() });
        }
        if rank.is_some_and(|r| size > r) {
            report.rejected_rank += 1;
            continue;
        }
        let mut sorted = raw.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            report.rejected_duplicate_vertex += 1;
            continue;
        }
        let ids: Vec<VertexId> = raw.iter().map(|&v| remap.get(v)).collect();
        let edge = Hyperedge::new(ids).expect("distinct and nonempty");
        events.push(TemporalEvent { timestamp: t, edge, weight: 1 });
    }
    events.sort_by_key(|e| e.timestamp);
    report.n = remap.original.len();
    report.m = events.len();
    report.r = events.iter().map(|e| e.edge.len()).max().unwrap_or(0);
    report.original_ids = remap.original;
    Ok(Loaded { events, report })
}

/// Loads the plain event format. Vertex ids are renumbered like
/// [`load_benson`]; lines starting with `#` are comments.
pub fn load_events(path: &Path, rank: Option<usize>) -> Result<Loaded, HarnessError> {
    let text = read(path)?;
    let mut remap = Remap::default();
    let mut report = LoadReport {
        name: path.file_stem().and_then(|f| f.to_str()).unwrap_or_default().to_owned(),
        ..Default::default()
    };
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| HarnessError::Format { path: path.to_owned(), line: i + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(bad("expected `t w v1 ... vk`".into()));
        }
        let t: i64 = fields[0].parse().map_err(|_| bad(format!("bad timestamp {:?}", fields[0])))?;
        let w: u64 = fields[1].parse().map_err(|_| bad(format!("bad weight {:?}", fields[1])))?;
        if w == 0 {
            return Err(bad("weight must be positive".into()));
        }
        let raw: Vec<u64> = fields[2..]
            .iter()
            .map(|f| f.parse().map_err(|_| bad(format!("bad vertex {f:?}"))))
            .collect::<Result<_, _>>()?;
        if rank.is_some_and(|r| raw.len() > r) {
            report.rejected_rank += 1;
            continue;
        }
        let mut sorted = raw.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            report.rejected_duplicate_vertex += 1;
            continue;
        }
        let ids: Vec<VertexId> = raw.iter().map(|&v| remap.get(v)).collect();
        events.push(TemporalEvent { timestamp: t, edge: Hyperedge::new(ids).expect("checked"), weight: w });
    }
    events.sort_by_key(|e| e.timestamp);
    report.n = remap.original.len();
    report.m = events.len();
    report.r = events.iter().map(|e| e.edge.len()).max().unwrap_or(0);
    report.original_ids = remap.original;
    Ok(Loaded { events, report })
}

/// Writes events in the three-file format under `prefix`, keeping vertex ids
/// as they are.
pub fn write_benson(prefix: &Path, events: &[TemporalEvent]) -> Result<(), HarnessError> {
    let [nv, sx, tm] = benson_paths(prefix);
    let mut sizes = String::new();
    let mut verts = String::new();
    let mut times = String::new();
    for e in events {
        sizes.push_str(&format!("{}\n", e.edge.len()));
        for v in e.edge.vertices() {
            verts.push_str(&format!("{v}\n"));
        }
        times.push_str(&format!("{}\n", e.timestamp));
    }
    for (path, body) in [(nv, sizes), (sx, verts), (tm, times)] {
        fs::write(&path, body).map_err(|source| HarnessError::Io { path, source })?;
    }
    Ok(())
}
