//! CSV report series and JSON run summary.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::driver::{ReportPoint, RunSummary};
use crate::error::HarnessError;
use crate::load::LoadReport;

pub const CSV_HEADER: [&str; 8] = [
    "report_time",
    "density_estimate",
    "exact_density",
    "relative_error_pct",
    "subset_size",
    "updates",
    "avg_update_us",
    "max_update_us",
];

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes one row per report point. Missing values stay empty.
pub fn write_csv<W: Write>(out: W, points: &[ReportPoint]) -> Result<(), HarnessError> {
    let err = |e: csv::Error| HarnessError::Output(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(err)?;
    for p in points {
        w.write_record([
            p.report_time.to_string(),
            cell(p.density_estimate),
            cell(p.exact_density),
            cell(p.relative_error_pct()),
            p.subset.len().to_string(),
            p.updates.to_string(),
            cell(p.avg_update_us()),
            cell(p.max_update_us),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| HarnessError::Output(e.to_string()))
}

pub fn csv_string(points: &[ReportPoint]) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, points)?;
    String::from_utf8(buf).map_err(|e| HarnessError::Output(e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct SummaryFile<'a> {
    pub dataset: &'a str,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub algo: &'a str,
    pub seed: u64,
    #[serde(flatten)]
    pub summary: &'a RunSummary,
}

pub fn write_outputs(
    dir: &Path,
    points: &[ReportPoint],
    summary: &RunSummary,
    load: &LoadReport,
    algo: &str,
    seed: u64,
) -> Result<(), HarnessError> {
    let io = |path: &Path| {
        let path = path.to_owned();
        move |source| HarnessError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv_path = dir.join(format!("{algo}.csv"));
    let file = fs::File::create(&csv_path).map_err(io(&csv_path))?;
    write_csv(file, points)?;
    let json_path = dir.join(format!("{algo}.summary.json"));
    let body = SummaryFile { dataset: &load.name, n: load.n, m: load.m, r: load.r, algo, seed, summary };
    let text = serde_json::to_string_pretty(&body).map_err(|e| HarnessError::Output(e.to_string()))?;
    fs::write(&json_path, text + "\n").map_err(io(&json_path))
}
