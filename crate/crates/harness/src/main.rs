use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dshp::SubsetMode;
use dshp_harness::{
    assign_weights, benson_paths, load_benson, load_events, run_stream, summarize, write_csv, write_outputs, Algo,
    HarnessError, Mode, RunConfig, WeightMode,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Benson,
    Events,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RunMode {
    Insert,
    Window,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Subset {
    Theory,
    Best,
}

/// Replay a temporal hypergraph and report densest-subhypergraph estimates.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// Dataset prefix (benson) or event file (events).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "benson")]
    format: Format,
    #[arg(long, value_enum, default_value = "insert")]
    mode: RunMode,
    /// Window length in timestamp units.
    #[arg(long)]
    window: Option<i64>,
    /// Report interval in timestamp units.
    #[arg(long, default_value_t = 1)]
    report: i64,
    /// udshp, wdshp, exact or greedy.
    #[arg(long, default_value = "udshp")]
    algo: String,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// unit or uniform:LO:HI:SEED. Event files keep their own weights when
    /// this is absent.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Collapse repeated vertex sets into a single live edge.
    #[arg(long)]
    dedupe_edges: bool,
    /// Output directory; the CSV goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave timing columns empty, for reproducible output.
    #[arg(long)]
    no_timing: bool,
    /// Override the rank bound inferred from the data.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, value_enum, default_value = "theory")]
    subset: Subset,
    /// Duplication constant of the unweighted wrapper (default 64).
    #[arg(long)]
    dup_constant: Option<f64>,
    /// Skip the exact oracle at report points.
    #[arg(long)]
    no_oracle: bool,
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let algo: Algo = cli.algo.parse()?;
    let weights: Option<WeightMode> = cli.weights.as_deref().map(str::parse).transpose()?;
    let mode = match cli.mode {
        RunMode::Insert => Mode::InsertOnly,
        RunMode::Window => Mode::Window(
            cli.window.ok_or_else(|| HarnessError::Config("--mode window needs --window".into()))?,
        ),
    };
    let config = RunConfig {
        mode,
        report_interval: cli.report,
        algo,
        epsilon: cli.epsilon,
        delta: cli.delta,
        seed: cli.seed,
        dedupe: cli.dedupe_edges,
        timing: !cli.no_timing,
        oracle: !cli.no_oracle,
        subset_mode: match cli.subset {
            Subset::Theory => SubsetMode::Theory,
            Subset::Best => SubsetMode::BestOfLevels,
        },
        rank: cli.rank,
        dup_constant: cli.dup_constant,
    };
    config.validate()?;

    let loaded = match cli.format {
        Format::Benson => {
            let [nv, sx, tm] = benson_paths(&cli.input);
            load_benson(&nv, &sx, &tm, cli.rank)?
        }
        Format::Events => load_events(&cli.input, cli.rank)?,
    };
    let r = &loaded.report;
    eprintln!(
        "loaded {}: n={} m={} r={} (rejected: {} over rank, {} repeated vertex)",
        r.name, r.n, r.m, r.r, r.rejected_rank, r.rejected_duplicate_vertex
    );
    let events = match weights {
        Some(mode) => assign_weights(loaded.events.clone(), mode)?,
        None => loaded.events.clone(),
    };
    let (points, _) = run_stream(&events, &config)?;
    if points.is_empty() {
        eprintln!("no events; nothing to report");
        return Ok(());
    }
    let summary = summarize(&points)?;
    match &cli.out {
        Some(dir) => write_outputs(dir, &points, &summary, r, &cli.algo, cli.seed)?,
        None => write_csv(std::io::stdout().lock(), &points)?,
    }
    eprintln!(
        "{} reports, {} updates, avg error {}, avg update {} us, m_delta {}",
        summary.reports,
        summary.total_updates,
        summary.avg_relative_error_pct.map_or("n/a".into(), |e| format!("{e:.3}%")),
        summary.avg_update_us.map_or("n/a".into(), |t| format!("{t:.2}")),
        summary.max_live_edges
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
