//! Temporal stream driver for the dynamic densest subhypergraph estimators.

pub mod driver;
pub mod error;
pub mod load;
pub mod output;

pub use driver::{
    assign_weights, driver_live_sets, naive_live_sets, prescan, run_stream, summarize, Algo, Mode, ReportPoint,
    RunConfig, RunSummary, StreamShape, WeightMode,
};
pub use error::HarnessError;
pub use load::{benson_paths, load_benson, load_events, write_benson, LoadReport, Loaded, TemporalEvent};
pub use output::{csv_string, write_csv, write_outputs, CSV_HEADER};
