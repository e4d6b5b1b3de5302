//! Fully dynamic approximate densest subhypergraph maintenance.

pub mod error;
pub mod hop;
pub mod model;
pub mod oracle;
pub mod sampler;
pub mod scalar;
pub mod udshp;
pub mod wdshp;

pub use error::{Error, Result};
pub use hop::{Audit, Hop, HopConfig, SubsetMode};
pub use model::{density, max_multiplicity, EdgeHandle, Hyperedge, VertexId, WeightedHypergraph};
pub use oracle::{exact_densest_bruteforce, exact_densest_gray, greedy_peel, OracleResult, ORACLE_SUPPORT_LIMIT};
pub use sampler::SampleTable;
pub use wdshp::{class_size, epsilon_for_delta, weight_class, Wdshp, WdshpConfig, DEFAULT_SAMPLING_CONSTANT};
pub use udshp::{Udshp, UdshpConfig, DEFAULT_DUP_CONSTANT};
pub use scalar::{log2_clamped, ratio_to, ExactDensity, Scalar};

pub type Hop64 = Hop<f64>;
pub type Hop32 = Hop<f32>;
pub type Udshp64 = Udshp<f64>;
pub type Udshp32 = Udshp<f32>;
pub type Wdshp64 = Wdshp<f64>;
pub type Wdshp32 = Wdshp<f32>;
