use thiserror::Error;

use crate::model::{EdgeHandle, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} outside universe of size {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("hyperedge has no vertices")]
    EmptyEdge,
    #[error("hyperedge repeats vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("hyperedge of size {size} exceeds rank bound {rank}")]
    RankExceeded { size: usize, rank: usize },
    #[error("edge weight must be a positive integer")]
    ZeroWeight,
    #[error("edge weight {weight} exceeds configured maximum {w_max}")]
    WeightAboveMax { weight: u64, w_max: u64 },
    #[error("edge handle {0} is already live")]
    DuplicateHandle(EdgeHandle),
    #[error("unknown edge handle {0}")]
    UnknownHandle(EdgeHandle),
    #[error("capacity of {capacity} edges exceeded")]
    CapacityExceeded { capacity: u64 },
    #[error("operation requires a nonempty vertex set")]
    EmptyVertexSet,
    #[error("operation requires a nonempty hypergraph")]
    EmptyHypergraph,
    #[error("no density guess qualifies; the sampled structures are all too sparse")]
    NoQualifyingGuess,
    #[error("support of {support} vertices exceeds the oracle limit of {limit}")]
    SupportTooLarge { support: usize, limit: usize },
    #[error("index ({i}, {j}) outside the sampler table")]
    SamplerIndex { i: usize, j: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
