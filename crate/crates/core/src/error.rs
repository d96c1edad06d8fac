//! Crate-wide error type and result alias.

use std::io;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a hypergraph on {n} vertices")]
    VertexOutOfRange { vertex: u32, n: usize },

    #[error("unknown edge id {edge} (hypergraph has {m} edges)")]
    UnknownEdge { edge: u32, m: usize },

    #[error("hyperedge must contain at least one vertex")]
    EmptyEdge,

    #[error("hyperedge repeats vertex {vertex}")]
    RepeatedEdgeVertex { vertex: u32 },

    #[error("sequence repeats vertex {vertex}")]
    RepeatedSequenceVertex { vertex: u32 },

    #[error("edge value {value} must be finite and non-negative")]
    InvalidEdgeValue { value: f64 },

    #[error("edge {edge} carries value {value}, outside [0, 1] required by the coverage utility")]
    InvalidProbability { edge: u32, value: f64 },

    #[error("edge {edge} has {len} vertices; the pairwise solver accepts at most 2 (use the hyper solver)")]
    PairwiseRequired { edge: u32, len: usize },

    #[error("{path}:{line}: {message}")]
    ParseRow {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{path}: {message}")]
    ParseFile { path: String, message: String },

    #[error("exact search would enumerate {required} sequences, above the cap of {cap}")]
    OracleCap { required: u64, cap: u64 },

    #[error("accuracy undefined: reference sequence has {len} items, needs at least 2")]
    UndefinedAccuracy { len: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 input, 3 config, 4 invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::OracleCap { .. } => 3,
            Error::Invariant(_) => 4,
            _ => 2,
        }
    }
}
