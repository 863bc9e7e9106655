use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("edge ({0}, {1}) has a negative or non-finite weight {2}")]
    InvalidWeight(usize, usize, f64),

    #[error("edge ({0}, {1}) listed more than once")]
    DuplicateEdge(usize, usize),

    #[error("edge ({0}, {1}) supplied in both orientations with different weights ({2} vs {3})")]
    AsymmetryConflict(usize, usize, f64, f64),

    #[error("vertex {0} has zero marginal weight")]
    NonPositiveMarginal(usize),

    #[error("total ordered-pair mass is {0}, expected 1 (enable normalization to rescale)")]
    NotNormalized(f64),

    #[error("vertex set is empty")]
    EmptySet,

    #[error("vertex sets overlap")]
    OverlappingSets,

    #[error("vertex {0} has no weight inside the restricted vertex set")]
    DisconnectedVertexInRestriction(usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("symmetric eigensolver did not converge")]
    EigensolverFailure,

    #[error("source class {0} has no vertices")]
    EmptySourceClass(usize),

    #[error("degenerate generator parameters: {0}")]
    DegenerateParams(String),

    #[error("gradient descent diverged at step {step} (loss {loss})")]
    Divergence { step: usize, loss: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported graph file version {found} (expected {expected})")]
    SchemaVersionMismatch { found: u64, expected: u64 },

    #[error("schema validation failed: {0}")]
    SchemaValidation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
