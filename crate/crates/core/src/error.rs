//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh data requested but the body model has none")]
    MeshUnavailable,

    #[error("degenerate segment ({what}): length {len:.3e} m below 1e-6 m")]
    DegenerateSegment { what: &'static str, len: f64 },

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("input is not a rotation matrix: max |R^T R - I| = {defect:.3e}")]
    NonRotationInput { defect: f64 },

    #[error("history too short: got {got} frames, need {need}")]
    HistoryTooShort { got: usize, need: usize },

    #[error("checkpoint mismatch: {0}")]
    ChkptMismatch(String),

    #[error("missing statistics: {0}")]
    MissingStats(&'static str),

    #[error("stale forward cache: {0}")]
    StaleCache(String),

    /// `line` is 1-based; 0 means the error concerns the whole file.
    #[error("schema error (line {line}): {msg}")]
    SchemaError { line: usize, msg: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("too few sequences: got {got}, need at least {need}")]
    TooFewSequences { got: usize, need: usize },

    #[error("empty split: {0}")]
    EmptySplit(&'static str),

    #[error("non-finite loss at epoch {epoch}, batch {batch}: {detail}")]
    NonFiniteLoss {
        epoch: usize,
        batch: usize,
        detail: String,
    },

    #[error("invalid config: {0}")]
    ConfigInvalid(String),

    #[error("invalid body model: {0}")]
    ModelInvalid(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn schema(line: usize, msg: impl Into<String>) -> Self {
        Error::SchemaError {
            line,
            msg: msg.into(),
        }
    }
}
