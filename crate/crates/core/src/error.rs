use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = AopError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AopError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Fewer usable singular components than requested.
    #[error("rank-deficient input: requested {requested} components, only {available} above threshold")]
    RankDeficient { requested: usize, available: usize },

    #[error("degenerate iterate: {0}")]
    Degenerate(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    /// An analytic bound that must hold on every valid trajectory was violated.
    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl AopError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        AopError::InvalidInput(msg.into())
    }
}
