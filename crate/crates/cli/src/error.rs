use std::path::PathBuf;

use aop_core::AopError;
use aop_qemu::QemuError;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] AopError),

    #[error(transparent)]
    Qemu(#[from] QemuError),

    #[error("invalid sweep: {0}")]
    InvalidSpec(String),

    #[error("need at least {needed} grid points for this fit, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

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

    #[error("plot error on {path}: {message}")]
    Plot { path: PathBuf, message: String },
}
