use aop_core::AopError;
use thiserror::Error;

pub type Result<T, E = QemuError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QemuError {
    #[error(transparent)]
    Core(#[from] AopError),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Counted DYXL bookkeeping is exponential in s and refuses large runs.
    #[error("counted DYXL ledger is capped at s = {cap}, requested s = {requested}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("query count overflowed 128 bits at iteration {0}")]
    LedgerOverflow(usize),

    /// A controlled-rotation amplitude above one: the rotation parameter is wrong
    /// for this state.
    #[error("rotation amplitude {amplitude} exceeds 1 at component {component}")]
    RotationOverflow { component: usize, amplitude: f64 },

    /// The (c, β′) pair cannot come from any previous amplitude.
    #[error("negative discriminant {0} in the uncompute quadratic")]
    NegativeDiscriminant(f64),

    /// A perturbed register collapsed to zero or became non-finite.
    #[error("degenerate register: {0}")]
    Degenerate(String),
}

impl QemuError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        QemuError::InvalidInput(msg.into())
    }
}
