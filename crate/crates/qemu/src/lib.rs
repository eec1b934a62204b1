//! Amplitude-level emulation of the two quantum A-optimal projection
//! pipelines.
//!
//! Neither pipeline is simulated gate by gate. Because the projection iterate
//! stays diagonal in the left singular basis of the data, the amplitudes
//! `β_j` determine every tracked quantity: post-selection probabilities,
//! normalization constants, register contents and the resource counts.
//!
//! - [`dyxl`]: phase estimation, a controlled rotation and post-selection at
//!   every step; preparing step `i` re-prepares step `i − 1` many times, so the
//!   cost is exponential in the number of steps.
//! - [`improved`]: arithmetic registers, amplitude estimation of the
//!   normalization constant and an uncompute by root selection; cost is
//!   quadratic in the number of steps.
//!
//! Pipelines are registered by name in a [`PipelineRegistry`].

pub mod dyxl;
pub mod error;
pub mod improved;
pub mod ledger;
pub mod noise;
pub mod pipeline;

pub use dyxl::{dyxl_iteration, dyxl_run, RhoPolicy};
pub use error::{QemuError, Result};
pub use improved::{estimate_c, gamma_flag, improved_forward, improved_run, quadratic_uncompute};
pub use ledger::{cost_compare, AmplificationPolicy, CostParams, CostTable, LedgerMode, ResourceLedger};
pub use noise::{noisy_eigenvalue, NoiseConfig, NoiseMode};
pub use pipeline::{fidelity, Pipeline, PipelineRegistry, PipelineResult, RunOptions};
