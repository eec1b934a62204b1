//! A-optimal projection: from raw data to the spectral model, the matrix-space
//! alternating solver, and the scalar iteration on singular values that the
//! quantum pipelines emulate.
//!
//! Data flow:
//!
//! ```text
//! X ──kNN──▶ S ──▶ L ──▶ Σ (ΣΣᵀ = I + λ₁L) ──▶ X̃ = XΣ ──SVD──▶ SpectralModel
//!                                                  │
//!                                                  └──▶ classical::solve_classical
//! SpectralModel ──▶ spectral::spectral_update / solver::solve_spectral
//! ```

pub mod classical;
pub mod data;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod model;
pub mod real;
pub mod solver;
pub mod spectral;
pub mod svd;

pub use error::{AopError, Result};
pub use model::{random_spectrum, SpectralModel};
pub use solver::{solve_spectral, SolverRegistry, SpectralSolution};
pub use spectral::{beta_init, spectral_update, BetaState};
