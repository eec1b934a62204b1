//! Scaled data matrix `X̃ = XΣ` and its normalized singular triplets.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{AopError, Result};
use crate::linalg::thin_svd;

/// Components whose normalized squared singular value falls below this are
/// treated as numerically zero.
pub const RANK_TOL_SQ: f64 = 1e-14;

/// `X̃ = XΣ`.
pub fn scaled_matrix(x: &DMatrix<f64>, sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.ncols() != sigma.nrows() {
        return Err(AopError::DimensionMismatch(format!(
            "X is {}x{} but Sigma is {}x{}",
            x.nrows(),
            x.ncols(),
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    Ok(x * sigma)
}

/// Thin SVD with singular values normalized so the largest is 1.
///
/// `X̃ = scale · Σ_j σ_j u_j v_jᵀ` over the retained components.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvdTriplets {
    pub singular_values: Vec<f64>,
    /// n×r, columns u_j.
    pub left_vectors: DMatrix<f64>,
    /// m×r, columns v_j.
    pub right_vectors: DMatrix<f64>,
    pub rank: usize,
    /// The largest raw singular value.
    pub scale: f64,
}

impl SvdTriplets {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DVector::from_iterator(
            self.rank,
            self.singular_values.iter().map(|s| s * self.scale),
        );
        &self.left_vectors * DMatrix::from_diagonal(&d) * self.right_vectors.transpose()
    }

    pub fn u(&self, j: usize) -> DVector<f64> {
        self.left_vectors.column(j).into_owned()
    }
}

pub fn svd(x_tilde: &DMatrix<f64>) -> Result<SvdTriplets> {
    if x_tilde.iter().any(|v| !v.is_finite()) {
        return Err(AopError::NonFinite("scaled data matrix".into()));
    }
    if x_tilde.iter().all(|&v| v == 0.0) {
        return Err(AopError::Degenerate("scaled data matrix is zero".into()));
    }
    let dec = thin_svd(x_tilde)?;
    let scale = dec.s[0];
    let rank = dec.s.iter().take_while(|&&s| (s / scale).powi(2) >= RANK_TOL_SQ).count();
    let singular_values = dec.s[..rank].iter().map(|s| s / scale).collect();
    let left_vectors = dec.u.columns(0, rank).into_owned();
    let right_vectors = dec.v.columns(0, rank).into_owned();

    Ok(SvdTriplets { singular_values, left_vectors, right_vectors, rank, scale })
}
