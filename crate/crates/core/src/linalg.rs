//! Dense decompositions.
//!
//! Matrices are stored as nalgebra `DMatrix`, but SVDs and symmetric
//! eigendecompositions go through faer: nalgebra 0.33's implicit-shift
//! iterations return inaccurate factors on some exactly structured inputs
//! (graph Laplacians with repeated eigenvalues among them).

use faer::{Mat, MatRef, Side};
use nalgebra::DMatrix;

use crate::error::{AopError, Result};

fn to_faer(a: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Thin SVD `A = U diag(s) Vᵀ` with `s` in descending order.
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub fn thin_svd(a: &DMatrix<f64>) -> Result<ThinSvd> {
    let dec = to_faer(a)
        .thin_svd()
        .map_err(|e| AopError::Factorization(format!("SVD did not converge: {e:?}")))?;
    let sv = dec.S().column_vector();
    let mut order: Vec<usize> = (0..sv.nrows()).collect();
    order.sort_by(|&x, &y| sv[y].total_cmp(&sv[x]));
    let (u, v) = (dec.U(), dec.V());
    Ok(ThinSvd {
        u: DMatrix::from_fn(a.nrows(), order.len(), |i, j| u[(i, order[j])]),
        s: order.iter().map(|&i| sv[i]).collect(),
        v: DMatrix::from_fn(a.ncols(), order.len(), |i, j| v[(i, order[j])]),
    })
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix;
/// only the lower triangle is read.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if !a.is_square() {
        return Err(AopError::DimensionMismatch(format!("eigendecomposition of a {}x{} matrix", a.nrows(), a.ncols())));
    }
    let dec = to_faer(a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| AopError::Factorization(format!("eigendecomposition did not converge: {e:?}")))?;
    let vals = dec.S().column_vector();
    Ok(((0..vals.nrows()).map(|i| vals[i]).collect(), from_faer(dec.U())))
}

/// Moore–Penrose pseudoinverse; singular values below `rel_cutoff · σ_max`
/// are treated as zero.
pub fn pinv(a: &DMatrix<f64>, rel_cutoff: f64) -> Result<DMatrix<f64>> {
    let dec = thin_svd(a)?;
    let smax = dec.s.first().copied().unwrap_or(0.0);
    let cutoff = rel_cutoff * smax;
    let inv: Vec<f64> = dec.s.iter().map(|&s| if s > cutoff && s > 0.0 { 1.0 / s } else { 0.0 }).collect();
    let scaled = DMatrix::from_fn(dec.v.nrows(), inv.len(), |i, j| dec.v[(i, j)] * inv[j]);
    Ok(scaled * dec.u.transpose())
}

/// Singular values in descending order.
pub fn singular_values_desc(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let mut s = to_faer(a)
        .singular_values()
        .map_err(|e| AopError::Factorization(format!("SVD did not converge: {e:?}")))?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}
