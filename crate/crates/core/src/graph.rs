//! Neighbourhood graph over the data columns and the `I + λ₁L = ΣΣᵀ` factor.

use nalgebra::DMatrix;

use crate::error::{AopError, Result};
use crate::linalg::symmetric_eigen;

/// Symmetric 0/1 adjacency of the mutual-or k-nearest-neighbour graph.
///
/// Columns of `x` are the data points, compared under the Euclidean metric.
/// A point is never its own neighbour, and distance ties go to the lower
/// column index.
pub fn knn_weights(x: &DMatrix<f64>, neighbor_count: usize) -> Result<DMatrix<f64>> {
    let m = x.ncols();
    if m < 2 {
        return Err(AopError::invalid(format!("need at least 2 data points, got {m}")));
    }
    if neighbor_count == 0 || neighbor_count >= m {
        return Err(AopError::invalid(format!(
            "neighbor_count must be in 1..{m}, got {neighbor_count}"
        )));
    }

    let mut dist = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        for i in (j + 1)..m {
            let d = (x.column(i) - x.column(j)).norm_squared();
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }

    let mut s = DMatrix::<f64>::zeros(m, m);
    let mut order: Vec<usize> = Vec::with_capacity(m - 1);
    for j in 0..m {
        order.clear();
        order.extend((0..m).filter(|&i| i != j));
        // stable sort keeps lower indices first on equal distance
        order.sort_by(|&a, &b| dist[(a, j)].total_cmp(&dist[(b, j)]));
        for &i in &order[..neighbor_count] {
            s[(i, j)] = 1.0;
            s[(j, i)] = 1.0;
        }
    }
    Ok(s)
}

/// `L = diag(S·1) − S`.
pub fn graph_laplacian(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !s.is_square() {
        return Err(AopError::DimensionMismatch(format!(
            "weight matrix must be square, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let degrees = s.column_sum();
    Ok(DMatrix::from_diagonal(&degrees) - s)
}

/// Symmetric positive-definite square root of `I + λ₁L`.
pub fn sigma_factor(laplacian: &DMatrix<f64>, lambda1: f64) -> Result<DMatrix<f64>> {
    if !laplacian.is_square() {
        return Err(AopError::DimensionMismatch("Laplacian must be square".into()));
    }
    if !(lambda1 >= 0.0) {
        return Err(AopError::invalid(format!("lambda1 must be nonnegative, got {lambda1}")));
    }
    let m = laplacian.nrows();
    if lambda1 == 0.0 {
        return Ok(DMatrix::identity(m, m));
    }
    let mut target = DMatrix::<f64>::identity(m, m) + laplacian * lambda1;
    // symmetrize so rounding in L cannot leak an antisymmetric part into the eigensolver
    target = (&target + target.transpose()) * 0.5;

    let (vals, v) = symmetric_eigen(&target)?;
    if let Some(bad) = vals.iter().find(|&&e| !(e > 0.0)) {
        return Err(AopError::Factorization(format!(
            "I + lambda1*L has nonpositive eigenvalue {bad:e}"
        )));
    }
    let root = DMatrix::from_fn(m, m, |i, j| v[(i, j)] * vals[j].sqrt());
    Ok(root * v.transpose())
}
