//! Matrix-space alternating solver.
//!
//! Starting from the scaled PCA basis, alternate
//!
//! ```text
//! B ← (X̃ᵀAAᵀX̃ + λ₂I)⁻¹ X̃ᵀA
//! A ← (X̃BBᵀX̃ᵀ)⁺ X̃B,   then ‖A‖_F = 1
//! ```
//!
//! The n×n matrix in the A-step has rank at most k and is inverted with the
//! Moore–Penrose pseudoinverse.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::DataSet;
use crate::error::{AopError, Result};
use crate::linalg::{pinv, singular_values_desc};
use crate::svd::{svd, SvdTriplets};

/// Relative singular-value cutoff of the A-step pseudoinverse.
pub const PINV_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionIterate {
    /// n×k.
    pub a: DMatrix<f64>,
    /// m×k.
    pub b: DMatrix<f64>,
    pub iteration: usize,
    /// `‖I − AᵀX̃B‖_F² + λ₂‖B‖_F²` at each recorded A with its optimal B.
    pub objective_history: Vec<f64>,
    /// `Tr[(AᵀX̃X̃ᵀA + λ₂I)⁻¹]` at each recorded A.
    pub objective_eq1_history: Vec<f64>,
    /// `|u_jᵀ A e_j|` for each recorded A (aligned with the spectral β).
    pub beta_history: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalRun {
    pub iterate: ProjectionIterate,
    pub converged: bool,
    pub last_change: f64,
}

fn gram_plus(a: &DMatrix<f64>, x_tilde: &DMatrix<f64>, lambda2: f64) -> DMatrix<f64> {
    let xa = x_tilde.transpose() * a;
    let k = a.ncols();
    xa.transpose() * &xa + DMatrix::identity(k, k) * lambda2
}

/// `Tr[(AᵀX̃X̃ᵀA + λ₂I)⁻¹]`.
pub fn objective_eq1(a: &DMatrix<f64>, x_tilde: &DMatrix<f64>, lambda2: f64) -> Result<f64> {
    check_rows(a, x_tilde)?;
    let g = gram_plus(a, x_tilde, lambda2);
    let chol = g
        .cholesky()
        .ok_or_else(|| AopError::Factorization("A^T X X^T A + lambda2 I is not positive definite".into()))?;
    Ok(chol.inverse().trace())
}

/// `‖I − AᵀX̃B‖_F² + λ₂‖B‖_F²`.
pub fn objective_eq3(a: &DMatrix<f64>, b: &DMatrix<f64>, x_tilde: &DMatrix<f64>, lambda2: f64) -> Result<f64> {
    check_rows(a, x_tilde)?;
    if b.nrows() != x_tilde.ncols() || b.ncols() != a.ncols() {
        return Err(AopError::DimensionMismatch(format!(
            "B is {}x{}, expected {}x{}",
            b.nrows(),
            b.ncols(),
            x_tilde.ncols(),
            a.ncols()
        )));
    }
    let k = a.ncols();
    let r = DMatrix::<f64>::identity(k, k) - a.transpose() * x_tilde * b;
    Ok(r.norm_squared() + lambda2 * b.norm_squared())
}

fn check_rows(a: &DMatrix<f64>, x_tilde: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != x_tilde.nrows() {
        return Err(AopError::DimensionMismatch(format!(
            "A has {} rows but X has {}",
            a.nrows(),
            x_tilde.nrows()
        )));
    }
    Ok(())
}

/// `A⁽⁰⁾ = (1/√k) Σ_{j<k} u_j e_jᵀ` from precomputed triplets.
pub fn pca_init_from(triplets: &SvdTriplets, k: usize) -> Result<DMatrix<f64>> {
    if k == 0 {
        return Err(AopError::invalid("k must be positive"));
    }
    if triplets.rank < k {
        return Err(AopError::RankDeficient { requested: k, available: triplets.rank });
    }
    Ok(triplets.left_vectors.columns(0, k).into_owned() / (k as f64).sqrt())
}

pub fn pca_init(x_tilde: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    pca_init_from(&svd(x_tilde)?, k)
}

/// `B = (X̃ᵀAAᵀX̃ + λ₂I)⁻¹ X̃ᵀA`, evaluated through the k×k push-through form
/// `X̃ᵀA (AᵀX̃X̃ᵀA + λ₂I)⁻¹`.
pub fn update_b(a: &DMatrix<f64>, x_tilde: &DMatrix<f64>, lambda2: f64) -> Result<DMatrix<f64>> {
    check_rows(a, x_tilde)?;
    if !(lambda2 > 0.0) {
        return Err(AopError::invalid(format!("lambda2 must be positive, got {lambda2}")));
    }
    let xa = x_tilde.transpose() * a;
    let g = gram_plus(a, x_tilde, lambda2);
    let chol = g
        .cholesky()
        .ok_or_else(|| AopError::Factorization("A^T X X^T A + lambda2 I is not positive definite".into()))?;
    // B = XA G⁻¹  ⇔  Bᵀ = G⁻¹ (XA)ᵀ
    Ok(chol.solve(&xa.transpose()).transpose())
}

/// `(X̃BBᵀX̃ᵀ)⁺ X̃B` without the normalization.
pub fn update_a_unnormalized(b: &DMatrix<f64>, x_tilde: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if b.nrows() != x_tilde.ncols() {
        return Err(AopError::DimensionMismatch(format!(
            "B has {} rows but X has {} columns",
            b.nrows(),
            x_tilde.ncols()
        )));
    }
    let xb = x_tilde * b;
    if xb.iter().all(|&v| v == 0.0) {
        return Err(AopError::Degenerate("X B is the zero matrix".into()));
    }
    let gram = &xb * xb.transpose();
    Ok(pinv(&gram, PINV_CUTOFF)? * xb)
}

/// A-step followed by rescaling to unit Frobenius norm.
pub fn update_a(b: &DMatrix<f64>, x_tilde: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let a = update_a_unnormalized(b, x_tilde)?;
    let norm = a.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(AopError::Degenerate(format!("A-step produced norm {norm}")));
    }
    Ok(a / norm)
}

/// `|u_jᵀ A e_j|` for the leading k left singular vectors.
pub fn beta_in_basis(a: &DMatrix<f64>, triplets: &SvdTriplets) -> Vec<f64> {
    (0..a.ncols()).map(|j| triplets.left_vectors.column(j).dot(&a.column(j)).abs()).collect()
}

/// Runs the alternation on an explicit matrix from its PCA start.
pub fn solve_classical_on(
    x_tilde: &DMatrix<f64>,
    k: usize,
    lambda2: f64,
    tol: f64,
    max_iter: usize,
) -> Result<ClassicalRun> {
    if !(tol > 0.0) {
        return Err(AopError::invalid(format!("tol must be positive, got {tol}")));
    }
    let triplets = svd(x_tilde)?;
    let mut a = pca_init_from(&triplets, k)?;
    let mut b = update_b(&a, x_tilde, lambda2)?;
    let mut it = ProjectionIterate {
        a: a.clone(),
        b: b.clone(),
        iteration: 0,
        objective_history: vec![objective_eq3(&a, &b, x_tilde, lambda2)?],
        objective_eq1_history: vec![objective_eq1(&a, x_tilde, lambda2)?],
        beta_history: vec![beta_in_basis(&a, &triplets)],
    };
    let mut sv = singular_values_desc(&a)?;
    let mut converged = false;
    let mut last_change = f64::INFINITY;

    while it.iteration < max_iter {
        a = update_a(&b, x_tilde)?;
        b = update_b(&a, x_tilde, lambda2)?;
        it.iteration += 1;

        let eq3 = objective_eq3(&a, &b, x_tilde, lambda2)?;
        let eq1 = objective_eq1(&a, x_tilde, lambda2)?;
        if !eq3.is_finite() || !eq1.is_finite() {
            return Err(AopError::NonFinite(format!("objective at iteration {}", it.iteration)));
        }
        it.objective_history.push(eq3);
        it.objective_eq1_history.push(eq1);
        it.beta_history.push(beta_in_basis(&a, &triplets));

        let next_sv = singular_values_desc(&a)?;
        last_change = next_sv.iter().zip(&sv).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        sv = next_sv;
        if last_change < tol {
            converged = true;
            break;
        }
    }
    it.a = a;
    it.b = b;
    Ok(ClassicalRun { iterate: it, converged, last_change })
}

/// Scales the data set, normalizes `X̃` to unit leading singular value and
/// runs the alternation.
pub fn solve_classical(ds: &DataSet, k: usize, tol: f64, max_iter: usize) -> Result<ClassicalRun> {
    let scaled = ds.scale()?;
    solve_classical_on(&scaled.normalized(), k, ds.lambda2, tol, max_iter)
}
