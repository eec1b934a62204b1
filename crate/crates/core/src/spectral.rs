//! The scalar iteration on the singular values of the projection iterate and
//! the analytic quantities that bound it.
//!
//! In the basis of the left singular vectors of `X̃` the projection iterate
//! stays diagonal, `A⁽ⁱ⁾ = Σ_j β_j⁽ⁱ⁾ u_j e_jᵀ`, and one alternating step
//! reduces to
//!
//! ```text
//! w_j   = (σ_j² β_j² + λ₂) / (σ_j² β_j)
//! c⁽ⁱ⁾  = ‖w‖₂
//! β_j'  = w_j / c⁽ⁱ⁾
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{AopError, Result};
use crate::model::SpectralModel;

/// Relative slack granted to the analytic inequalities when they are checked
/// inside the library; equality cases (uniform spectra) would otherwise trip
/// on the last bit.
const BOUND_SLACK: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaState {
    pub iteration: usize,
    pub beta: Vec<f64>,
    /// c⁽¹⁾ … c⁽ⁱ⁾.
    pub c_history: Vec<f64>,
}

impl BetaState {
    pub fn k(&self) -> usize {
        self.beta.len()
    }

    /// κ⁽ⁱ⁾ = max_j β_j / min_j β_j.
    pub fn kappa(&self) -> f64 {
        let (lo, hi) = min_max(&self.beta);
        hi / lo
    }

    /// a⁽ⁱ⁾ = max_j β_j².
    pub fn a(&self) -> f64 {
        let (_, hi) = min_max(&self.beta);
        hi * hi
    }

    pub fn last_c(&self) -> Option<f64> {
        self.c_history.last().copied()
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta.is_empty() {
            return Err(AopError::invalid("empty beta vector"));
        }
        if let Some(b) = self.beta.iter().find(|&&b| !(b > 0.0 && b <= 1.0 + 1e-12)) {
            return Err(AopError::invalid(format!("beta entry {b} outside (0, 1]")));
        }
        let norm_sq: f64 = self.beta.iter().map(|b| b * b).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(AopError::invalid(format!("beta is not unit norm: |beta|^2 = {norm_sq}")));
        }
        Ok(())
    }

    /// Advances the state by one update in place and returns c⁽ⁱ⁺¹⁾.
    pub fn advance(&mut self, model: &SpectralModel, lambda2: f64) -> Result<f64> {
        let (next, c) = update_amplitudes(model.sigma_sq(), &self.beta, lambda2)?;
        self.beta = next;
        self.c_history.push(c);
        self.iteration += 1;
        Ok(c)
    }
}

pub(crate) fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// β_j⁽⁰⁾ = 1/√k.
pub fn beta_init(k: usize) -> BetaState {
    let v = 1.0 / (k as f64).sqrt();
    BetaState { iteration: 0, beta: vec![v; k], c_history: Vec::new() }
}

/// Unnormalized update `w_j = (σ_j²β_j² + λ₂)/(σ_j²β_j)`.
pub fn unnormalized_update(sigma_sq: &[f64], beta: &[f64], lambda2: f64) -> Result<Vec<f64>> {
    if sigma_sq.len() != beta.len() {
        return Err(AopError::DimensionMismatch(format!(
            "{} squared singular values but {} amplitudes",
            sigma_sq.len(),
            beta.len()
        )));
    }
    sigma_sq
        .iter()
        .zip(beta)
        .map(|(&s2, &b)| {
            if !(b > 0.0) {
                return Err(AopError::Degenerate(format!("amplitude {b} is not positive")));
            }
            Ok((s2 * b * b + lambda2) / (s2 * b))
        })
        .collect()
}

/// Returns the normalized update and its normalization constant c.
pub fn update_amplitudes(sigma_sq: &[f64], beta: &[f64], lambda2: f64) -> Result<(Vec<f64>, f64)> {
    let w = unnormalized_update(sigma_sq, beta, lambda2)?;
    let c = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !c.is_finite() || c == 0.0 {
        return Err(AopError::NonFinite(format!("normalization constant {c}")));
    }
    Ok((w.into_iter().map(|x| x / c).collect(), c))
}

/// One step of the reformulated iteration; c⁽ⁱ⁾ is appended to the history.
pub fn spectral_update(model: &SpectralModel, state: &BetaState, lambda2: f64) -> Result<BetaState> {
    let mut next = state.clone();
    next.advance(model, lambda2)?;
    Ok(next)
}

/// κ⁽ⁱ⁾ from κ⁽ⁱ⁻¹⁾ and a⁽ⁱ⁻¹⁾ = max_j (β_j⁽ⁱ⁻¹⁾)².
pub fn kappa_step(kappa_prev: f64, a_prev: f64, lambda2: f64, kappa: f64) -> f64 {
    (a_prev + lambda2 * kappa * kappa) * kappa_prev / (a_prev + lambda2 * kappa_prev * kappa_prev)
}

/// Condition numbers κ⁽ⁱ⁾ of the iterates together with a⁽ⁱ⁾.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KappaTrace {
    pub kappa_seq: Vec<f64>,
    pub a_seq: Vec<f64>,
}

impl KappaTrace {
    pub fn push(&mut self, state: &BetaState) {
        self.kappa_seq.push(state.kappa());
        self.a_seq.push(state.a());
    }

    /// Largest deviation between the observed κ⁽ⁱ⁾ and the recurrence applied
    /// to the observed (κ⁽ⁱ⁻¹⁾, a⁽ⁱ⁻¹⁾), measured relative to κ⁽ⁱ⁾.
    pub fn recurrence_residual(&self, lambda2: f64, kappa: f64) -> f64 {
        (1..self.kappa_seq.len())
            .map(|i| {
                let pred = kappa_step(self.kappa_seq[i - 1], self.a_seq[i - 1], lambda2, kappa);
                (pred - self.kappa_seq[i]).abs() / self.kappa_seq[i]
            })
            .fold(0.0, f64::max)
    }
}

/// Runs `iterations` updates from the uniform start and records κ⁽⁰⁾ … κ⁽ⁱ⁾.
pub fn trace_kappa(model: &SpectralModel, lambda2: f64, iterations: usize) -> Result<KappaTrace> {
    let mut state = beta_init(model.k());
    let mut trace = KappaTrace::default();
    trace.push(&state);
    for _ in 0..iterations {
        state.advance(model, lambda2)?;
        trace.push(&state);
    }
    Ok(trace)
}

/// ρ = 1/(2λ₂ k κ² κ⁽ⁱ⁻¹⁾), small enough that every rotation amplitude
/// ρ·(σ_j²β_j² + λ₂)/(σ_j²β_j²) stays at or below one.
pub fn rho_param(model: &SpectralModel, lambda2: f64, kappa_iter: f64) -> f64 {
    let k = model.k() as f64;
    let kappa = model.kappa();
    1.0 / (2.0 * lambda2 * k * kappa * kappa * kappa_iter)
}

/// The rotation function f(σ, β) = (σ²β² + λ₂)/(σ²β²).
pub fn rotation_ratio(sigma_sq: f64, beta: f64, lambda2: f64) -> f64 {
    let x = sigma_sq * beta * beta;
    (x + lambda2) / x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CBounds {
    /// √(1 + 2kλ₂ + k²λ₂²).
    pub lower: f64,
    /// 1 + λ₂√k κ².
    pub cap: f64,
    /// The exact c⁽ⁱ⁾ of the state.
    pub c: f64,
    /// max_j c⁽ⁱ⁾ β_j⁽ⁱ⁾.
    pub max_scaled: f64,
}

/// √(1 + 2kλ₂ + k²λ₂²) = 1 + kλ₂.
pub fn c_lower(k: usize, lambda2: f64) -> f64 {
    let k = k as f64;
    (1.0 + 2.0 * k * lambda2 + k * k * lambda2 * lambda2).sqrt()
}

/// c = 1 + λ₂√k κ².
pub fn c_cap(k: usize, lambda2: f64, kappa: f64) -> f64 {
    1.0 + lambda2 * (k as f64).sqrt() * kappa * kappa
}

/// Evaluates the normalization-constant bounds for a state with i ≥ 1 and
/// fails with [`AopError::BoundViolation`] if either inequality breaks.
pub fn c_bounds(state: &BetaState, model: &SpectralModel, lambda2: f64) -> Result<CBounds> {
    let c = state
        .last_c()
        .ok_or_else(|| AopError::invalid("c bounds need a state with at least one update"))?;
    let (_, bmax) = min_max(&state.beta);
    let bounds = CBounds {
        lower: c_lower(state.k(), lambda2),
        cap: c_cap(state.k(), lambda2, model.kappa()),
        c,
        max_scaled: c * bmax,
    };
    if bounds.c < bounds.lower * (1.0 - BOUND_SLACK) {
        return Err(AopError::BoundViolation(format!(
            "c = {} below lower bound {}",
            bounds.c, bounds.lower
        )));
    }
    if bounds.max_scaled > bounds.cap * (1.0 + BOUND_SLACK) {
        return Err(AopError::BoundViolation(format!(
            "max_j c*beta_j = {} above cap {}",
            bounds.max_scaled, bounds.cap
        )));
    }
    Ok(bounds)
}

/// sin θ = c⁽ⁱ⁾/(c √k).
pub fn sin_theta(c_i: f64, c_cap: f64, k: usize) -> Result<f64> {
    let s = c_i / (c_cap * (k as f64).sqrt());
    if !(s > 0.0) {
        return Err(AopError::invalid(format!("sin(theta) = {s} is not positive")));
    }
    if s > 1.0 {
        return Err(AopError::BoundViolation(format!("sin(theta) = {s} exceeds 1")));
    }
    Ok(s)
}
