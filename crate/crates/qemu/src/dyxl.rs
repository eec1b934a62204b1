//! The baseline pipeline: phase estimation, controlled rotation by
//! `ρ·f(σ_j, β_j)`, and post-selection on the rotated qubit.
//!
//! The post-selected state is `Σ_j β_j·ρ f_j |u_j⟩ / √p₁`, so the new amplitudes
//! are proportional to `β_j f_j = (σ_j²β_j² + λ₂)/(σ_j²β_j)` and
//! `p₁ = ρ² Σ_j (β_j f_j)²`. Phase estimation only perturbs the value of `f`;
//! the amplitude `β_j` it multiplies is the true one.

use std::fmt;
use std::str::FromStr;

use aop_core::spectral::rho_param;
use aop_core::{BetaState, SpectralModel};
use serde::{Deserialize, Serialize};

use crate::error::{QemuError, Result};
use crate::ledger::{phase_estimation_repetitions, DyxlCounter, LedgerMode, ResourceLedger};
use crate::noise::{NoiseConfig, NoiseSource};
use crate::pipeline::{exact_iterate, fidelity, validate_run, PipelineResult, RunOptions};

/// Rotation amplitudes above one by more than this are rejected.
const ROTATION_SLACK: f64 = 1e-12;

/// Choice of the rotation parameter ρ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoPolicy {
    /// `1/(2λ₂kκ²κ⁽ⁱ⁻¹⁾)` with the condition number of the current state.
    #[default]
    Adaptive,
    /// `1/(2λ₂kκ⁴)`, valid for every state since `κ⁽ⁱ⁻¹⁾ ≤ κ²`.
    WorstCase,
}

impl RhoPolicy {
    pub fn rho(self, model: &SpectralModel, lambda2: f64, state: &BetaState) -> f64 {
        let kappa_iter = match self {
            RhoPolicy::Adaptive => state.kappa(),
            RhoPolicy::WorstCase => model.kappa() * model.kappa(),
        };
        rho_param(model, lambda2, kappa_iter)
    }
}

impl FromStr for RhoPolicy {
    type Err = QemuError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(RhoPolicy::Adaptive),
            "worst-case" => Ok(RhoPolicy::WorstCase),
            other => Err(QemuError::invalid(format!("unknown rho policy '{other}' (expected adaptive or worst-case)"))),
        }
    }
}

impl fmt::Display for RhoPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RhoPolicy::Adaptive => "adaptive",
            RhoPolicy::WorstCase => "worst-case",
        })
    }
}

/// One post-selected step. Returns the new state and the success probability.
pub fn dyxl_iteration(
    model: &SpectralModel,
    state: &BetaState,
    lambda2: f64,
    rho_policy: RhoPolicy,
    noise: &mut NoiseSource,
) -> Result<(BetaState, f64)> {
    state.validate()?;
    if model.k() != state.k() {
        return Err(QemuError::invalid(format!("model has k = {} but state has k = {}", model.k(), state.k())));
    }
    let rho = rho_policy.rho(model, lambda2, state);
    let mut amps = Vec::with_capacity(state.k());
    for (j, (&s2, &b)) in model.sigma_sq().iter().zip(&state.beta).enumerate() {
        let s2n = noise.eigenvalue(s2);
        let b2n = noise.eigenvalue(b * b);
        let x = s2n * b2n;
        if !(x > 0.0) || !x.is_finite() {
            return Err(QemuError::Degenerate(format!("phase readout sigma^2 beta^2 = {x} at component {j}")));
        }
        let rotation = rho * (x + lambda2) / x;
        if rotation > 1.0 + ROTATION_SLACK {
            return Err(QemuError::RotationOverflow { component: j, amplitude: rotation });
        }
        amps.push(b * rotation);
    }
    let p1: f64 = amps.iter().map(|a| a * a).sum();
    if !(p1 > 0.0) || !p1.is_finite() {
        return Err(QemuError::Degenerate(format!("post-selection probability {p1}")));
    }
    let norm = p1.sqrt();
    let mut next = state.clone();
    next.beta = amps.into_iter().map(|a| a / norm).collect();
    next.c_history.push(norm / rho);
    next.iteration += 1;
    Ok((next, p1.min(1.0)))
}

/// `s` chained steps with the requested ledger.
pub fn dyxl_run(
    model: &SpectralModel,
    lambda2: f64,
    s: usize,
    noise: &NoiseConfig,
    opts: &RunOptions,
) -> Result<PipelineResult> {
    validate_run(model, lambda2, s, noise)?;
    let params = opts.cost_params(model);
    params.validate()?;
    let mut counter = match opts.ledger_mode {
        LedgerMode::Counted => Some(DyxlCounter::new(&params, s)?),
        LedgerMode::Analytic => None,
    };
    let pe = phase_estimation_repetitions(if noise.eps1 > 0.0 { noise.eps1 } else { params.eps });

    let mut src = noise.source();
    let mut state = aop_core::beta_init(model.k());
    let mut p_hist = Vec::with_capacity(s);
    for _ in 0..s {
        let (next, p1) = dyxl_iteration(model, &state, lambda2, opts.rho_policy, &mut src)?;
        if let Some(c) = counter.as_mut() {
            let reps = pe
                .checked_mul(opts.amplification.repetitions(model.kappa(), p1))
                .ok_or(QemuError::LedgerOverflow(next.iteration))?;
            c.push(reps)?;
        }
        p_hist.push(p1);
        state = next;
    }
    let ledger = match counter {
        Some(c) => c.finish(),
        None => ResourceLedger::dyxl_analytic(&params, s),
    };
    let exact = exact_iterate(model, lambda2, s)?;
    Ok(PipelineResult {
        algorithm: "dyxl".into(),
        fidelity: fidelity(&exact.beta, &state.beta)?,
        beta_final: state,
        p_success_history: p_hist,
        ledger,
        uncompute_residual: None,
    })
}
