//! Common result type and the name → pipeline registry.

use std::collections::BTreeMap;

use aop_core::{beta_init, BetaState, SpectralModel};
use serde::{Deserialize, Serialize};

use crate::dyxl::{dyxl_run, RhoPolicy};
use crate::error::{QemuError, Result};
use crate::improved::improved_run;
use crate::ledger::{AmplificationPolicy, CostParams, LedgerMode, ResourceLedger};
use crate::noise::NoiseConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub algorithm: String,
    pub beta_final: BetaState,
    /// `|⟨β_exact, β_final⟩|` against the exact-arithmetic iterate s.
    pub fidelity: f64,
    /// One entry per step (DYXL) or the final post-selection only (improved).
    pub p_success_history: Vec<f64>,
    pub ledger: ResourceLedger,
    /// Largest relative error of the uncomputed registers (improved, s > 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncompute_residual: Option<f64>,
}

/// Ledger and policy knobs shared by both pipelines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub ledger_mode: LedgerMode,
    pub amplification: AmplificationPolicy,
    pub rho_policy: RhoPolicy,
    /// Target precision ε of the cost model; also the counting resolution when
    /// the noise model has none.
    pub eps: f64,
    pub n: usize,
    pub m: usize,
    pub polylog_exponent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            ledger_mode: LedgerMode::Analytic,
            amplification: AmplificationPolicy::Bound,
            rho_policy: RhoPolicy::Adaptive,
            eps: 1e-3,
            n: 1024,
            m: 1024,
            polylog_exponent: 1.0,
            g0: None,
        }
    }
}

impl RunOptions {
    pub fn cost_params(&self, model: &SpectralModel) -> CostParams {
        CostParams {
            kappa: model.kappa(),
            k: model.k(),
            eps: self.eps,
            n: self.n,
            m: self.m,
            polylog_exponent: self.polylog_exponent,
            g0: self.g0,
        }
    }
}

pub(crate) fn validate_run(model: &SpectralModel, lambda2: f64, s: usize, noise: &NoiseConfig) -> Result<()> {
    if s == 0 {
        return Err(QemuError::invalid("s must be at least 1"));
    }
    if !(lambda2 > 0.0) || !lambda2.is_finite() {
        return Err(QemuError::invalid(format!("lambda2 must be positive, got {lambda2}")));
    }
    if model.k() == 0 {
        return Err(QemuError::invalid("empty spectral model"));
    }
    noise.validate()
}

/// The exact-arithmetic iterate `β⁽ˢ⁾`.
pub fn exact_iterate(model: &SpectralModel, lambda2: f64, s: usize) -> Result<BetaState> {
    let mut st = beta_init(model.k());
    for _ in 0..s {
        st.advance(model, lambda2)?;
    }
    Ok(st)
}

/// `|Σ_j a_j b_j|`, clipped into `[0, 1]`.
pub fn fidelity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(QemuError::invalid(format!("fidelity of states with {} and {} amplitudes", a.len(), b.len())));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok(dot.abs().min(1.0))
}

/// A quantum pipeline emulated at the level of its amplitudes.
pub trait Pipeline: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(
        &self,
        model: &SpectralModel,
        lambda2: f64,
        s: usize,
        noise: &NoiseConfig,
        opts: &RunOptions,
    ) -> Result<PipelineResult>;
}

pub struct Dyxl;

impl Pipeline for Dyxl {
    fn name(&self) -> &'static str {
        "dyxl"
    }
    fn run(&self, model: &SpectralModel, lambda2: f64, s: usize, noise: &NoiseConfig, opts: &RunOptions) -> Result<PipelineResult> {
        dyxl_run(model, lambda2, s, noise, opts)
    }
}

pub struct Improved;

impl Pipeline for Improved {
    fn name(&self) -> &'static str {
        "improved"
    }
    fn run(&self, model: &SpectralModel, lambda2: f64, s: usize, noise: &NoiseConfig, opts: &RunOptions) -> Result<PipelineResult> {
        improved_run(model, lambda2, s, noise, opts)
    }
}

pub struct PipelineRegistry {
    pipelines: BTreeMap<&'static str, Box<dyn Pipeline>>,
}

impl Default for PipelineRegistry {
    fn default() -> Self {
        let mut r = PipelineRegistry { pipelines: BTreeMap::new() };
        r.register(Box::new(Dyxl));
        r.register(Box::new(Improved));
        r
    }
}

impl PipelineRegistry {
    pub fn register(&mut self, p: Box<dyn Pipeline>) {
        self.pipelines.insert(p.name(), p);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.pipelines.keys().copied()
    }

    pub fn get(&self, name: &str) -> Result<&dyn Pipeline> {
        self.pipelines.get(name).map(|p| p.as_ref()).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            QemuError::invalid(format!("unknown pipeline '{name}' (known: {})", known.join(", ")))
        })
    }
}
