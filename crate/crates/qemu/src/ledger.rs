//! Resource accounting for both pipelines.
//!
//! `polylog(x)` is modeled throughout as `(log₂ x)^p` with a configurable
//! exponent `p` (default 1).
//!
//! Analytic mode evaluates the closed-form totals
//!
//! ```text
//! DYXL      T^s · G⁽⁰⁾,  T = κ⁴√k/ε · polylog(mn/ε),  G⁽⁰⁾ = log₂(1/ε)·log₂(nk)
//! improved  s·κ⁶√k/ε · polylog(nm/ε) + s²·κ⁴/ε · polylog(κk/ε)
//! ```
//!
//! and reports per-iteration increments. Counted mode replays the recursion
//! of a concrete run with integer repetition counts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QemuError, Result};

/// Counted DYXL bookkeeping refuses runs longer than this.
pub const COUNTED_DYXL_CAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LedgerMode {
    #[default]
    Analytic,
    Counted,
}

impl FromStr for LedgerMode {
    type Err = QemuError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(LedgerMode::Analytic),
            "counted" => Ok(LedgerMode::Counted),
            other => Err(QemuError::invalid(format!("unknown ledger mode '{other}' (expected analytic or counted)"))),
        }
    }
}

impl fmt::Display for LedgerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LedgerMode::Analytic => "analytic",
            LedgerMode::Counted => "counted",
        })
    }
}

/// How many amplified repetitions one successful post-selection costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplificationPolicy {
    /// `ceil(κ²)`, the worst case over all states of the run.
    #[default]
    Bound,
    /// `ceil(1/√p)` from the probability actually observed.
    Measured,
}

impl AmplificationPolicy {
    pub fn repetitions(self, kappa: f64, p_success: f64) -> u128 {
        let r = match self {
            AmplificationPolicy::Bound => kappa * kappa,
            AmplificationPolicy::Measured => 1.0 / p_success.sqrt(),
        };
        (r.ceil() as u128).max(1)
    }
}

impl FromStr for AmplificationPolicy {
    type Err = QemuError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bound" => Ok(AmplificationPolicy::Bound),
            "measured" => Ok(AmplificationPolicy::Measured),
            other => Err(QemuError::invalid(format!(
                "unknown amplification policy '{other}' (expected bound or measured)"
            ))),
        }
    }
}

fn default_exponent() -> f64 {
    1.0
}

/// Problem sizes entering the cost formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub kappa: f64,
    pub k: usize,
    /// Target precision ε.
    pub eps: f64,
    pub n: usize,
    pub m: usize,
    /// Exponent p of the polylog convention.
    #[serde(default = "default_exponent")]
    pub polylog_exponent: f64,
    /// Initial-state preparation cost; defaults to `log₂(1/ε)·log₂(nk)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
}

impl CostParams {
    pub fn new(kappa: f64, k: usize, eps: f64, n: usize, m: usize) -> Self {
        CostParams { kappa, k, eps, n, m, polylog_exponent: 1.0, g0: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 1.0) || !self.kappa.is_finite() {
            return Err(QemuError::invalid(format!("kappa must be >= 1, got {}", self.kappa)));
        }
        if self.k == 0 || self.n == 0 || self.m == 0 {
            return Err(QemuError::invalid("k, n and m must be positive"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(QemuError::invalid(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        if !(self.polylog_exponent >= 0.0) {
            return Err(QemuError::invalid("polylog exponent must be nonnegative"));
        }
        if let Some(g) = self.g0 {
            if !(g > 0.0) {
                return Err(QemuError::invalid(format!("g0 must be positive, got {g}")));
            }
        }
        Ok(())
    }

    pub fn polylog(&self, x: f64) -> f64 {
        x.log2().powf(self.polylog_exponent)
    }

    pub fn g0(&self) -> f64 {
        self.g0
            .unwrap_or_else(|| (1.0 / self.eps).log2() * ((self.n * self.k) as f64).log2().max(1.0))
    }

    fn sqrt_k(&self) -> f64 {
        (self.k as f64).sqrt()
    }

    fn nm(&self) -> f64 {
        (self.n as f64) * (self.m as f64)
    }

    /// Per-iteration multiplier T of the DYXL recursion.
    pub fn dyxl_step_factor(&self) -> f64 {
        self.kappa.powi(4) * self.sqrt_k() / self.eps * self.polylog(self.nm() / self.eps)
    }

    pub fn dyxl_total(&self, s: usize) -> f64 {
        self.dyxl_step_factor().powi(s as i32) * self.g0()
    }

    pub fn log10_dyxl_total(&self, s: usize) -> f64 {
        s as f64 * self.dyxl_step_factor().log10() + self.g0().log10()
    }

    /// Coefficient of `s` in the improved total.
    pub fn improved_linear(&self) -> f64 {
        self.kappa.powi(6) * self.sqrt_k() / self.eps * self.polylog(self.nm() / self.eps)
    }

    /// Coefficient of `s²` in the improved total.
    pub fn improved_quadratic(&self) -> f64 {
        self.kappa.powi(4) / self.eps * self.polylog(self.kappa * self.k as f64 / self.eps)
    }

    pub fn improved_total(&self, s: usize) -> f64 {
        let s = s as f64;
        s * self.improved_linear() + s * s * self.improved_quadratic()
    }

    /// Integer cost of one arithmetic forward or uncompute pass.
    fn arithmetic_count(&self) -> u128 {
        self.polylog(self.kappa * self.k as f64 / self.eps).ceil().max(1.0) as u128
    }

    /// Integer cost of the data-access part of the final rotation.
    fn access_count(&self) -> u128 {
        self.polylog(self.nm() / self.eps).ceil().max(1.0) as u128
    }

    fn g0_count(&self) -> u128 {
        self.g0().ceil().max(1.0) as u128
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kappa: f64,
    pub k: usize,
    pub eps: f64,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub polylog_exponent: f64,
}

impl ModelParams {
    fn from_cost(p: &CostParams, s: usize) -> Self {
        ModelParams { kappa: p.kappa, k: p.k, eps: p.eps, n: p.n, m: p.m, s, polylog_exponent: p.polylog_exponent }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Queries {
    Counted(Vec<u128>),
    Analytic(Vec<f64>),
}

impl Queries {
    pub fn len(&self) -> usize {
        match self {
            Queries::Counted(v) => v.len(),
            Queries::Analytic(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_f64(&self) -> Vec<f64> {
        match self {
            Queries::Counted(v) => v.iter().map(|&q| q as f64).collect(),
            Queries::Analytic(v) => v.clone(),
        }
    }
}

/// Entry 0 is the initial-state preparation; entry `i` is what iteration `i`
/// adds. Counted totals are the exact sum of the entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub mode: LedgerMode,
    pub per_iteration_queries: Queries,
    pub total: f64,
    pub model_params: ModelParams,
}

impl ResourceLedger {
    pub fn counted_total(&self) -> Option<u128> {
        match &self.per_iteration_queries {
            Queries::Counted(v) => Some(v.iter().sum()),
            Queries::Analytic(_) => None,
        }
    }

    /// DYXL closed form with increments `T^i G⁽⁰⁾ − T^{i−1} G⁽⁰⁾`.
    pub fn dyxl_analytic(params: &CostParams, s: usize) -> Self {
        let t = params.dyxl_step_factor();
        let g0 = params.g0();
        let mut entries = vec![g0];
        let mut prev = g0;
        for _ in 1..=s {
            let next = prev * t;
            entries.push(next - prev);
            prev = next;
        }
        ResourceLedger {
            mode: LedgerMode::Analytic,
            per_iteration_queries: Queries::Analytic(entries),
            total: params.dyxl_total(s),
            model_params: ModelParams::from_cost(params, s),
        }
    }

    /// Improved closed form with increments `f(i) − f(i−1)`.
    pub fn improved_analytic(params: &CostParams, s: usize) -> Self {
        let mut entries = vec![0.0];
        for i in 1..=s {
            entries.push(params.improved_total(i) - params.improved_total(i - 1));
        }
        ResourceLedger {
            mode: LedgerMode::Analytic,
            per_iteration_queries: Queries::Analytic(entries),
            total: params.improved_total(s),
            model_params: ModelParams::from_cost(params, s),
        }
    }
}

/// Replays the DYXL recursion: preparing state `i` costs `R_i` preparations of
/// state `i − 1`, so `Q(i) = R_i · Q(i−1)`.
#[derive(Debug, Clone)]
pub struct DyxlCounter {
    params: CostParams,
    prepared: u128,
    entries: Vec<u128>,
}

impl DyxlCounter {
    pub fn new(params: &CostParams, s: usize) -> Result<Self> {
        if s > COUNTED_DYXL_CAP {
            return Err(QemuError::CapExceeded { requested: s, cap: COUNTED_DYXL_CAP });
        }
        let g0 = params.g0_count();
        Ok(DyxlCounter { params: params.clone(), prepared: g0, entries: vec![g0] })
    }

    /// Records one iteration with `repetitions` preparations of its input.
    pub fn push(&mut self, repetitions: u128) -> Result<()> {
        let next = self
            .prepared
            .checked_mul(repetitions)
            .ok_or(QemuError::LedgerOverflow(self.entries.len()))?;
        self.entries.push(next - self.prepared);
        self.prepared = next;
        Ok(())
    }

    pub fn finish(self) -> ResourceLedger {
        let s = self.entries.len() - 1;
        ResourceLedger {
            mode: LedgerMode::Counted,
            total: self.prepared as f64,
            per_iteration_queries: Queries::Counted(self.entries),
            model_params: ModelParams::from_cost(&self.params, s),
        }
    }
}

/// Phase-estimation repetitions `ceil(1/ε₁)` of one DYXL step.
pub fn phase_estimation_repetitions(eps1: f64) -> u128 {
    ((1.0 / eps1).ceil() as u128).max(1)
}

/// Amplitude-estimation calls per normalization constant,
/// `ceil(ceil(1/ε₂)·(2 + 1/(2η)))`.
pub fn amplitude_estimation_calls(eps2: f64, eta: f64) -> u128 {
    ((1.0 / eps2).ceil() * (2.0 + 1.0 / (2.0 * eta))).ceil() as u128
}

/// Replays the improved pipeline: every intermediate step adds a forward and an
/// uncompute pass to the state-preparation circuit and estimates its
/// normalization constant with repeated runs of that circuit.
#[derive(Debug, Clone)]
pub struct ImprovedCounter {
    params: CostParams,
    ae_calls: u128,
    circuit: u128,
    entries: Vec<u128>,
}

impl ImprovedCounter {
    pub fn new(params: &CostParams, eps2: f64, eta: f64) -> Self {
        let g0 = params.g0_count();
        ImprovedCounter {
            params: params.clone(),
            ae_calls: amplitude_estimation_calls(eps2, eta),
            circuit: g0,
            entries: vec![g0],
        }
    }

    /// Cost of the circuit that prepares the current register state.
    pub fn circuit_cost(&self) -> u128 {
        self.circuit
    }

    /// One intermediate iteration: `G_i = G_{i−1} + 2·polylog(κk/ε)`, then
    /// amplitude estimation of c⁽ⁱ⁾ on that circuit.
    pub fn push_iteration(&mut self) -> Result<()> {
        let i = self.entries.len();
        self.circuit = self
            .circuit
            .checked_add(2 * self.params.arithmetic_count())
            .ok_or(QemuError::LedgerOverflow(i))?;
        let cost = self.ae_calls.checked_mul(self.circuit).ok_or(QemuError::LedgerOverflow(i))?;
        self.entries.push(cost);
        Ok(())
    }

    /// Final controlled rotation with `repetitions` rounds of amplification,
    /// each running the circuit forward and back.
    pub fn finish(mut self, repetitions: u128) -> Result<ResourceLedger> {
        let i = self.entries.len();
        let round = self
            .params
            .access_count()
            .checked_add(self.circuit)
            .and_then(|c| c.checked_mul(2))
            .and_then(|c| c.checked_mul(repetitions))
            .ok_or(QemuError::LedgerOverflow(i))?;
        self.entries.push(round);
        let total: u128 = self.entries.iter().sum();
        Ok(ResourceLedger {
            mode: LedgerMode::Counted,
            total: total as f64,
            model_params: ModelParams::from_cost(&self.params, self.entries.len() - 1),
            per_iteration_queries: Queries::Counted(self.entries),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub s: usize,
    pub dyxl: f64,
    pub improved: f64,
    pub log10_dyxl: f64,
    pub log10_improved: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub params: CostParams,
    pub rows: Vec<CostRow>,
    /// First s at which the improved total is strictly smaller.
    pub crossover: Option<usize>,
}

/// Analytic totals of both pipelines over `s_range`. The log columns stay
/// finite where the DYXL total overflows `f64`.
pub fn cost_compare(params: &CostParams, s_range: impl IntoIterator<Item = usize>) -> Result<CostTable> {
    params.validate()?;
    let rows: Vec<CostRow> = s_range
        .into_iter()
        .map(|s| {
            let improved = params.improved_total(s);
            CostRow {
                s,
                dyxl: params.dyxl_total(s),
                improved,
                log10_dyxl: params.log10_dyxl_total(s),
                log10_improved: improved.log10(),
            }
        })
        .collect();
    let crossover = rows.iter().find(|r| r.log10_improved < r.log10_dyxl).map(|r| r.s);
    Ok(CostTable { params: params.clone(), rows, crossover })
}
