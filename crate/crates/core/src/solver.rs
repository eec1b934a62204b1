//! Convergence loop for the spectral iteration, generic over the arithmetic.
//!
//! Backends are registered by name and picked either explicitly or from a
//! requested mantissa width; see [`SolverRegistry`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{AopError, Result};
use crate::model::SpectralModel;
use crate::real::{MpFloat, Real, DoubleDouble};
use crate::spectral::{min_max, BetaState};

pub const DOUBLE_BITS: u32 = 53;
pub const DOUBLE_DOUBLE_BITS: u32 = 106;

/// Stopping thresholds below this are not meaningful in `f64`.
pub const EXTENDED_PRECISION_THRESHOLD: f64 = 1e-12;

/// Environment variable consulted for the default working precision.
pub const PRECISION_ENV: &str = "AOP_PRECISION_BITS";

/// Per-iteration record handed to observers (values rounded to `f64`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub c: f64,
    pub kappa: f64,
    pub change: f64,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSolution {
    pub state: BetaState,
    /// The iteration count s.
    pub iterations: usize,
    pub converged: bool,
    /// Sup-norm change of the last update.
    pub last_change: f64,
    pub precision_bits: u32,
    pub backend: String,
}

impl SpectralSolution {
    pub fn final_kappa(&self) -> f64 {
        self.state.kappa()
    }

    pub fn final_c(&self) -> f64 {
        self.state.last_c().unwrap_or(f64::NAN)
    }
}

pub type Observer<'a> = &'a mut dyn FnMut(&IterationRecord);

/// Iterates until `‖β⁽ⁱ⁾ − β⁽ⁱ⁻¹⁾‖_∞ < eps` or `max_iter` updates, in the
/// arithmetic of `R`.
pub fn solve_spectral_in<R: Real>(
    model: &SpectralModel,
    lambda2: f64,
    eps: f64,
    max_iter: usize,
    ctx: R::Context,
    mut observer: Option<Observer<'_>>,
) -> Result<(BetaState, usize, bool, f64)> {
    if !(eps > 0.0) {
        return Err(AopError::invalid(format!("eps must be positive, got {eps}")));
    }
    if !(lambda2 > 0.0) {
        return Err(AopError::invalid(format!("lambda2 must be positive, got {lambda2}")));
    }
    if max_iter == 0 {
        return Err(AopError::invalid("max_iter must be positive"));
    }
    let k = model.k();
    let lam = R::from_f64(lambda2, ctx);
    let tol = R::from_f64(eps, ctx);
    let sigma: Vec<R> = model.sigma_sq().iter().map(|&s| R::from_f64(s, ctx)).collect();
    let one = R::from_f64(1.0, ctx);
    let start = one.clone() / R::from_f64(k as f64, ctx).sqrt();
    let mut beta: Vec<R> = vec![start; k];
    let mut w: Vec<R> = beta.clone();
    let mut c_history = Vec::new();
    let zero = R::from_f64(0.0, ctx);

    let mut converged = false;
    let mut last_change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        let mut norm_sq = zero.clone();
        for j in 0..k {
            let sb = sigma[j].clone() * beta[j].clone();
            let wj = (sb.clone() * beta[j].clone() + lam.clone()) / sb;
            norm_sq = norm_sq + wj.clone() * wj.clone();
            w[j] = wj;
        }
        let c = norm_sq.sqrt();
        let mut change = zero.clone();
        for j in 0..k {
            let next = w[j].clone() / c.clone();
            let d = (next.clone() - beta[j].clone()).abs();
            if d > change {
                change = d;
            }
            beta[j] = next;
        }
        iterations += 1;
        let c64 = c.to_f64();
        if !c64.is_finite() {
            return Err(AopError::NonFinite(format!("c at iteration {iterations}")));
        }
        c_history.push(c64);
        last_change = change.to_f64();
        if let Some(obs) = observer.as_mut() {
            let b: Vec<f64> = beta.iter().map(Real::to_f64).collect();
            let (lo, hi) = min_max(&b);
            obs(&IterationRecord { iteration: iterations, c: c64, kappa: hi / lo, change: last_change, beta: b });
        }
        if change < tol {
            converged = true;
            break;
        }
    }

    let state = BetaState {
        iteration: iterations,
        beta: beta.iter().map(Real::to_f64).collect(),
        c_history,
    };
    Ok((state, iterations, converged, last_change))
}

/// A named arithmetic backend for the spectral solver.
pub trait SpectralBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn mantissa_bits(&self) -> u32;
    fn solve(
        &self,
        model: &SpectralModel,
        lambda2: f64,
        eps: f64,
        max_iter: usize,
        observer: Option<Observer<'_>>,
    ) -> Result<SpectralSolution>;
}

fn package(
    out: (BetaState, usize, bool, f64),
    bits: u32,
    name: &str,
) -> SpectralSolution {
    let (state, iterations, converged, last_change) = out;
    SpectralSolution { state, iterations, converged, last_change, precision_bits: bits, backend: name.to_string() }
}

pub struct DoubleBackend;

impl SpectralBackend for DoubleBackend {
    fn name(&self) -> &'static str {
        "double"
    }
    fn mantissa_bits(&self) -> u32 {
        DOUBLE_BITS
    }
    fn solve(&self, model: &SpectralModel, lambda2: f64, eps: f64, max_iter: usize, observer: Option<Observer<'_>>) -> Result<SpectralSolution> {
        let out = solve_spectral_in::<f64>(model, lambda2, eps, max_iter, (), observer)?;
        Ok(package(out, DOUBLE_BITS, self.name()))
    }
}

pub struct DoubleDoubleBackend;

impl SpectralBackend for DoubleDoubleBackend {
    fn name(&self) -> &'static str {
        "double-double"
    }
    fn mantissa_bits(&self) -> u32 {
        DOUBLE_DOUBLE_BITS
    }
    fn solve(&self, model: &SpectralModel, lambda2: f64, eps: f64, max_iter: usize, observer: Option<Observer<'_>>) -> Result<SpectralSolution> {
        let out = solve_spectral_in::<DoubleDouble>(model, lambda2, eps, max_iter, (), observer)?;
        Ok(package(out, DOUBLE_DOUBLE_BITS, self.name()))
    }
}

pub struct MultiPrecisionBackend {
    pub bits: u32,
}

impl SpectralBackend for MultiPrecisionBackend {
    fn name(&self) -> &'static str {
        "multiprecision"
    }
    fn mantissa_bits(&self) -> u32 {
        self.bits
    }
    fn solve(&self, model: &SpectralModel, lambda2: f64, eps: f64, max_iter: usize, observer: Option<Observer<'_>>) -> Result<SpectralSolution> {
        let out = solve_spectral_in::<MpFloat>(model, lambda2, eps, max_iter, self.bits as usize, observer)?;
        Ok(package(out, self.bits, self.name()))
    }
}

type BackendFactory = fn(u32) -> Box<dyn SpectralBackend>;

/// Name → backend table.
pub struct SolverRegistry {
    factories: BTreeMap<&'static str, BackendFactory>,
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = SolverRegistry { factories: BTreeMap::new() };
        r.register("double", |_| Box::new(DoubleBackend));
        r.register("double-double", |_| Box::new(DoubleDoubleBackend));
        r.register("multiprecision", |bits| Box::new(MultiPrecisionBackend { bits: bits.max(DOUBLE_DOUBLE_BITS + 1) }));
        r
    }
}

impl SolverRegistry {
    pub fn register(&mut self, name: &'static str, factory: BackendFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    /// Looks a backend up by name; `bits` only matters for variable-width ones.
    pub fn get(&self, name: &str, bits: u32) -> Result<Box<dyn SpectralBackend>> {
        self.factories
            .get(name)
            .map(|f| f(bits))
            .ok_or_else(|| AopError::invalid(format!("unknown solver backend '{name}'")))
    }

    /// The narrowest backend offering at least `bits` of mantissa.
    pub fn for_precision(&self, bits: u32) -> Result<Box<dyn SpectralBackend>> {
        let name = if bits <= DOUBLE_BITS {
            "double"
        } else if bits <= DOUBLE_DOUBLE_BITS {
            "double-double"
        } else {
            "multiprecision"
        };
        self.get(name, bits)
    }
}

/// Default working precision for a stopping threshold: `f64` down to
/// [`EXTENDED_PRECISION_THRESHOLD`], double-double below it. An explicit
/// request (argument or [`PRECISION_ENV`]) wins if it is wider.
pub fn auto_precision(eps: f64, requested: Option<u32>) -> u32 {
    let floor = if eps < EXTENDED_PRECISION_THRESHOLD { DOUBLE_DOUBLE_BITS } else { DOUBLE_BITS };
    let env = std::env::var(PRECISION_ENV).ok().and_then(|v| v.trim().parse::<u32>().ok());
    requested.or(env).map_or(floor, |b| b.max(floor))
}

/// Solves with the automatically chosen precision.
pub fn solve_spectral(model: &SpectralModel, lambda2: f64, eps: f64, max_iter: usize) -> Result<SpectralSolution> {
    let bits = auto_precision(eps, None);
    SolverRegistry::default().for_precision(bits)?.solve(model, lambda2, eps, max_iter, None)
}
