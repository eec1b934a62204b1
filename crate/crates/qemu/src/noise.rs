//! Precision noise of the emulated subroutines.
//!
//! Phase estimation reads an eigenvalue to within ε₁ and amplitude estimation
//! reads an angle to within ε₂. Neither register is simulated; the readout is
//! modeled directly as a bounded perturbation of the true value.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QemuError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Readout equals the true value.
    #[default]
    Exact,
    /// Readout rounded to the nearest multiple of the resolution.
    Grid,
    /// Readout shifted by a uniform draw from `(−ε, ε)`.
    Stochastic,
}

impl NoiseMode {
    pub fn name(self) -> &'static str {
        match self {
            NoiseMode::Exact => "exact",
            NoiseMode::Grid => "grid",
            NoiseMode::Stochastic => "stochastic",
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseMode {
    type Err = QemuError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(NoiseMode::Exact),
            "grid" | "grid-rounding" => Ok(NoiseMode::Grid),
            "stochastic" => Ok(NoiseMode::Stochastic),
            other => Err(QemuError::invalid(format!(
                "unknown noise mode '{other}' (expected exact, grid or stochastic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Phase-estimation resolution ε₁.
    pub eps1: f64,
    /// Amplitude-estimation resolution ε₂.
    pub eps2: f64,
    /// Hamiltonian-simulation error ε₀ (cost model only).
    pub eps0: f64,
    pub mode: NoiseMode,
    pub seed: u64,
    /// Amplitude-estimation failure probability η (cost model only).
    pub eta: f64,
    /// Evolution-time constant t₀ (cost model only).
    pub t0: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig { eps1: 0.0, eps2: 0.0, eps0: 0.0, mode: NoiseMode::Exact, seed: 0, eta: 0.1, t0: 1.0 }
    }
}

impl NoiseConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn new(mode: NoiseMode, eps1: f64, eps2: f64, seed: u64) -> Self {
        NoiseConfig { eps1, eps2, mode, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps1", self.eps1), ("eps2", self.eps2), ("eps0", self.eps0)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(QemuError::invalid(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(QemuError::invalid(format!("eta must lie in (0, 1), got {}", self.eta)));
        }
        if !(self.t0 > 0.0) {
            return Err(QemuError::invalid(format!("t0 must be positive, got {}", self.t0)));
        }
        Ok(())
    }

    /// A fresh, seeded readout source for one run.
    pub fn source(&self) -> NoiseSource {
        NoiseSource { mode: self.mode, eps1: self.eps1, eps2: self.eps2, rng: ChaCha8Rng::seed_from_u64(self.seed) }
    }
}

/// Stateful readout model; draws are consumed in call order, so a run is
/// reproducible from its seed.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    mode: NoiseMode,
    eps1: f64,
    eps2: f64,
    rng: ChaCha8Rng,
}

impl NoiseSource {
    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    /// Phase-estimation readout of a positive eigenvalue.
    pub fn eigenvalue(&mut self, value: f64) -> f64 {
        noisy_eigenvalue(value, self.eps1, self.mode, &mut self.rng)
    }

    /// Amplitude-estimation readout of an angle θ ∈ (0, π/2]. The grid has
    /// spacing ε₂π, the stochastic shift is bounded by ε₂.
    pub fn angle(&mut self, theta: f64) -> f64 {
        let eps = self.eps2;
        if eps == 0.0 {
            return theta;
        }
        match self.mode {
            NoiseMode::Exact => theta,
            NoiseMode::Grid => {
                let step = eps * std::f64::consts::PI;
                (theta / step).round() * step
            }
            NoiseMode::Stochastic => {
                let t = theta + self.rng.random_range(-eps..eps);
                if t > 0.0 {
                    t
                } else {
                    theta / 2.0
                }
            }
        }
    }
}

/// Readout of `value` with resolution `eps`.
///
/// Grid mode may return zero for values below `eps/2`; callers treat that as a
/// collapsed register. Stochastic draws that would cross zero are clamped to
/// `value/2`, which keeps the deviation inside `eps`.
pub fn noisy_eigenvalue(value: f64, eps: f64, mode: NoiseMode, rng: &mut impl Rng) -> f64 {
    if eps == 0.0 {
        return value;
    }
    match mode {
        NoiseMode::Exact => value,
        NoiseMode::Grid => (value / eps).round() * eps,
        NoiseMode::Stochastic => {
            let v = value + rng.random_range(-eps..eps);
            if v > 0.0 {
                v
            } else {
                value / 2.0
            }
        }
    }
}
