//! Iteration-count sweeps over κ, ε or k on random spectra.

use std::fmt;

use aop_core::solver::auto_precision;
use aop_core::{random_spectrum, SolverRegistry};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Kappa,
    Eps,
    K,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Kappa => "kappa",
            Variable::Eps => "eps",
            Variable::K => "k",
        }
    }

    /// Abscissa used for fits and plots: `log₂(1/ε)` for ε, the value otherwise.
    pub fn axis(self, value: f64) -> f64 {
        match self {
            Variable::Eps => (1.0 / value).log2(),
            _ => value,
        }
    }

    pub fn axis_label(self) -> &'static str {
        match self {
            Variable::Kappa => "condition number κ",
            Variable::Eps => "log₂(1/ε)",
            Variable::K => "dimension k",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_k() -> usize {
    100
}
fn default_kappa() -> f64 {
    10.0
}
fn default_lambda2() -> f64 {
    1.0
}
fn default_eps() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    50_000_000
}
fn default_trials() -> usize {
    10
}

/// Parameters held constant along a sweep; the swept one is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_lambda2")]
    pub lambda2: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Requested mantissa width; widened automatically for small ε.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl Default for FixedParams {
    fn default() -> Self {
        FixedParams {
            k: default_k(),
            kappa: default_kappa(),
            lambda2: default_lambda2(),
            eps: default_eps(),
            precision_bits: None,
            max_iter: default_max_iter(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: Variable,
    pub grid: Vec<f64>,
    #[serde(default)]
    pub fixed: FixedParams,
    #[serde(default = "default_trials")]
    pub trials_per_point: usize,
    #[serde(default)]
    pub seed: u64,
    /// Curve label; derived from the fixed parameters when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// The concrete (k, κ, ε) of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub k: usize,
    pub kappa: f64,
    pub eps: f64,
}

impl SweepSpec {
    pub fn new(variable: Variable, grid: Vec<f64>, fixed: FixedParams, trials_per_point: usize, seed: u64) -> Self {
        SweepSpec { variable, grid, fixed, trials_per_point, seed, label: None }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::InvalidSpec(m));
        if self.grid.is_empty() {
            return bad("grid is empty".into());
        }
        if let Some(w) = self.grid.windows(2).find(|w| !(w[1] > w[0])) {
            return bad(format!("grid must be strictly increasing: {} then {}", w[0], w[1]));
        }
        if self.trials_per_point == 0 {
            return bad("trials_per_point must be at least 1".into());
        }
        if !(self.fixed.lambda2 > 0.0) {
            return bad(format!("lambda2 must be positive, got {}", self.fixed.lambda2));
        }
        if self.fixed.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        for &v in &self.grid {
            self.point(v)?;
        }
        self.point(self.grid[0]).map(|_| ())
    }

    pub fn point(&self, value: f64) -> Result<PointParams> {
        let f = &self.fixed;
        let p = match self.variable {
            Variable::Kappa => PointParams { k: f.k, kappa: value, eps: f.eps },
            Variable::Eps => PointParams { k: f.k, kappa: f.kappa, eps: value },
            Variable::K => {
                if value.fract() != 0.0 || value < 2.0 {
                    return Err(CliError::InvalidSpec(format!("k grid values must be integers >= 2, got {value}")));
                }
                PointParams { k: value as usize, kappa: f.kappa, eps: f.eps }
            }
        };
        if p.k < 2 {
            return Err(CliError::InvalidSpec(format!("k must be at least 2, got {}", p.k)));
        }
        if !(p.kappa > 1.0) || !p.kappa.is_finite() {
            return Err(CliError::InvalidSpec(format!("kappa must exceed 1, got {}", p.kappa)));
        }
        if !(p.eps > 0.0 && p.eps < 1.0) {
            return Err(CliError::InvalidSpec(format!("eps must lie in (0, 1), got {}", p.eps)));
        }
        Ok(p)
    }

    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let f = &self.fixed;
        match self.variable {
            Variable::Kappa => format!("k={}, eps={:e}", f.k, f.eps),
            Variable::Eps => format!("k={}, kappa={}", f.k, f.kappa),
            Variable::K => format!("kappa={}, eps={:e}", f.kappa, f.eps),
        }
    }

    /// One seed per trial counter, drawn from the master seed before any work
    /// is dispatched. Trial `t` uses the same seed at every grid point, so each
    /// curve follows fixed random draws as the swept parameter moves.
    pub fn trial_seeds(&self) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.trials_per_point).map(|_| rng.next_u64()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variable: Variable,
    pub value: f64,
    pub trial: usize,
    pub seed: u64,
    pub s: usize,
    pub kappa_final: f64,
    pub c_final: f64,
    pub converged: bool,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub value: f64,
    pub mean_s: f64,
    pub min_s: usize,
    pub max_s: usize,
    pub trials: usize,
    pub nonconverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub summary: Vec<PointSummary>,
}

impl SweepResult {
    pub fn nonconverged(&self) -> usize {
        self.rows.iter().filter(|r| !r.converged).count()
    }

    pub fn summarize(spec: &SweepSpec, rows: &[SweepRow]) -> Vec<PointSummary> {
        spec.grid
            .iter()
            .filter_map(|&v| {
                let pts: Vec<&SweepRow> = rows.iter().filter(|r| r.value == v).collect();
                if pts.is_empty() {
                    return None;
                }
                let n = pts.len();
                Some(PointSummary {
                    value: v,
                    mean_s: pts.iter().map(|r| r.s as f64).sum::<f64>() / n as f64,
                    min_s: pts.iter().map(|r| r.s).min().unwrap(),
                    max_s: pts.iter().map(|r| r.s).max().unwrap(),
                    trials: n,
                    nonconverged: pts.iter().filter(|r| !r.converged).count(),
                })
            })
            .collect()
    }
}

/// One trial: a random spectrum at the grid point, solved to the point's ε.
pub fn run_trial(spec: &SweepSpec, value: f64, trial: usize, seed: u64) -> Result<SweepRow> {
    let p = spec.point(value)?;
    let model = random_spectrum(p.k, p.kappa, seed)?;
    let bits = auto_precision(p.eps, spec.fixed.precision_bits);
    let backend = SolverRegistry::default().for_precision(bits)?;
    let sol = backend.solve(&model, spec.fixed.lambda2, p.eps, spec.fixed.max_iter, None)?;
    Ok(SweepRow {
        variable: spec.variable,
        value,
        trial,
        seed,
        s: sol.iterations,
        kappa_final: sol.final_kappa(),
        c_final: sol.final_c(),
        converged: sol.converged,
        precision_bits: sol.precision_bits,
    })
}

/// Runs every (grid point, trial) pair; rows come back in canonical order
/// regardless of scheduling.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let seeds = spec.trial_seeds();
    let jobs: Vec<(f64, usize, u64)> = spec
        .grid
        .iter()
        .flat_map(|&v| seeds.iter().enumerate().map(move |(t, &seed)| (v, t, seed)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(v, t, seed)| run_trial(spec, v, t, seed))
        .collect::<Result<Vec<_>>>()?;
    let summary = SweepResult::summarize(spec, &rows);
    Ok(SweepResult { spec: spec.clone(), rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use aop_core::solve_spectral;

    fn small(variable: Variable, grid: Vec<f64>) -> SweepSpec {
        let fixed = FixedParams { k: 6, kappa: 4.0, eps: 1e-8, ..FixedParams::default() };
        SweepSpec::new(variable, grid, fixed, 3, 11)
    }

    #[test]
    fn validation() {
        assert!(small(Variable::Kappa, vec![]).validate().is_err());
        assert!(small(Variable::Kappa, vec![3.0, 2.0]).validate().is_err());
        assert!(small(Variable::Kappa, vec![1.0, 2.0]).validate().is_err());
        assert!(small(Variable::K, vec![2.5]).validate().is_err());
        assert!(small(Variable::Eps, vec![1e-8, 2.0]).validate().is_err());
        let mut s = small(Variable::Kappa, vec![2.0]);
        s.trials_per_point = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn single_point_passthrough() {
        let mut spec = small(Variable::Kappa, vec![5.0]);
        spec.trials_per_point = 1;
        let res = sweep(&spec).unwrap();
        assert_eq!(res.rows.len(), 1);
        let row = &res.rows[0];
        let model = random_spectrum(6, 5.0, row.seed).unwrap();
        let direct = solve_spectral(&model, 1.0, 1e-8, default_max_iter()).unwrap();
        assert_eq!(row.s, direct.iterations);
        assert_eq!(row.c_final, direct.final_c());
    }

    #[test]
    fn deterministic_and_ordered() {
        let spec = small(Variable::K, vec![3.0, 5.0, 8.0]);
        let a = sweep(&spec).unwrap();
        let b = sweep(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 9);
        let order: Vec<(f64, usize)> = a.rows.iter().map(|r| (r.value, r.trial)).collect();
        let mut sorted = order.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        assert_eq!(order, sorted);
        assert_eq!(a.summary.len(), 3);
        assert!(a.summary.iter().all(|p| p.min_s as f64 <= p.mean_s && p.mean_s <= p.max_s as f64));
    }

    #[test]
    fn small_eps_uses_extended_precision() {
        let res = sweep(&small(Variable::Eps, vec![1e-14])).unwrap();
        assert!(res.rows.iter().all(|r| r.precision_bits > 53 && r.converged));
    }

    #[test]
    fn nonconvergence_is_flagged() {
        let mut spec = small(Variable::Kappa, vec![8.0]);
        spec.fixed.max_iter = 2;
        let res = sweep(&spec).unwrap();
        assert_eq!(res.nonconverged(), 3);
        assert!(res.rows.iter().all(|r| r.s == 2));
    }
}
