//! Trend fits over sweep summaries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::sweep::{SweepResult, Variable};

/// κ at and above which superlinear growth is tested.
pub const SUPERLINEAR_KAPPA_MIN: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitForm {
    Linear,
    Superlinear,
}

impl FromStr for FitForm {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(FitForm::Linear),
            "superlinear" | "superlinear-test" => Ok(FitForm::Superlinear),
            other => Err(CliError::InvalidSpec(format!("unknown fit form '{other}'"))),
        }
    }
}

impl fmt::Display for FitForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitForm::Linear => "linear",
            FitForm::Superlinear => "superlinear",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// `None` when the response is constant and R² is undefined.
    pub r_squared: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub form: FitForm,
    pub variable: Variable,
    /// Abscissa actually fitted (log₂(1/ε) for ε sweeps).
    pub x: Vec<f64>,
    pub mean_s: Vec<f64>,
    pub linear: LinearFit,
    pub monotone_nondecreasing: bool,
    /// Successive divided differences of mean s over the κ ≥ 20 tail.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divided_differences: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub increasing_differences: Option<bool>,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let degenerate = syy <= f64::EPSILON * my.abs().max(1.0) * n;
    let r_squared = if degenerate {
        None
    } else {
        let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        Some(1.0 - sse / syy)
    };
    LinearFit { slope: if degenerate { 0.0 } else { slope }, intercept, r_squared, degenerate }
}

pub fn divided_differences(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.windows(2).zip(y.windows(2)).map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0])).collect()
}

pub fn fit_trend(result: &SweepResult, form: FitForm) -> Result<FitReport> {
    let variable = result.spec.variable;
    let summary = &result.summary;
    if summary.len() < 3 {
        return Err(CliError::InsufficientPoints { needed: 3, got: summary.len() });
    }
    let mut pts: Vec<(f64, f64)> = summary.iter().map(|p| (variable.axis(p.value), p.mean_s)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (x, mean_s): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let linear = least_squares(&x, &mean_s);
    let monotone_nondecreasing = mean_s.windows(2).all(|w| w[1] >= w[0]);
    let (divided_differences, increasing_differences) = match form {
        FitForm::Linear => (None, None),
        FitForm::Superlinear => {
            let (tx, ty): (Vec<f64>, Vec<f64>) =
                x.iter().zip(&mean_s).filter(|(v, _)| **v >= SUPERLINEAR_KAPPA_MIN).map(|(a, b)| (*a, *b)).unzip();
            if tx.len() < 3 {
                return Err(CliError::InsufficientPoints { needed: 3, got: tx.len() });
            }
            let dd = divided_differences(&tx, &ty);
            let inc = dd.windows(2).all(|w| w[1] > w[0]);
            (Some(dd), Some(inc))
        }
    };
    Ok(FitReport { form, variable, x, mean_s, linear, monotone_nondecreasing, divided_differences, increasing_differences })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{FixedParams, PointSummary, SweepSpec};

    fn result(variable: Variable, pts: &[(f64, f64)]) -> SweepResult {
        let grid = pts.iter().map(|p| p.0).collect();
        let spec = SweepSpec::new(variable, grid, FixedParams::default(), 1, 0);
        let summary = pts
            .iter()
            .map(|&(value, s)| PointSummary { value, mean_s: s, min_s: s as usize, max_s: s as usize, trials: 1, nonconverged: 0 })
            .collect();
        SweepResult { spec, rows: vec![], summary }
    }

    #[test]
    fn exact_line() {
        let f = least_squares(&[1.0, 2.0, 3.0, 4.0], &[3.0, 5.0, 7.0, 9.0]);
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_data_is_degenerate() {
        let r = fit_trend(&result(Variable::K, &[(2.0, 7.0), (4.0, 7.0), (8.0, 7.0)]), FitForm::Linear).unwrap();
        assert_eq!(r.linear.slope, 0.0);
        assert!(r.linear.degenerate && r.linear.r_squared.is_none());
        assert!(r.monotone_nondecreasing);
    }

    #[test]
    fn eps_axis_is_log2() {
        let r = fit_trend(&result(Variable::Eps, &[(1e-4, 10.0), (1e-8, 20.0), (1e-12, 30.0)]), FitForm::Linear).unwrap();
        assert!((r.x[1] - 1e8f64.log2()).abs() < 1e-12);
        assert!((r.linear.r_squared.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn superlinear_detection() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&k| (k, k * k)).collect();
        let r = fit_trend(&result(Variable::Kappa, &pts), FitForm::Superlinear).unwrap();
        assert_eq!(r.divided_differences.as_ref().unwrap().len(), 2);
        assert_eq!(r.increasing_differences, Some(true));
        let lin: Vec<(f64, f64)> = [20.0, 40.0, 80.0].iter().map(|&k| (k, 3.0 * k)).collect();
        let r = fit_trend(&result(Variable::Kappa, &lin), FitForm::Superlinear).unwrap();
        assert_eq!(r.increasing_differences, Some(false));
    }

    #[test]
    fn too_few_points() {
        let err = fit_trend(&result(Variable::K, &[(2.0, 1.0), (3.0, 2.0)]), FitForm::Linear).unwrap_err();
        assert!(matches!(err, CliError::InsufficientPoints { needed: 3, got: 2 }));
        let err = fit_trend(&result(Variable::Kappa, &[(2.0, 1.0), (4.0, 2.0), (30.0, 9.0)]), FitForm::Superlinear);
        assert!(err.is_err());
    }
}
