use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AopError, Result};
use crate::svd::{SvdTriplets, RANK_TOL_SQ};

/// The k retained squared singular values of the normalized `X̃`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    sigma_sq: Vec<f64>,
    kappa: f64,
}

impl SpectralModel {
    /// Validates `1 = σ₀² ≥ σ₁² ≥ … ≥ σ²_{k−1} > 0` and derives κ = 1/σ_{k−1}.
    pub fn new(sigma_sq: Vec<f64>) -> Result<Self> {
        if sigma_sq.is_empty() {
            return Err(AopError::invalid("spectral model needs at least one component"));
        }
        if sigma_sq[0] != 1.0 {
            return Err(AopError::invalid(format!(
                "leading squared singular value must be 1, got {}",
                sigma_sq[0]
            )));
        }
        if let Some(w) = sigma_sq.windows(2).find(|w| !(w[1] <= w[0])) {
            return Err(AopError::invalid(format!(
                "squared singular values must be nonincreasing: {} then {}",
                w[0], w[1]
            )));
        }
        let last = *sigma_sq.last().unwrap();
        if !(last >= RANK_TOL_SQ) {
            return Err(AopError::RankDeficient {
                requested: sigma_sq.len(),
                available: sigma_sq.iter().filter(|&&s| s >= RANK_TOL_SQ).count(),
            });
        }
        let kappa = 1.0 / last.sqrt();
        Ok(SpectralModel { sigma_sq, kappa })
    }

    /// Keeps the leading `k` components of a normalized SVD.
    pub fn from_svd(svd: &SvdTriplets, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(AopError::invalid("k must be positive"));
        }
        if k > svd.rank {
            return Err(AopError::RankDeficient { requested: k, available: svd.rank });
        }
        let mut sigma_sq: Vec<f64> = svd.singular_values[..k].iter().map(|s| s * s).collect();
        // normalization is exact up to rounding in the division by the scale
        sigma_sq[0] = 1.0;
        Self::new(sigma_sq)
    }

    pub fn k(&self) -> usize {
        self.sigma_sq.len()
    }

    pub fn sigma_sq(&self) -> &[f64] {
        &self.sigma_sq
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// Random spectrum with pinned endpoints `σ₀² = 1`, `σ²_{k−1} = 1/κ²` and
/// interior values drawn uniformly from `(1/κ², 1)`.
pub fn random_spectrum(k: usize, kappa: f64, seed: u64) -> Result<SpectralModel> {
    if k < 2 {
        return Err(AopError::invalid(format!("random spectrum needs k >= 2, got {k}")));
    }
    if !(kappa > 1.0) || !kappa.is_finite() {
        return Err(AopError::invalid(format!("kappa must exceed 1, got {kappa}")));
    }
    let lo = 1.0 / (kappa * kappa);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut interior: Vec<f64> = (0..k - 2)
        .map(|_| loop {
            let v = rng.random_range(lo..1.0);
            if v > lo {
                break v;
            }
        })
        .collect();
    interior.sort_by(|a, b| b.total_cmp(a));

    let mut sigma_sq = Vec::with_capacity(k);
    sigma_sq.push(1.0);
    sigma_sq.extend(interior);
    sigma_sq.push(lo);
    let mut model = SpectralModel::new(sigma_sq)?;
    // keep the requested κ rather than the round trip through 1/κ²
    model.kappa = kappa;
    Ok(model)
}
