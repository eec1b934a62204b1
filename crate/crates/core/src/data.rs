//! Data sets, CSV matrices and JSON instance descriptors.

use std::fs::File;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AopError, Result};
use crate::graph::{graph_laplacian, knn_weights, sigma_factor};
use crate::svd::{scaled_matrix, svd, SvdTriplets};

/// Raw data (columns are points) together with the regularizers.
#[derive(Debug, Clone)]
pub struct DataSet {
    pub x: DMatrix<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Neighbourhood size of the kNN graph (not the projection dimension).
    pub neighbor_count: usize,
}

/// Everything derived from a [`DataSet`] on the way to the spectral model.
#[derive(Debug, Clone)]
pub struct ScaledData {
    pub weights: DMatrix<f64>,
    pub laplacian: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
    /// Unnormalized `X̃ = XΣ`.
    pub x_tilde: DMatrix<f64>,
    pub svd: SvdTriplets,
}

impl ScaledData {
    /// `X̃ / σ_max`, the matrix whose leading singular value is 1.
    pub fn normalized(&self) -> DMatrix<f64> {
        &self.x_tilde / self.svd.scale
    }
}

impl DataSet {
    pub fn new(x: DMatrix<f64>, lambda1: f64, lambda2: f64, neighbor_count: usize) -> Result<Self> {
        let (n, m) = x.shape();
        if n < 1 || m < 2 {
            return Err(AopError::invalid(format!("data matrix must be n>=1 by m>=2, got {n}x{m}")));
        }
        if !(lambda1 >= 0.0) {
            return Err(AopError::invalid(format!("lambda1 must be nonnegative, got {lambda1}")));
        }
        if !(lambda2 > 0.0) {
            return Err(AopError::invalid(format!("lambda2 must be positive, got {lambda2}")));
        }
        if neighbor_count == 0 || neighbor_count >= m {
            return Err(AopError::invalid(format!(
                "neighbor_count must be in 1..{m}, got {neighbor_count}"
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(AopError::NonFinite("data matrix".into()));
        }
        Ok(DataSet { x, lambda1, lambda2, neighbor_count })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn m(&self) -> usize {
        self.x.ncols()
    }

    /// kNN graph → Laplacian → Σ → `X̃` → SVD.
    pub fn scale(&self) -> Result<ScaledData> {
        let weights = knn_weights(&self.x, self.neighbor_count)?;
        let laplacian = graph_laplacian(&weights)?;
        let sigma = sigma_factor(&laplacian, self.lambda1)?;
        let x_tilde = scaled_matrix(&self.x, &sigma)?;
        let svd = svd(&x_tilde)?;
        Ok(ScaledData { weights, laplacian, sigma, x_tilde, svd })
    }
}

/// Reads a headerless, comma-separated matrix, one row per line.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let csv_err = |source| AopError::Csv { path: path.to_path_buf(), source };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|e| {
                    AopError::invalid(format!("{}: cannot parse '{f}' as a number: {e}", path.display()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(AopError::invalid(format!("{}: empty matrix", path.display())));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(AopError::invalid(format!("{}: ragged rows", path.display())));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let csv_err = |source| AopError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    for i in 0..m.nrows() {
        w.write_record(m.row(i).iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    w.flush().map_err(|source| AopError::Io { path: path.to_path_buf(), source })
}

/// Seeded synthetic data: entries uniform in `[-1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub m: usize,
}

/// JSON instance descriptor: either a CSV path or a generator, plus the
/// regularizers and the neighbourhood size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub neighbor_count: usize,
    #[serde(default)]
    pub seed: u64,
}

impl InstanceDescriptor {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| AopError::Io { path: path.to_path_buf(), source })?;
        serde_json::from_reader(file).map_err(|source| AopError::Json { path: path.to_path_buf(), source })
    }

    /// Materializes the data set; relative `x_path`s resolve against `base_dir`.
    pub fn load(&self, base_dir: &Path) -> Result<DataSet> {
        let x = match (&self.x_path, &self.generator) {
            (Some(p), None) => {
                let p = if p.is_absolute() { p.clone() } else { base_dir.join(p) };
                read_matrix_csv(&p)?
            }
            (None, Some(g)) => random_matrix(g.n, g.m, self.seed),
            _ => return Err(AopError::invalid("instance needs exactly one of x_path or generator")),
        };
        DataSet::new(x, self.lambda1, self.lambda2, self.neighbor_count)
    }
}

pub fn random_matrix(n: usize, m: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, m, |_, _| rng.random_range(-1.0..1.0))
}
