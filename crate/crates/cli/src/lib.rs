//! Experiment harness for the A-optimal projection workbench: iteration-count
//! sweeps over random spectra, trend fits, and CSV/JSON/SVG emission.

pub mod emit;
pub mod error;
pub mod fit;
pub mod sweep;

pub use error::{CliError, Result};
pub use fit::{fit_trend, FitForm, FitReport};
pub use sweep::{sweep, FixedParams, SweepResult, SweepRow, SweepSpec, Variable};

/// Sweep spec files hold either one spec or a list of them.
#[derive(Debug, Clone, serde::Deserialize)]
#[serde(untagged)]
pub enum SpecFile {
    One(SweepSpec),
    Many(Vec<SweepSpec>),
}

impl SpecFile {
    pub fn into_specs(self) -> Vec<SweepSpec> {
        match self {
            SpecFile::One(s) => vec![s],
            SpecFile::Many(v) => v,
        }
    }
}
