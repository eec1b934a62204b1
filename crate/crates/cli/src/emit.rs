//! CSV, JSON and SVG output for sweeps and cost tables.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use aop_qemu::CostTable;
use plotters::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::sweep::{SweepResult, SweepRow, Variable};

/// Column order of sweep CSVs; the first six are stable, the rest are appended.
pub const SWEEP_COLUMNS: [&str; 9] =
    ["variable", "value", "trial", "s", "kappa_final", "c_final", "seed", "converged", "precision_bits"];

pub const COST_COLUMNS: [&str; 5] = ["s", "dyxl", "improved", "log10_dyxl", "log10_improved"];

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv { path: path.to_path_buf(), source }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn create_file(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn sweep_record(r: &SweepRow) -> [String; 9] {
    [
        r.variable.name().to_string(),
        r.value.to_string(),
        r.trial.to_string(),
        r.s.to_string(),
        r.kappa_final.to_string(),
        r.c_final.to_string(),
        r.seed.to_string(),
        r.converged.to_string(),
        r.precision_bits.to_string(),
    ]
}

/// Writes one row per trial; an empty result yields the header alone.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create_file(path)?);
    w.write_record(SWEEP_COLUMNS).map_err(csv_err(path))?;
    for r in rows {
        w.write_record(sweep_record(r)).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut rd = csv::Reader::from_path(path).map_err(csv_err(path))?;
    rd.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>().map_err(csv_err(path))
}

pub fn write_cost_csv(path: &Path, table: &CostTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(create_file(path)?);
    w.write_record(COST_COLUMNS).map_err(csv_err(path))?;
    for r in &table.rows {
        let rec = [r.s.to_string(), r.dyxl.to_string(), r.improved.to_string(), r.log10_dyxl.to_string(), r.log10_improved.to_string()];
        w.write_record(rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut f = create_file(path)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    std::io::Write::flush(&mut f).map_err(io_err(path))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(io_err(path))?;
    serde_json::from_reader(std::io::BufReader::new(f)).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

/// Mean s against the sweep variable, one curve per result. All results must
/// sweep the same variable.
pub fn plot_sweeps(path: &Path, results: &[SweepResult]) -> Result<()> {
    let plot_err = |message: String| CliError::Plot { path: path.to_path_buf(), message };
    let first = results.first().ok_or_else(|| plot_err("nothing to plot".into()))?;
    let variable: Variable = first.spec.variable;
    if results.iter().any(|r| r.spec.variable != variable) {
        return Err(plot_err("all curves must share the swept variable".into()));
    }
    let curves: Vec<(String, Vec<(f64, f64)>)> = results
        .iter()
        .map(|r| (r.spec.label(), r.summary.iter().map(|p| (variable.axis(p.value), p.mean_s)).collect()))
        .collect();
    let pts = curves.iter().flat_map(|c| c.1.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return Err(plot_err("sweep summary is empty".into()));
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let pad = 0.05 * (x1 - x0);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }

    let root = SVGBackend::new(path, (800, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(e.to_string()))?;
    let mut chart = ChartBuilder::on(&root)
        .caption("iterations to convergence", ("sans-serif", 22))
        .margin(16)
        .x_label_area_size(44)
        .y_label_area_size(60)
        .build_cartesian_2d((x0 - pad)..(x1 + pad), 0.0..(y1 * 1.1).max(1.0))
        .map_err(|e| plot_err(e.to_string()))?;
    chart
        .configure_mesh()
        .x_desc(variable.axis_label())
        .y_desc("number of iterations s")
        .draw()
        .map_err(|e| plot_err(e.to_string()))?;
    for (i, (label, data)) in curves.into_iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(data.iter().copied(), color.stroke_width(2)))
            .map_err(|e| plot_err(e.to_string()))?
            .label(label)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        chart
            .draw_series(data.iter().map(|&(x, y)| Circle::new((x, y), 3, color.filled())))
            .map_err(|e| plot_err(e.to_string()))?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| plot_err(e.to_string()))?;
    root.present().map_err(|e| plot_err(e.to_string()))
}
