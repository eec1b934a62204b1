use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use aop_cli::emit::{self, create_file};
use aop_cli::{fit_trend, sweep, FitForm, FitReport, SpecFile, SweepResult, Variable};
use aop_core::classical::solve_classical;
use aop_core::data::InstanceDescriptor;
use aop_core::solver::{auto_precision, IterationRecord, PRECISION_ENV};
use aop_core::{random_spectrum, SolverRegistry};
use aop_qemu::{
    cost_compare, AmplificationPolicy, CostParams, LedgerMode, NoiseConfig, NoiseMode, PipelineRegistry, RhoPolicy,
    RunOptions,
};
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "aop", version, about = "A-optimal projection workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Matrix-space alternating solver on a data instance.
    SolveClassical {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scalar iteration on a random spectrum.
    SolveSpectral {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda2: f64,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        /// Mantissa bits; widened automatically below ε = 1e-12.
        #[arg(long, env = PRECISION_ENV)]
        precision: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50_000_000)]
        max_iter: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emulates one of the quantum pipelines for s steps.
    Emulate {
        #[arg(long, default_value = "improved")]
        algo: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda2: f64,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0.0)]
        eps1: f64,
        #[arg(long, default_value_t = 0.0)]
        eps2: f64,
        #[arg(long, default_value = "exact")]
        mode: NoiseMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "analytic")]
        ledger: LedgerMode,
        #[arg(long, default_value = "bound")]
        amplification: AmplificationPolicy,
        #[arg(long, default_value = "adaptive")]
        rho: RhoPolicy,
        /// Cost-model precision ε.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 1024)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        polylog_exp: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Iteration-count sweeps from a JSON spec (one spec or a list).
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        plot: bool,
    },
    /// Analytic cost of both pipelines for s = 1..=s_max.
    Cost {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        s_max: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Outcome {
    Done,
    NotConverged(String),
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<Outcome> {
    match cmd {
        Command::SolveClassical { instance, k, tol, max_iter, out } => {
            let desc = InstanceDescriptor::from_json_file(&instance)?;
            let base = instance.parent().unwrap_or(Path::new("."));
            let ds = desc.load(base)?;
            let res = solve_classical(&ds, k, tol, max_iter)?;
            let it = &res.iterate;
            let mut header = vec!["iteration".to_string(), "objective_eq1".into(), "objective_eq3".into()];
            header.extend((0..k).map(|j| format!("beta_{j}")));
            let rows = (0..it.beta_history.len()).map(|i| {
                let mut r = vec![i.to_string(), it.objective_eq1_history[i].to_string(), it.objective_history[i].to_string()];
                r.extend(it.beta_history[i].iter().map(f64::to_string));
                r
            });
            write_table(&out, &header, rows)?;
            println!("classical: {} iterations, converged={}, last change {:e}", it.iteration, res.converged, res.last_change);
            Ok(if res.converged {
                Outcome::Done
            } else {
                Outcome::NotConverged(format!("classical solver stopped after {max_iter} iterations"))
            })
        }
        Command::SolveSpectral { k, kappa, lambda2, eps, precision, seed, max_iter, out } => {
            let model = random_spectrum(k, kappa, seed)?;
            let bits = auto_precision(eps, precision);
            let backend = SolverRegistry::default().for_precision(bits)?;
            let mut records: Vec<IterationRecord> = Vec::new();
            let mut obs = |r: &IterationRecord| records.push(r.clone());
            let sol = backend.solve(&model, lambda2, eps, max_iter, Some(&mut obs))?;
            let mut header = vec!["iteration".to_string(), "c_i".into(), "kappa_i".into()];
            header.extend((0..k).map(|j| format!("beta_{j}")));
            let rows = records.iter().map(|r| {
                let mut row = vec![r.iteration.to_string(), r.c.to_string(), r.kappa.to_string()];
                row.extend(r.beta.iter().map(f64::to_string));
                row
            });
            write_table(&out, &header, rows)?;
            println!(
                "spectral: s={} converged={} kappa_final={} backend={} ({} bits)",
                sol.iterations,
                sol.converged,
                sol.final_kappa(),
                sol.backend,
                sol.precision_bits
            );
            Ok(if sol.converged {
                Outcome::Done
            } else {
                Outcome::NotConverged(format!("spectral solver stopped after {max_iter} iterations"))
            })
        }
        Command::Emulate {
            algo,
            k,
            kappa,
            lambda2,
            s,
            eps1,
            eps2,
            mode,
            seed,
            ledger,
            amplification,
            rho,
            eps,
            n,
            m,
            polylog_exp,
            out,
        } => {
            let model = random_spectrum(k, kappa, seed)?;
            let noise = NoiseConfig { eps1, eps2, mode, seed, ..NoiseConfig::default() };
            let opts = RunOptions {
                ledger_mode: ledger,
                amplification,
                rho_policy: rho,
                eps,
                n,
                m,
                polylog_exponent: polylog_exp,
                g0: None,
            };
            let registry = PipelineRegistry::default();
            let res = registry.get(&algo)?.run(&model, lambda2, s, &noise, &opts)?;
            emit::write_json(&out, &res)?;
            println!("{}: fidelity={} p_success={:?}", res.algorithm, res.fidelity, res.p_success_history.last());
            Ok(Outcome::Done)
        }
        Command::Sweep { spec, out_dir, plot } => run_sweeps(&spec, &out_dir, plot),
        Command::Cost { params, s_max, out } => {
            if s_max == 0 {
                bail!("--s-max must be at least 1");
            }
            let params: CostParams = emit::read_json(&params)?;
            let table = cost_compare(&params, 1..=s_max)?;
            emit::write_cost_csv(&out, &table)?;
            match table.crossover {
                Some(s) => println!("improved pipeline is cheaper from s = {s}"),
                None => println!("no crossover for s <= {s_max}"),
            }
            Ok(Outcome::Done)
        }
    }
}

fn write_table(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create_file(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Serialize)]
struct SweepReport<'a> {
    csv: String,
    result: &'a SweepResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<FitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    superlinear: Option<FitReport>,
}

fn run_sweeps(spec_path: &Path, out_dir: &Path, plot: bool) -> anyhow::Result<Outcome> {
    let specs = emit::read_json::<SpecFile>(spec_path)?.into_specs();
    if specs.is_empty() {
        bail!("{} holds no sweep specs", spec_path.display());
    }
    let mut results = Vec::with_capacity(specs.len());
    let mut reports = Vec::with_capacity(specs.len());
    let mut nonconverged = 0;
    for (i, spec) in specs.iter().enumerate() {
        let res = sweep(spec).with_context(|| format!("sweep #{i} ({})", spec.label()))?;
        let name = format!("sweep-{i:02}-{}.csv", spec.variable);
        emit::write_sweep_csv(&out_dir.join(&name), &res.rows)?;
        nonconverged += res.nonconverged();
        for p in &res.summary {
            let value = if spec.variable == Variable::Eps { format!("{:e}", p.value) } else { p.value.to_string() };
            println!("{} | {}={value}: mean s {:.1} [{}, {}]", spec.label(), spec.variable, p.mean_s, p.min_s, p.max_s);
        }
        results.push(res);
        reports.push(name);
    }
    let json: Vec<SweepReport> = results
        .iter()
        .zip(reports)
        .map(|(r, csv)| {
            let fit = fit_trend(r, FitForm::Linear).ok();
            let superlinear =
                (r.spec.variable == Variable::Kappa).then(|| fit_trend(r, FitForm::Superlinear).ok()).flatten();
            SweepReport { csv, result: r, fit, superlinear }
        })
        .collect();
    emit::write_json(&out_dir.join("summary.json"), &json)?;
    if plot {
        for v in [Variable::Kappa, Variable::Eps, Variable::K] {
            let group: Vec<SweepResult> = results.iter().filter(|r| r.spec.variable == v).cloned().collect();
            if !group.is_empty() {
                emit::plot_sweeps(&out_dir.join(format!("sweep-{v}.svg")), &group)?;
            }
        }
    }
    Ok(if nonconverged > 0 {
        Outcome::NotConverged(format!("{nonconverged} trial(s) hit max_iter"))
    } else {
        Outcome::Done
    })
}
