//! End-to-end acceptance checks. Each test prints one `criterion N: PASS|FAIL`
//! line (bypassing output capture) before asserting.

use std::io::Write;
use std::time::{Duration, Instant};

use aop_cli::fit::least_squares;
use aop_cli::{fit_trend, sweep, FitForm, FixedParams, SweepResult, SweepSpec, Variable};
use aop_core::classical::{pca_init_from, update_a, update_b};
use aop_core::data::{random_matrix, DataSet};
use aop_core::linalg::singular_values_desc;
use aop_core::spectral::{c_cap, rho_param, rotation_ratio, trace_kappa};
use aop_core::{beta_init, random_spectrum, solve_spectral, spectral_update, SpectralModel};
use aop_qemu::ledger::Queries;
use aop_qemu::{
    dyxl_run, estimate_c, gamma_flag, improved_forward, improved_run, quadratic_uncompute, LedgerMode, NoiseConfig,
    NoiseMode, RhoPolicy, RunOptions,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAMBDAS: [f64; 3] = [0.25, 1.0, 4.0];

fn report(n: usize, pass: bool, detail: &str, elapsed: Duration) {
    let line = format!("criterion {n}: {} | {detail} | {:.2}s", if pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    let _ = writeln!(std::io::stderr(), "{line}");
    assert!(pass, "{line}");
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// k ≤ 64, κ ∈ [2, 32], λ₂ from the standard set.
fn random_instance(rng: &mut ChaCha8Rng) -> (SpectralModel, f64) {
    let k = rng.random_range(2..=64);
    let kappa = log_uniform(rng, 2.0, 32.0);
    let lambda2 = LAMBDAS[rng.random_range(0..3)];
    (random_spectrum(k, kappa, rng.random()).unwrap(), lambda2)
}

fn argsort(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    idx
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[test]
fn criterion_01_matrix_and_spectral_iterations_agree() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let iterations = 30;
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for _ in 0..50 {
        let k = rng.random_range(1..=8);
        let n = rng.random_range(k..=40);
        let m = rng.random_range((k + 1).max(3)..=40);
        let lambda2 = LAMBDAS[rng.random_range(0..3)];
        let lambda1 = [0.1, 0.5, 1.0][rng.random_range(0..3)];
        let neighbors = rng.random_range(1..m.min(6));
        let ds = DataSet::new(random_matrix(n, m, rng.random()), lambda1, lambda2, neighbors).unwrap();
        let scaled = ds.scale().unwrap();
        let x = scaled.normalized();
        let model = SpectralModel::from_svd(&scaled.svd, k).unwrap();

        let mut a = pca_init_from(&scaled.svd, k).unwrap();
        let mut b = update_b(&a, &x, lambda2).unwrap();
        let mut st = beta_init(k);
        for _ in 0..iterations {
            a = update_a(&b, &x).unwrap();
            b = update_b(&a, &x, lambda2).unwrap();
            st = spectral_update(&model, &st, lambda2).unwrap();
            let sv = singular_values_desc(&a).unwrap();
            for (s, beta) in sv.iter().zip(sorted_desc(&st.beta)) {
                worst = worst.max((s - beta).abs() / beta);
            }
            compared += 1;
        }
    }
    let elapsed = t0.elapsed();
    let pass = worst <= 1e-8 && elapsed < Duration::from_secs(60);
    report(1, pass, &format!("50 instances x {iterations} iterations ({compared} compared), max relative gap {worst:.2e}"), elapsed);
}

#[test]
fn criterion_02_exact_pipelines_match_the_solver() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let (mut worst, mut min_fid, mut total_s) = (0.0f64, 1.0f64, 0usize);
    for _ in 0..1000 {
        let (model, lambda2) = random_instance(&mut rng);
        let sol = solve_spectral(&model, lambda2, 1e-8, 1_000_000).unwrap();
        assert!(sol.converged);
        total_s += sol.iterations;
        for run in [dyxl_run, improved_run] {
            let r = run(&model, lambda2, sol.iterations, &NoiseConfig::exact(), &RunOptions::default()).unwrap();
            let err = r.beta_final.beta.iter().zip(&sol.state.beta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let dot: f64 = r.beta_final.beta.iter().zip(&sol.state.beta).map(|(a, b)| a * b).sum();
            worst = worst.max(err);
            min_fid = min_fid.min(r.fidelity).min(dot.abs().min(1.0));
        }
    }
    let pass = worst <= 1e-12 && min_fid >= 1.0 - 1e-12;
    report(
        2,
        pass,
        &format!("1000 instances run to convergence (mean s {}), sup-norm gap {worst:.2e}, min fidelity 1-{:.1e}", total_s / 1000, 1.0 - min_fid),
        t0.elapsed(),
    );
}

#[test]
fn criterion_03_order_is_preserved() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut violations = 0usize;
    let mut steps = 0usize;
    for _ in 0..1000 {
        let (model, lambda2) = random_instance(&mut rng);
        let mut st = spectral_update(&model, &beta_init(model.k()), lambda2).unwrap();
        let first = argsort(&st.beta);
        for _ in 0..300 {
            st = spectral_update(&model, &st, lambda2).unwrap();
            steps += 1;
            if argsort(&st.beta) != first {
                violations += 1;
            }
        }
    }
    report(3, violations == 0, &format!("1000 instances, {steps} steps, {violations} order violations"), t0.elapsed());
}

#[test]
fn criterion_04_kappa_sandwich() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let slack = 1e-12;
    let (mut side, mut mono, mut worst_final, mut worst_rec, mut n) = (0usize, 0usize, 0.0f64, 0.0f64, 0usize);
    while n < 200 {
        let (model, lambda2) = random_instance(&mut rng);
        let kappa = model.kappa();
        if lambda2 * kappa <= 1.0 {
            continue;
        }
        n += 1;
        let sol = solve_spectral(&model, lambda2, 1e-10, 10_000_000).unwrap();
        assert!(sol.converged);
        let trace = trace_kappa(&model, lambda2, sol.iterations).unwrap();
        let ks = &trace.kappa_seq;
        for (i, &ki) in ks.iter().enumerate() {
            let ok_side = if i % 2 == 0 { ki <= kappa * (1.0 + slack) } else { ki >= kappa * (1.0 - slack) };
            side += !ok_side as usize;
            if i >= 2 {
                let ok_mono = if i % 2 == 0 { ki >= ks[i - 2] * (1.0 - slack) } else { ki <= ks[i - 2] * (1.0 + slack) };
                mono += !ok_mono as usize;
            }
        }
        worst_final = worst_final.max((ks.last().unwrap() - kappa).abs());
        worst_rec = worst_rec.max(trace.recurrence_residual(lambda2, kappa));
    }
    let pass = side == 0 && mono == 0 && worst_final < 1e-6 && worst_rec <= 1e-10;
    report(
        4,
        pass,
        &format!(
            "200 instances, wrong-side {side}, non-monotone {mono}, max |k_s - k| {worst_final:.2e}, recurrence residual {worst_rec:.2e}"
        ),
        t0.elapsed(),
    );
}

#[test]
fn criterion_05_normalization_and_rotation_bounds() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    // relative allowance for rounding in the evaluated sums
    let ulp = 1e-14;
    let mut failures = [0usize; 4];
    let mut states = 0usize;
    for _ in 0..1000 {
        let (model, lambda2) = random_instance(&mut rng);
        let k = model.k();
        let kf = k as f64;
        let lower_sq = 1.0 + 2.0 * kf * lambda2 + kf * kf * lambda2 * lambda2;
        let cap = c_cap(k, lambda2, model.kappa());
        let mut st = beta_init(k);
        for _ in 0..60 {
            let prev = st.clone();
            st = spectral_update(&model, &st, lambda2).unwrap();
            states += 1;
            let c = st.last_c().unwrap();
            let hi = st.beta.iter().cloned().fold(0.0, f64::max);
            let lo = st.beta.iter().cloned().fold(f64::INFINITY, f64::min);
            failures[0] += (c * c < lower_sq * (1.0 - ulp)) as usize;
            failures[1] += (c * hi > cap * (1.0 + ulp)) as usize;
            let rho = rho_param(&model, lambda2, prev.kappa());
            let max_rot = model
                .sigma_sq()
                .iter()
                .zip(&prev.beta)
                .map(|(&s2, &b)| rho * rotation_ratio(s2, b, lambda2))
                .fold(0.0, f64::max);
            failures[2] += (max_rot > 1.0 + ulp) as usize;
            let r = 1.0 / kf.sqrt();
            let env = hi >= r * (1.0 - ulp) && hi <= 1.0 + ulp && lo <= r * (1.0 + ulp) && lo >= r / st.kappa() * (1.0 - ulp);
            failures[3] += !env as usize;
        }
    }
    let pass = failures.iter().all(|&f| f == 0);
    report(
        5,
        pass,
        &format!("{states} states; violations: c lower {}, c cap {}, rotation {}, envelopes {}", failures[0], failures[1], failures[2], failures[3]),
        t0.elapsed(),
    );
}

#[test]
fn criterion_06_probability_scaling() {
    let t0 = Instant::now();
    let lambda2 = 1.0;
    let s = 10;
    let (kappas, ks) = ([2.0, 4.0, 8.0, 16.0, 32.0], [4usize, 16, 64]);
    // run constants: the worst case of each closed-form bound over the grid
    let upper_bound = |k: usize, kappa: f64| (1.0 + 1.0 / (lambda2 * (k as f64).sqrt() * kappa * kappa)).powi(2) / 4.0;
    let lower_bound = |k: usize, kappa: f64| {
        let kf = k as f64;
        ((1.0 + kf * lambda2) * kappa * kappa / (kf.sqrt() + lambda2 * kf * kappa * kappa)).powi(2)
    };
    let grid: Vec<(usize, f64)> = ks.iter().flat_map(|&k| kappas.iter().map(move |&kap| (k, kap))).collect();
    let c_upper = grid.iter().map(|&(k, kap)| upper_bound(k, kap)).fold(0.0, f64::max);
    let c_lower = grid.iter().map(|&(k, kap)| lower_bound(k, kap)).fold(f64::INFINITY, f64::min);

    let worst_opts = RunOptions { rho_policy: RhoPolicy::WorstCase, ..RunOptions::default() };
    let (mut dyxl, mut adaptive, mut improved) = (Vec::new(), Vec::new(), Vec::new());
    for &(k, kappa) in &grid {
        let model = random_spectrum(k, kappa, 606 + k as u64).unwrap();
        let k4 = kappa.powi(4);
        let r = dyxl_run(&model, lambda2, s, &NoiseConfig::exact(), &worst_opts).unwrap();
        dyxl.push(r.p_success_history.iter().cloned().fold(0.0, f64::max) * k4);
        let r = dyxl_run(&model, lambda2, s, &NoiseConfig::exact(), &RunOptions::default()).unwrap();
        adaptive.push(r.p_success_history.iter().cloned().fold(0.0, f64::max) * k4);
        let r = improved_run(&model, lambda2, s, &NoiseConfig::exact(), &RunOptions::default()).unwrap();
        improved.push(r.p_success_history.last().unwrap() * k4);
    }
    let dmax = dyxl.iter().cloned().fold(0.0, f64::max);
    let imin = improved.iter().cloned().fold(f64::INFINITY, f64::min);
    let imax = improved.iter().cloned().fold(0.0, f64::max);
    let up_viol = dyxl.iter().filter(|&&v| v > c_upper + 0.05 * dmax).count();
    let lo_viol = improved.iter().filter(|&&v| v < c_lower - 0.05 * imin).count();
    let finite = c_upper.is_finite() && c_upper > 0.0 && c_lower.is_finite() && c_lower > 0.0;
    let amax = adaptive.iter().cloned().fold(0.0, f64::max);
    report(
        6,
        finite && up_viol == 0 && lo_viol == 0,
        &format!(
            "15 grid points; dyxl max p1*k^4 {dmax:.4} <= C_upper {c_upper:.4} ({up_viol} over); improved p(1)*k^4 in [{imin:.4}, {imax:.4}] >= C_lower {c_lower:.4} ({lo_viol} under); adaptive-rho dyxl max p1*k^4 {amax:.3e}"
        ),
        t0.elapsed(),
    );
}

#[test]
fn criterion_07_uncompute_round_trip() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let (mut worst, mut wrong, mut counts) = (0.0f64, 0usize, [0usize; 3]);
    for i in 0..1000 {
        // three strata: λ₂ ≥ 1; λ₂ < 1 with γ set; λ₂ < 1 with γ clear
        let stratum = i % 3;
        let (s2, beta, lambda2) = match stratum {
            0 => (log_uniform(&mut rng, 1e-3, 1.0), log_uniform(&mut rng, 1e-3, 1.0), log_uniform(&mut rng, 1.0, 10.0)),
            _ => {
                let lambda2 = log_uniform(&mut rng, 1e-3, 0.9);
                let s2 = rng.random_range(lambda2 * 1.05..1.0);
                let pivot = (lambda2 / s2).sqrt();
                let beta = if stratum == 1 {
                    rng.random_range(pivot * 1.01..=1.0)
                } else {
                    rng.random_range(pivot * 0.01..pivot * 0.99)
                };
                (s2, beta, lambda2)
            }
        };
        let c = log_uniform(&mut rng, 0.5, 100.0);
        let next = (s2 * beta * beta + lambda2) / (s2 * beta) / c;
        let gamma = gamma_flag(s2, beta, lambda2);
        counts[stratum] += match stratum {
            0 => (lambda2 >= 1.0 && !gamma) as usize,
            1 => gamma as usize,
            _ => !gamma as usize,
        };
        let back = quadratic_uncompute(s2, next, c, lambda2, gamma).unwrap();
        let other = lambda2 / (s2 * beta);
        worst = worst.max((back - beta).abs() / beta);
        wrong += ((back - other).abs() < (back - beta).abs()) as usize;
    }
    let pass = worst <= 1e-10 && wrong == 0 && counts.iter().all(|&c| c > 300);
    report(
        7,
        pass,
        &format!(
            "1000 triples (lambda2>=1: {}, gamma set: {}, gamma clear: {}), max relative error {worst:.2e}, wrong branch {wrong}",
            counts[0], counts[1], counts[2]
        ),
        t0.elapsed(),
    );
}

/// Mean relative β error of one emulated step from β⁽¹⁾ on a geometric spectrum.
fn one_step_error(kappa: f64, eps1: f64, eps2: f64, draws: u64) -> f64 {
    let k = 8;
    let lambda2 = 1.0;
    let ratio = (1.0 / (kappa * kappa)).powf(1.0 / (k - 1) as f64);
    let mut sigma_sq: Vec<f64> = (0..k).map(|j| ratio.powi(j as i32)).collect();
    sigma_sq[k - 1] = 1.0 / (kappa * kappa);
    let model = SpectralModel::new(sigma_sq).unwrap();
    let st = spectral_update(&model, &beta_init(k), lambda2).unwrap();
    let exact = spectral_update(&model, &st, lambda2).unwrap();
    let norm: f64 = exact.beta.iter().map(|b| b * b).sum::<f64>().sqrt();
    let cap = c_cap(k, lambda2, model.kappa());
    let total: f64 = (0..draws)
        .map(|d| {
            let mut src = NoiseConfig::new(NoiseMode::Stochastic, eps1, eps2, d).source();
            let f = improved_forward(&model, &st.beta, lambda2, &mut src).unwrap();
            let c_hat = estimate_c(f.c_true, k, cap, &mut src).unwrap();
            f.registers.iter().zip(&exact.beta).map(|(w, b)| (w / c_hat - b).powi(2)).sum::<f64>().sqrt() / norm
        })
        .sum();
    total / draws as f64
}

#[test]
fn criterion_08_error_propagation_slopes() {
    let t0 = Instant::now();
    let eps_grid = [1e-8, 1e-7, 1e-6, 1e-5, 1e-4];
    let kappas = [2.0, 4.0, 8.0, 16.0];
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, which) in [("eps1", 0), ("eps2", 1)] {
        let mut prefactors = Vec::new();
        let mut slopes = Vec::new();
        for &kappa in &kappas {
            let x: Vec<f64> = eps_grid.iter().map(|e: &f64| e.log10()).collect();
            let y: Vec<f64> = eps_grid
                .iter()
                .map(|&e| {
                    let (e1, e2) = if which == 0 { (e, 0.0) } else { (0.0, e) };
                    one_step_error(kappa, e1, e2, 400).log10()
                })
                .collect();
            let fit = least_squares(&x, &y);
            pass &= (fit.slope - 1.0).abs() <= 0.1;
            slopes.push(fit.slope);
            prefactors.push(10f64.powf(fit.intercept));
        }
        let increasing = prefactors.windows(2).all(|w| w[1] > w[0]);
        pass &= increasing;
        lines.push(format!(
            "{name}: slopes [{}], prefactors [{}]{}",
            slopes.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>().join(", "),
            prefactors.iter().map(|p| format!("{p:.3}")).collect::<Vec<_>>().join(", "),
            if increasing { "" } else { " NOT increasing" }
        ));
    }
    report(8, pass, &lines.join("; "), t0.elapsed());
}

fn counted_totals(queries: &Queries) -> f64 {
    queries.as_f64().iter().sum()
}

#[test]
fn criterion_09_ledger_laws() {
    let t0 = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;

    // counted DYXL: geometric totals
    let model = random_spectrum(6, 4.0, 909).unwrap();
    let counted = RunOptions { ledger_mode: LedgerMode::Counted, ..RunOptions::default() };
    let noise = NoiseConfig::new(NoiseMode::Stochastic, 1e-3, 1e-3, 9);
    let totals: Vec<f64> = (1..=5)
        .map(|s| {
            let r = dyxl_run(&model, 1.0, s, &noise, &counted).unwrap();
            let t = r.ledger.total;
            assert_eq!(t, counted_totals(&r.ledger.per_iteration_queries));
            t
        })
        .collect();
    let ratios: Vec<f64> = totals.windows(2).map(|w| w[1] / w[0]).collect();
    let spread = ratios.iter().map(|r| (r / ratios[0] - 1.0).abs()).fold(0.0, f64::max);
    pass &= spread <= 0.01;
    notes.push(format!("dyxl ratio {:.4e} (spread {spread:.1e})", ratios[0]));

    // counted improved: quadratic totals
    let s_max = 50;
    let totals: Vec<f64> = (1..=s_max)
        .map(|s| improved_run(&model, 1.0, s, &noise, &counted).unwrap().ledger.total)
        .collect();
    let design = DMatrix::from_fn(s_max, 3, |i, j| ((i + 1) as f64).powi(j as i32));
    let y = DVector::from_vec(totals.clone());
    let coef = (design.transpose() * &design).lu().solve(&(design.transpose() * &y)).unwrap();
    let resid = totals
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let s = (i + 1) as f64;
            ((coef[0] + coef[1] * s + coef[2] * s * s) - t).abs() / t
        })
        .fold(0.0, f64::max);
    pass &= resid < 0.01 && coef[2] > 0.0;
    notes.push(format!("improved quadratic fit c2 {:.3e}, max relative residual {resid:.1e}", coef[2]));

    // analytic totals against hand-evaluated closed forms: κ = 2, k = 4,
    // ε = 2⁻¹⁰, n = m = 32 make every logarithm an integer
    let model = SpectralModel::new(vec![1.0, 0.6, 0.5, 0.25]).unwrap();
    let opts = RunOptions { eps: 1.0 / 1024.0, n: 32, m: 32, ..RunOptions::default() };
    let (kappa, k, eps) = (2.0f64, 4.0f64, 1.0 / 1024.0);
    let log_nm = 20.0; // log₂(nm/ε)
    let log_kk = 13.0; // log₂(κk/ε)
    let g0 = 10.0 * 7.0; // log₂(1/ε)·log₂(nk)
    let step = kappa.powi(4) * k.sqrt() / eps * log_nm;
    let mut exact_hits = 0;
    for s in 1..=4usize {
        let dyxl = dyxl_run(&model, 1.0, s, &NoiseConfig::exact(), &opts).unwrap().ledger.total;
        let want = step.powi(s as i32) * g0;
        let sf = s as f64;
        let imp = improved_run(&model, 1.0, s, &NoiseConfig::exact(), &opts).unwrap().ledger.total;
        let want_imp = sf * kappa.powi(6) * k.sqrt() / eps * log_nm + sf * sf * kappa.powi(4) / eps * log_kk;
        exact_hits += (dyxl == want) as usize + (imp == want_imp) as usize;
    }
    pass &= exact_hits == 8;
    notes.push(format!("analytic closed forms reproduced exactly {exact_hits}/8"));
    report(9, pass, &notes.join("; "), t0.elapsed());
}

fn timed_sweeps(specs: &[SweepSpec]) -> (Vec<SweepResult>, Duration) {
    let t0 = Instant::now();
    let results = specs.iter().map(|s| sweep(s).unwrap()).collect();
    (results, t0.elapsed())
}

fn fixed(k: usize, kappa: f64, eps: f64) -> FixedParams {
    FixedParams { k, kappa, eps, lambda2: 1.0, ..FixedParams::default() }
}

fn all_converged(results: &[SweepResult]) -> bool {
    results.iter().all(|r| r.nonconverged() == 0 && r.rows.iter().all(|row| row.s >= 1))
}

#[test]
fn criterion_10_iteration_count_trends() {
    let limit = Duration::from_secs(600);
    let mut notes = Vec::new();
    let mut pass = true;
    let mut total = Duration::ZERO;

    let eps = SweepSpec::new(Variable::Eps, vec![1e-25, 1e-20, 1e-15, 1e-10], fixed(100, 10.0, 1e-10), 10, 1010);
    let (res, dt) = timed_sweeps(&[eps]);
    let fit = fit_trend(&res[0], FitForm::Linear).unwrap();
    let r2 = fit.linear.r_squared.unwrap_or(0.0);
    // every trial below the f64 threshold must have run in extended precision
    let bits = res[0].rows.iter().filter(|r| r.value < 1e-12).map(|r| r.precision_bits).min().unwrap();
    pass &= r2 >= 0.95 && dt < limit && all_converged(&res) && bits > 53;
    notes.push(format!(
        "eps: R^2 {r2:.4}, slope {:.1} per bit, {bits} bits below 1e-12, {:.1}s",
        fit.linear.slope,
        dt.as_secs_f64()
    ));
    total += dt;

    let k = SweepSpec::new(Variable::K, vec![25.0, 50.0, 100.0, 200.0], fixed(100, 10.0, 1e-10), 10, 1011);
    let (res, dt) = timed_sweeps(&[k]);
    let fit = fit_trend(&res[0], FitForm::Linear).unwrap();
    pass &= fit.monotone_nondecreasing && dt < limit && all_converged(&res);
    let means: Vec<String> = fit.mean_s.iter().map(|m| format!("{m:.0}")).collect();
    notes.push(format!("k: mean s [{}] monotone {}, {:.1}s", means.join(", "), fit.monotone_nondecreasing, dt.as_secs_f64()));
    total += dt;

    let kappa_specs: Vec<SweepSpec> = [40, 80, 120, 160]
        .iter()
        .map(|&k| SweepSpec::new(Variable::Kappa, vec![10.0, 20.0, 40.0, 80.0, 160.0], fixed(k, 10.0, 1e-20), 10, 1012))
        .collect();
    // one sweep per k family, each held to the time limit
    let mut flags = Vec::new();
    let mut times = Vec::new();
    for spec in &kappa_specs {
        let (res, dt) = timed_sweeps(std::slice::from_ref(spec));
        let fit = fit_trend(&res[0], FitForm::Superlinear).unwrap();
        let inc = fit.increasing_differences.unwrap();
        pass &= inc && dt < limit && all_converged(&res);
        flags.push(format!("k={}:{}", spec.fixed.k, inc));
        times.push(format!("{:.1}s", dt.as_secs_f64()));
        total += dt;
    }
    notes.push(format!("kappa: increasing divided differences [{}], times [{}]", flags.join(" "), times.join(" ")));

    report(10, pass, &notes.join("; "), total);
}
