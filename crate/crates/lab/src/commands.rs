//! Subcommand implementations. Each writes its tables and a JSON summary
//! into the output directory and returns the summary.

use std::path::Path;

use serde_json::{json, Value};
use spdelab_core::estimators::{
    self, ball_sups, chung_statistic, exceptional_scan, local_modulus, moment_growth, small_ball, uniform_modulus,
    FitRequirements, Ladder, Normalizer, Rect,
};
use spdelab_core::functions::Table as FnTable;
use spdelab_core::gaussian_field::OuSampler;
use spdelab_core::kpz::{KpzConfig, KpzModel, PositivityReport, MAX_EXCLUDED};
use spdelab_core::slnd::{scan_trial, summarize, validate_scan, ScanConfig};
use spdelab_core::solver::{NoiseSource, ObservationPlan, SchemeConfig, Solver};
use spdelab_core::{
    Coefficients, CovarianceOracle, EigenSystem, FieldPath, Grid, InitialData, KernelEvaluator, ScalarFn, SpaceTimePoint,
    TailModel,
};

use crate::acceptance::{self, Scale};
use crate::archive;
use crate::cli::*;
use crate::error::{LabError, Result};
use crate::io::{num, read_numeric_csv, OutDir, Table, SCHEMA_VERSION};
use crate::runner::Runner;

pub fn run(cmd: &Command, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    match cmd {
        Command::Eigen(a) => eigen(a, out),
        Command::Kernel(a) => kernel(a, out),
        Command::KernelBoundFit(a) => kernel_bound_fit(a, out),
        Command::Cov(a) => cov(a, out),
        Command::SampleW(a) => sample_w(a, runner, out),
        Command::SlndScan(a) => slnd_scan(a, runner, out),
        Command::Solve(a) => solve(a, runner, out),
        Command::Kpz(a) => kpz(a, runner, out),
        Command::Modulus(a) => modulus(a, runner, out),
        Command::Smallball(a) => smallball(a, runner, out),
        Command::Chung(a) => chung(a, runner, out),
        Command::Scan(a) => scan(a, runner, out),
        Command::Moments(a) => moments(a, runner, out),
        Command::Acceptance(a) => run_acceptance(a, runner, out),
    }
}

fn eigen(a: &EigenArgs, out: &mut OutDir) -> Result<Value> {
    let es = EigenSystem::build(a.bc.condition(), a.modes)?;
    let mut t = Table::new(&["n", "lambda", "eta", "norm_factor"]);
    for (i, m) in es.modes().iter().enumerate() {
        t.push(vec![(i + 1).to_string(), num(m.lambda), num(m.eta()), num(m.norm)]);
    }
    out.table("eigen.csv", &t)?;
    let roots = es.root_report().map(|r| {
        json!({
            "max_residual": r.residuals.iter().copied().fold(0.0, f64::max),
            "merged": r.merged,
            "scan_upper": r.scan_upper,
        })
    });
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "eigen",
        "bc": es.bc().name(),
        "length": es.length(),
        "modes": es.len(),
        "lambda": es.lambdas(),
        "growth_constant": es.growth_constant(),
        "roots": roots,
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn kernel(a: &KernelArgs, out: &mut OutDir) -> Result<Value> {
    let es = EigenSystem::build(a.bc.condition(), a.modes)?;
    let ke = KernelEvaluator::new(&es, a.tolerance)?;
    let n = ke.truncation(a.t)?;
    let xs = linspace(0.0, es.length(), a.grid_size.max(2));
    let mut t = Table::new(&["x", "y", "g"]);
    for &x in &xs {
        for &y in &xs {
            t.push_f64(&[x, y, ke.eval_fixed(a.t, x, y, n)]);
        }
    }
    out.table("kernel.csv", &t)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "kernel",
        "bc": es.bc().name(),
        "t": a.t,
        "modes_used": n,
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn kernel_bound_fit(a: &KernelBoundFitArgs, out: &mut OutDir) -> Result<Value> {
    let es = EigenSystem::build(a.bc.condition(), a.modes)?;
    let ke = KernelEvaluator::new(&es, a.tolerance)?;
    let times = parse_axis(&a.times, true)?;
    let l = es.length();
    let points: Vec<f64> = linspace(0.0, l, a.grid_size.max(2));
    let mut t = Table::new(&["t", "c_t"]);
    let mut c = 0.0f64;
    for &s in &times {
        let ct = ke.bound_constant(&[s], &points)?;
        c = c.max(ct);
        t.push_f64(&[s, ct]);
    }
    out.table("kernel_bound.csv", &t)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "kernel-bound-fit",
        "bc": es.bc().name(),
        "bound": "|G_t(x,y)| <= C min(t^-1/2, t/|x-y|^3)",
        "c": c,
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn cov(a: &CovArgs, out: &mut OutDir) -> Result<Value> {
    let es = EigenSystem::build(a.bc.condition(), a.modes)?;
    let oracle = CovarianceOracle::new(&es).with_tail(tail(a.tail))?;
    let rows = read_numeric_csv(&a.points, 4)?;
    let mut t = Table::new(&["t1", "x1", "t2", "x2", "cov", "var_increment"]);
    for r in &rows {
        let (z1, z2) = (SpaceTimePoint::new(r[0], r[1]), SpaceTimePoint::new(r[2], r[3]));
        t.push_f64(&[r[0], r[1], r[2], r[3], oracle.cov(z1, z2)?, oracle.var_increment(z1, z2)?]);
    }
    out.table("cov.csv", &t)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "cov",
        "bc": es.bc().name(),
        "modes": oracle.modes(),
        "pairs": rows.len(),
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn sample_w(a: &SampleWArgs, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    let es = EigenSystem::build(a.bc.condition(), a.modes)?;
    let grid = Grid::new(parse_axis(&a.t_grid, false)?, parse_axis(&a.x_grid, false)?)?;
    let sampler = OuSampler::new(&es, a.modes, grid)?;
    let oracle = CovarianceOracle::new(&es);
    let paths = runner.map(a.reps, |k| sampler.sample(a.seed, k as u64));
    let g = sampler.grid();
    let mut t = Table::new(&["t", "x", "mean", "var", "oracle_var", "z"]);
    let mut worst = 0.0f64;
    for i in 0..g.nt() {
        for j in 0..g.nx() {
            let vals: Vec<f64> = paths.iter().map(|p| p.value(i, j)).collect();
            let (mean, _) = estimators::mean_var(&vals);
            let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
            let (var, var_sq) = estimators::mean_var(&sq);
            let ov = oracle.var(g.point(i, j))?;
            let z = (var - ov) / (var_sq / vals.len() as f64).sqrt();
            worst = worst.max(z.abs());
            t.push_f64(&[g.times[i], g.xs[j], mean, var, ov, z]);
        }
    }
    out.table("variance.csv", &t)?;
    if a.dump {
        archive::write(&out.file("paths.spdepath"), &paths)?;
    }
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "sample-w",
        "bc": es.bc().name(),
        "reps": a.reps,
        "max_abs_z": worst,
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn slnd_scan(a: &SlndScanArgs, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    let es = EigenSystem::build(a.bc.condition(), a.modes)?;
    let oracle = CovarianceOracle::new(&es).with_tail(tail(a.tail))?;
    let r = parse_list(&a.interior)?;
    if r.len() != 4 {
        return Err(LabError::Config("--interior needs a,T,c,d".into()));
    }
    let cfg = ScanConfig {
        t_range: (r[0], r[1]),
        x_range: (r[2], r[3]),
        max_m: a.max_m,
        include_boundary: a.include_boundary,
        strict_interior: !a.no_strict_interior,
    };
    validate_scan(&oracle, &cfg, a.trials)?;
    let rows = runner.try_map(a.trials, |k| scan_trial(&oracle, &cfg, a.seed, k))?;
    let report = summarize(rows);
    let mut t = Table::new(&["trial", "m", "min_rho2", "cond_var", "ratio", "ratio_rho"]);
    for r in &report.rows {
        t.push(vec![r.trial.to_string(), r.m.to_string(), num(r.min_rho2), num(r.cond_var), num(r.ratio), num(r.ratio_rho)]);
    }
    out.table("slnd.csv", &t)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "slnd-scan",
        "bc": es.bc().name(),
        "trials": a.trials,
        "min_ratio": report.min_ratio,
        "max_ratio": report.max_ratio,
        "min_ratio_rho": report.min_ratio_rho,
        "max_ratio_rho": report.max_ratio_rho,
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn scheme(s: &SchemeArgs, length: f64) -> Result<SchemeConfig> {
    let cells = (length / s.dx).round();
    if !(cells >= 1.0) || ((cells * s.dx - length).abs() > 1e-9 * length) {
        return Err(LabError::Config(format!("dx = {} does not divide L = {length}", s.dx)));
    }
    Ok(SchemeConfig::new(s.dt, cells as usize, s.modes, s.horizon)?)
}

fn plan_for(cfg: &SchemeConfig, every: usize) -> ObservationPlan {
    let mut steps: Vec<usize> = if every == 0 { Vec::new() } else { (every..cfg.steps).step_by(every).collect() };
    steps.push(cfg.steps);
    steps.dedup();
    ObservationPlan { steps, cells: (0..cfg.cells).collect() }
}

fn solve(a: &SolveArgs, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    let bc = a.bc.condition();
    let cfg = scheme(&a.scheme, bc.length)?;
    let es = EigenSystem::build(bc, cfg.modes)?;
    let coeffs = Coefficients::new(parse_fn(&a.b, bc.length)?, parse_fn(&a.sigma, bc.length)?)?;
    let u0 = InitialData::new(&es, parse_fn(&a.u0, bc.length)?);
    let solver = Solver::new(&es, cfg, coeffs)?;
    let run = solver.prepare(&u0, &plan_for(&cfg, a.scheme.every))?;
    let paths = runner.try_map(a.scheme.reps, |k| run.run(NoiseSource::white(a.seed, k as u64)))?;
    let us: Vec<FieldPath> = paths.iter().map(|p| p.u.clone()).collect();
    let ws: Vec<FieldPath> = paths.iter().map(|p| p.w.clone()).collect();
    let mut t = Table::new(&["t", "x", "flow", "mean_u", "var_u", "mean_w", "var_w"]);
    let g = run.grid();
    for i in 0..g.nt() {
        for j in 0..g.nx() {
            let (mu, vu) = estimators::mean_var(&us.iter().map(|p| p.value(i, j)).collect::<Vec<_>>());
            let (mw, vw) = estimators::mean_var(&ws.iter().map(|p| p.value(i, j)).collect::<Vec<_>>());
            t.push_f64(&[g.times[i], g.xs[j], run.flow()[i * g.nx() + j], mu, vu, mw, vw]);
        }
    }
    out.table("moments.csv", &t)?;
    if a.dump {
        archive::write(&out.file("u.spdepath"), &us)?;
        archive::write(&out.file("w.spdepath"), &ws)?;
    }
    let min_u = paths.iter().map(|p| p.min_u).fold(f64::INFINITY, f64::min);
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "solve",
        "bc": es.bc().name(),
        "reps": a.scheme.reps,
        "steps": cfg.steps,
        "cells": cfg.cells,
        "min_u": min_u,
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn kpz(a: &KpzArgs, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    let scheme = scheme(&a.scheme, 1.0)?;
    let cfg = KpzConfig { mu: a.mu, nu: a.nu, u0: parse_fn(&a.u0, 1.0)?, scheme };
    let es = EigenSystem::build(cfg.bc(), scheme.modes)?;
    let model = KpzModel::new(&es, &cfg)?;
    let run = model.prepare(&plan_for(&scheme, a.scheme.every))?;
    let paths = runner.try_map(a.scheme.reps, |k| run.run(NoiseSource::white(a.seed, k as u64)))?;
    let report = PositivityReport::from_paths(&paths);
    let hs: Vec<&FieldPath> = paths.iter().filter_map(|p| p.h.as_ref()).collect();
    let log_flow = run.log_flow();
    let g = paths[0].w.grid.clone();
    let mut t = Table::new(&["t", "x", "log_flow", "mean_h", "var_h"]);
    for i in 0..g.nt() {
        for j in 0..g.nx() {
            let (m, v) = estimators::mean_var(&hs.iter().map(|p| p.value(i, j)).collect::<Vec<_>>());
            t.push_f64(&[g.times[i], g.xs[j], log_flow[i * g.nx() + j], m, v]);
        }
    }
    out.table("h_moments.csv", &t)?;
    if a.dump && !hs.is_empty() {
        let owned: Vec<FieldPath> = hs.iter().map(|p| (*p).clone()).collect();
        archive::write(&out.file("h.spdepath"), &owned)?;
        let ws: Vec<FieldPath> = paths.iter().map(|p| p.w.clone()).collect();
        archive::write(&out.file("w.spdepath"), &ws)?;
    }
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "kpz",
        "alpha": 0.5 - a.mu,
        "beta": a.nu - 0.5,
        "reps": a.scheme.reps,
        "excluded": report.excluded,
        "exclusion_fraction": report.fraction(),
    });
    out.json("summary.json", &summary)?;
    report.check(MAX_EXCLUDED)?;
    Ok(summary)
}

/// Paths for the statistics commands and the center's grid indices.
struct Field {
    paths: Vec<FieldPath>,
    center: (usize, usize),
}

/// Loads the archive, or samples `w` exactly on a grid reaching `reach`
/// (parabolic units) around the center.
fn field(a: &FieldArgs, reach: f64, runner: &Runner) -> Result<Field> {
    let c = parse_list(&a.center)?;
    if c.len() != 2 {
        return Err(LabError::Config("--center needs t,x".into()));
    }
    let paths = match &a.input {
        Some(p) => archive::read(p)?,
        None => {
            let es = EigenSystem::build(a.bc.condition(), a.modes)?;
            let grid = local_grid(c[0], c[1], reach, a.dt, a.dx, es.length())?;
            let sampler = OuSampler::new(&es, a.modes, grid)?;
            runner.map(a.reps, |k| sampler.sample(a.seed, k as u64))
        }
    };
    let g = &paths.first().ok_or_else(|| LabError::Config("no paths".into()))?.grid;
    let center = match (g.time_index(c[0]), g.x_index(c[1])) {
        (Some(i), Some(j)) => (i, j),
        _ => return Err(LabError::Config(format!("center ({}, {}) is not a grid point", c[0], c[1]))),
    };
    Ok(Field { paths, center })
}

/// Uniform grid through `(t0, x0)` covering the ball of radius `reach`,
/// clipped to `t > 0` and `[0, L]`.
pub fn local_grid(t0: f64, x0: f64, reach: f64, dt: f64, dx: f64, length: f64) -> Result<Grid> {
    let kt = (reach.powi(4) / dt).ceil() as i64;
    let kx = (reach * reach / dx).ceil() as i64;
    let times: Vec<f64> = (-kt..=kt).map(|k| t0 + k as f64 * dt).filter(|&t| t > 0.0).collect();
    let xs: Vec<f64> = (-kx..=kx).map(|k| x0 + k as f64 * dx).filter(|&x| (0.0..=length).contains(&x)).collect();
    Ok(Grid::new(times, xs)?)
}

fn ladder(s: &str) -> Result<Ladder> {
    Ok(Ladder::new(parse_list(s)?)?)
}

fn rect(spec: Option<&str>, g: &Grid) -> Result<Rect> {
    let Some(spec) = spec else {
        return Ok(Rect { t: (0, g.nt()), x: (0, g.nx()) });
    };
    let r = parse_list(spec)?;
    if r.len() != 4 {
        return Err(LabError::Config("--rect needs a,T,c,d".into()));
    }
    let lo = |v: &[f64], a: f64| v.partition_point(|&s| s < a - 1e-12);
    let hi = |v: &[f64], b: f64| v.partition_point(|&s| s <= b + 1e-12);
    let rect = Rect { t: (lo(&g.times, r[0]), hi(&g.times, r[1])), x: (lo(&g.xs, r[2]), hi(&g.xs, r[3])) };
    rect.check(g)?;
    Ok(rect)
}

fn per_rung_summary(name: &str, ladder: &Ladder, per_path: &[Vec<f64>], out: &mut OutDir) -> Result<Value> {
    let mut t = Table::new(&["path", "eps", "value"]);
    for (k, v) in per_path.iter().enumerate() {
        for (e, x) in ladder.rungs().iter().zip(v) {
            t.push(vec![k.to_string(), num(*e), num(*x)]);
        }
    }
    out.table(&format!("{name}.csv"), &t)?;
    let column = |r: usize| per_path.iter().map(|v| v[r]).collect::<Vec<_>>();
    let medians: Vec<f64> = (0..ladder.len()).map(|r| estimators::median(&column(r))).collect();
    let iqrs: Vec<f64> = (0..ladder.len()).map(|r| estimators::iqr(&column(r))).collect();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": name,
        "ladder": ladder.rungs(),
        "paths": per_path.len(),
        "medians": medians,
        "iqr": iqrs,
        "fits": Value::Null,
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn modulus(a: &ModulusArgs, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    let ladder = ladder(&a.ladder)?;
    let f = field(&a.field, ladder.rungs()[0], runner)?;
    let per_path = match a.kind {
        ModulusKind::Local => {
            runner.try_map(f.paths.len(), |k| local_modulus(&f.paths[k], f.center, &ladder, Normalizer::LogLog))?
        }
        ModulusKind::Uniform => {
            let r = rect(a.rect.as_deref(), &f.paths[0].grid)?;
            runner.try_map(f.paths.len(), |k| uniform_modulus(&f.paths[k], r, &ladder, &|_| 1.0))?
        }
    };
    let name = match a.kind {
        ModulusKind::Local => "local_modulus",
        ModulusKind::Uniform => "uniform_modulus",
    };
    per_rung_summary(name, &ladder, &per_path, out)
}

fn chung(a: &ChungArgs, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    let ladder = ladder(&a.ladder)?;
    let f = field(&a.field, ladder.rungs()[0], runner)?;
    let per_path = runner.try_map(f.paths.len(), |k| chung_statistic(&f.paths[k], f.center, &ladder))?;
    per_rung_summary("chung", &ladder, &per_path, out)
}

fn scan(a: &ScanArgs, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    let thetas = parse_list(&a.thetas)?;
    let f = field(&a.field, a.eps, runner)?;
    let r = rect(a.rect.as_deref(), &f.paths[0].grid)?;
    let scans = runner.try_map(f.paths.len(), |k| exceptional_scan(&f.paths[k], r, a.eps, &thetas, &|_| 1.0))?;
    let mut t = Table::new(&["path", "theta", "fraction"]);
    for (k, s) in scans.iter().enumerate() {
        for (th, fr) in s.thetas.iter().zip(&s.fractions) {
            t.push(vec![k.to_string(), num(*th), num(*fr)]);
        }
    }
    out.table("scan.csv", &t)?;
    let mean_fraction: Vec<f64> =
        (0..thetas.len()).map(|i| scans.iter().map(|s| s.fractions[i]).sum::<f64>() / scans.len() as f64).collect();
    let constants: Vec<f64> = scans.iter().map(|s| s.uniform_constant).collect();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "exceptional-scan",
        "eps": a.eps,
        "thetas": thetas,
        "mean_fraction": mean_fraction,
        "median_uniform_constant": estimators::median(&constants),
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn smallball(a: &SmallBallArgs, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    let ratios = parse_list(&a.ratios)?;
    let mut fa = a.field.clone();
    if fa.input.is_none() {
        // Grid spacing r / resolution in parabolic units.
        fa.dt = (a.r / a.resolution).powi(4);
        fa.dx = (a.r / a.resolution).powi(2);
    }
    let f = field(&fa, a.r, runner)?;
    let radius = Ladder::new(vec![a.r])?;
    let sups: Vec<f64> = runner.map(f.paths.len(), |k| ball_sups(&f.paths[k], f.center, &radius)[0]);
    let est = small_ball(&[sups], &[a.r], &ratios, FitRequirements { points: 5, span: 1.5 })?;
    let mut t = Table::new(&["r", "eps", "ratio", "hits", "m", "p", "lo", "hi"]);
    for r in &est.rows {
        t.push(vec![num(r.r), num(r.eps), num(r.ratio()), r.hits.to_string(), r.m.to_string(), num(r.p), num(r.lo), num(r.hi)]);
    }
    out.table("smallball.csv", &t)?;
    let fit = est.fit.as_ref().map(|f| json!({"slope": f.slope, "slope_se": f.slope_se, "r2": f.r2}));
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "small-ball",
        "r": a.r,
        "ratios": ratios,
        "excluded_zero": est.excluded_zero,
        "excluded_one": est.excluded_one,
        "fits": fit,
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn moments(a: &MomentsArgs, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    let bc = a.bc.condition();
    let cfg = scheme(&a.scheme, bc.length)?;
    let es = EigenSystem::build(bc, cfg.modes)?;
    let coeffs = Coefficients::new(parse_fn(&a.b, bc.length)?, parse_fn(&a.sigma, bc.length)?)?;
    let bounded = coeffs.bounded();
    let p = parse_list(&a.point)?;
    if p.len() != 2 {
        return Err(LabError::Config("--point needs t,x".into()));
    }
    let step = (p[0] / cfg.dt).round() as usize;
    let cell = ((p[1] / bc.length * cfg.cells as f64).floor() as usize).min(cfg.cells - 1);
    let ks = parse_list(&a.k)?.iter().map(|&k| k as u32).collect::<Vec<_>>();
    let solver = Solver::new(&es, cfg, coeffs)?;
    let u0 = InitialData::new(&es, parse_fn(&a.u0, bc.length)?);
    let run = solver.prepare(&u0, &ObservationPlan::new(vec![step], vec![cell])?)?;
    let values =
        runner.try_map(a.scheme.reps, |k| run.run(NoiseSource::white(a.seed, k as u64)).map(|p| p.u.values[0]))?;
    let rows = moment_growth(&values, &ks, bounded)?;
    let mut t = Table::new(&["k", "norm", "norm_over_sqrt_k"]);
    for r in &rows {
        t.push(vec![r.k.to_string(), num(r.norm), num(r.per_sqrt_k)]);
    }
    out.table("moments.csv", &t)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "statistic": "moments",
        "t": step as f64 * cfg.dt,
        "x": solver.xs()[cell],
        "reps": values.len(),
        "norms": rows.iter().map(|r| r.norm).collect::<Vec<_>>(),
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

fn run_acceptance(a: &AcceptanceArgs, runner: &Runner, out: &mut OutDir) -> Result<Value> {
    let scale = if a.quick { Scale::Quick } else { Scale::Full };
    let only = match &a.only {
        Some(s) => parse_list(s)?.iter().map(|&v| v as u8).collect(),
        None => Vec::new(),
    };
    let outcomes = acceptance::run_suite(runner, scale, a.seed, &only, &mut |o| println!("{}", o.line()));
    let summary = acceptance::write_artifacts(out, &outcomes)?;
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    if !failed.is_empty() && !a.quick {
        return Err(LabError::Numerical(format!("criteria {failed:?} failed")));
    }
    Ok(summary)
}

fn tail(t: Tail) -> TailModel {
    match t {
        Tail::Truncated => TailModel::Truncated,
        Tail::Asymptotic => TailModel::Asymptotic,
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| LabError::Config(format!("`{v}` in `{s}`: {e}"))))
        .collect()
}

/// `a:b:n` (uniform, or geometric when asked) or a comma list.
pub fn parse_axis(s: &str, geometric: bool) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let bad = || LabError::Config(format!("axis `{s}` must be a:b:n"));
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            if n < 2 || !(b > a) || (geometric && !(a > 0.0)) {
                return Err(bad());
            }
            Ok(if geometric {
                linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
            } else {
                linspace(a, b, n)
            })
        }
        [_] => parse_list(s),
        _ => Err(LabError::Config(format!("axis `{s}` must be a:b:n or a comma list"))),
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Coefficient and initial-data specs.
pub fn parse_fn(spec: &str, length: f64) -> Result<ScalarFn> {
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    let number = |a: Option<&str>| -> Result<f64> {
        a.ok_or_else(|| LabError::Config(format!("`{spec}` needs a value")))?
            .trim()
            .parse()
            .map_err(|e| LabError::Config(format!("`{spec}`: {e}")))
    };
    Ok(match head {
        "zero" => ScalarFn::Zero,
        "one" => ScalarFn::Constant(1.0),
        "identity" => ScalarFn::Identity,
        "cos" => ScalarFn::Cos,
        "sin2" => ScalarFn::SinPlus(2.0),
        "const" => ScalarFn::Constant(number(arg)?),
        "affine" => match arg {
            None => ScalarFn::Affine { slope: 0.5, intercept: 1.0 },
            Some(a) => {
                let v = parse_list(a)?;
                if v.len() != 2 {
                    return Err(LabError::Config(format!("`{spec}` must be affine:slope,intercept")));
                }
                ScalarFn::Affine { slope: v[0], intercept: v[1] }
            }
        },
        "bump" => ScalarFn::Bump { center: 0.5 * length, half_width: 0.25 * length },
        "table" => {
            let path = arg.ok_or_else(|| LabError::Config("table: needs a file".into()))?;
            let rows = read_numeric_csv(Path::new(path), 2)?;
            let (xs, ys) = rows.iter().map(|r| (r[0], r[1])).unzip();
            ScalarFn::Table(FnTable::new(xs, ys)?)
        }
        _ => return Err(LabError::Config(format!("unknown function `{spec}`"))),
    })
}
