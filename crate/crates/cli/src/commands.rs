use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use log::{info, warn};
use serde_json::Value;

use itrp_core::analytic_center::analytic_center;
use itrp_core::certificate::{certify_point, estimate_multipliers, CertificationLevel, MultiplierSource};
use itrp_core::itrp::{solve as run_solver, Assumption, Mode, SolveResult, SolverConfig};
use itrp_core::oracle::{default_oracle_fixtures, grid_minimize, run_oracle_suite, SuiteOptions};
use itrp_core::problem::{read_problem, SmoothnessClass};
use itrp_core::{Error, Problem64};

use crate::{ModeArg, ScheduleArgs};

const CERTIFIED: ExitCode = ExitCode::SUCCESS;

fn not_certified() -> ExitCode {
    ExitCode::from(1)
}

fn load(path: &Path) -> Result<Problem64> {
    read_problem(path).with_context(|| format!("cannot load problem '{}'", path.display()))
}

/// Fills in a grid lower bound when the file declares none and the feasible
/// set is small enough to enumerate.
fn ensure_lower_bound(problem: &mut Problem64, resolution: f64) -> Result<()> {
    if problem.profile().and_then(|p| p.lower_bound).is_some() {
        return Ok(());
    }
    match grid_minimize(problem, resolution) {
        Ok(g) => {
            info!(
                "grid lower bound {:e} (f_min {:e}, slack {:e})",
                g.lower_bound, g.f_min, g.slack
            );
            problem.set_lower_bound(g.lower_bound);
        }
        Err(Error::Capability(msg)) => warn!("no lower bound, budget unavailable: {msg}"),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn resolve_assumption(problem: &Problem64, args: &ScheduleArgs) -> Result<Assumption> {
    let class = problem
        .profile()
        .map(|p| p.class)
        .unwrap_or(SmoothnessClass::FirstOrderOnly);
    let assumption = match (&args.assumption, args.mode) {
        (Some(a), _) => a.parse::<Assumption>()?,
        (None, Some(ModeArg::Second)) if class == SmoothnessClass::Quadratic => Assumption::Quadratic,
        (None, Some(ModeArg::Second)) => Assumption::A4,
        (None, _) => Assumption::A3,
    };
    let wanted = match args.mode {
        Some(ModeArg::First) => Some(Mode::FirstOrder),
        Some(ModeArg::Second) => Some(Mode::SecondOrder),
        None => None,
    };
    if let Some(m) = wanted.filter(|m| *m != assumption.mode()) {
        bail!(
            "assumption {assumption:?} runs in {:?} mode, not {m:?}",
            assumption.mode()
        );
    }
    Ok(assumption)
}

fn configure(problem: &Problem64, args: &ScheduleArgs, epsilon: f64) -> Result<SolverConfig<f64>> {
    let assumption = resolve_assumption(problem, args)?;
    let profile = problem.profile().context("problem has no smoothness profile")?;
    let mut cfg = SolverConfig::for_profile(profile, assumption, epsilon)?;
    if let Some(n) = args.max_iters {
        cfg = cfg.with_max_iters(n);
    }
    if let Some(t) = args.tol {
        cfg = cfg.with_center_tol(t);
    }
    Ok(cfg)
}

fn write_trace(r: &SolveResult<f64>, path: &Path) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("cannot write '{}'", path.display()))?;
    let mut w = std::io::BufWriter::new(file);
    r.trace.write_csv(&mut w)?;
    std::io::Write::flush(&mut w)?;
    Ok(())
}

fn status_name(r: &SolveResult<f64>) -> String {
    serde_json::to_value(r.status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

pub fn solve(path: &Path, epsilon: f64, args: &ScheduleArgs, trace: &Path, cert: &Path) -> Result<ExitCode> {
    let mut problem = load(path)?;
    ensure_lower_bound(&mut problem, args.grid_resolution)?;
    let cfg = configure(&problem, args, epsilon)?;
    let r = run_solver(&problem, &cfg)?;
    write_trace(&r, trace)?;
    let residual = match &r.certificate {
        Some(c) => {
            fs::write(cert, c.to_json()).with_context(|| format!("cannot write '{}'", cert.display()))?;
            c.scaled_residual_inf
        }
        None => {
            let lambda = estimate_multipliers(&problem, &r.x_final)?;
            certify_point(
                &problem,
                &r.x_final,
                &lambda,
                cfg.certification_level(),
                MultiplierSource::Estimated,
            )?
            .scaled_residual_inf
        }
    };
    if let Some(b) = r.budget {
        info!("theoretical budget {b}, within budget: {:?}", r.within_budget());
    }
    println!("{} {} {} {:e}", status_name(&r), r.iterations, epsilon, residual);
    Ok(if r.status.is_certified() {
        CERTIFIED
    } else {
        not_certified()
    })
}

fn read_point(path: &Path, m: usize) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read '{}'", path.display()))?;
    let v: Value = serde_json::from_str(&text).context("point file is not JSON")?;
    let as_vec = |v: &Value| -> Result<Vec<f64>> { Ok(serde_json::from_value(v.clone())?) };
    match &v {
        Value::Array(_) => Ok((as_vec(&v)?, None)),
        Value::Object(o) => {
            let x = as_vec(o.get("x").context("point file has no 'x'")?)?;
            let lambda = o.get("lambda").map(as_vec).transpose()?;
            if let Some(l) = &lambda {
                if l.len() != m {
                    bail!("{} multipliers for {m} constraints", l.len());
                }
            }
            Ok((x, lambda))
        }
        _ => bail!("point file must hold an array or an object"),
    }
}

pub fn certify(
    path: &Path,
    point: &Path,
    epsilon: f64,
    curvature_epsilon: Option<f64>,
    mode: ModeArg,
    cert: &Path,
) -> Result<ExitCode> {
    let problem = load(path)?;
    let (x, lambda) = read_point(point, problem.constraints().num_constraints())?;
    if x.len() != problem.dim() {
        bail!("point has {} entries, problem has {} variables", x.len(), problem.dim());
    }
    let level = match mode {
        ModeArg::First => CertificationLevel::first_order(epsilon),
        ModeArg::Second => CertificationLevel::second_order(epsilon, curvature_epsilon.unwrap_or(epsilon)),
    };
    let (lambda, source) = match lambda {
        Some(l) => (l, MultiplierSource::Supplied),
        None => (estimate_multipliers(&problem, &x)?, MultiplierSource::Estimated),
    };
    let c = certify_point(&problem, &x, &lambda, level, source)?;
    fs::write(cert, c.to_json()).with_context(|| format!("cannot write '{}'", cert.display()))?;
    let status = if c.passed { "certified" } else { "rejected" };
    println!("{status} {} {:e}", epsilon, c.scaled_residual_inf);
    for (name, clause) in c.clauses.iter().filter(|(_, c)| !c.pass) {
        println!("  failed {name}: slack {:e}", clause.slack);
    }
    Ok(if c.passed { CERTIFIED } else { not_certified() })
}

pub fn center(path: &Path, tol: f64) -> Result<ExitCode> {
    let problem = load(path)?;
    let c = analytic_center(problem.constraints(), tol)?;
    println!("{}", serde_json::to_string_pretty(&c)?);
    Ok(CERTIFIED)
}

struct BenchRow {
    problem: String,
    epsilon: f64,
    iterations: usize,
    termination: Option<usize>,
    budget: Option<u64>,
    certified: bool,
}

impl BenchRow {
    fn within_budget(&self) -> Option<bool> {
        Some(self.termination? as u64 <= self.budget?)
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn bench(
    paths: &[PathBuf],
    sweep: &[f64],
    args: &ScheduleArgs,
    out: Option<&Path>,
    trace_dir: Option<&Path>,
) -> Result<ExitCode> {
    if sweep.is_empty() {
        bail!("epsilon sweep is empty");
    }
    let mut problems = Vec::new();
    for path in paths {
        let mut p = load(path)?;
        ensure_lower_bound(&mut p, args.grid_resolution)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let configs = sweep
            .iter()
            .map(|&eps| configure(&p, args, eps))
            .collect::<Result<Vec<_>>>()?;
        problems.push((name, p, configs));
    }
    if let Some(dir) = trace_dir {
        fs::create_dir_all(dir).with_context(|| format!("cannot create '{}'", dir.display()))?;
    }

    let rows: Vec<Result<BenchRow>> = std::thread::scope(|s| {
        let handles: Vec<_> = problems
            .iter()
            .flat_map(|(name, p, configs)| configs.iter().map(move |cfg| (name, p, cfg)))
            .map(|(name, p, cfg)| {
                s.spawn(move || -> Result<BenchRow> {
                    let r = run_solver(p, cfg)?;
                    if let Some(dir) = trace_dir {
                        let file = dir.join(format!("{name}_eps{}.csv", cfg.epsilon));
                        write_trace(&r, &file)?;
                    }
                    Ok(BenchRow {
                        problem: name.clone(),
                        epsilon: cfg.epsilon,
                        iterations: r.iterations,
                        termination: r.termination_index,
                        budget: r.budget,
                        certified: r.status.is_certified(),
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bench worker panicked"))
            .collect()
    });

    let mut csv = String::from("problem,epsilon,iterations,termination_index,budget,within_budget,certified\n");
    let mut ok = true;
    for row in rows {
        let row = row?;
        ok &= row.certified && row.within_budget() != Some(false);
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            row.problem,
            row.epsilon,
            row.iterations,
            opt(row.termination),
            opt(row.budget),
            opt(row.within_budget()),
            row.certified
        )?;
    }
    match out {
        Some(path) => fs::write(path, &csv).with_context(|| format!("cannot write '{}'", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(if ok { CERTIFIED } else { not_certified() })
}

pub fn oracle_check(
    seed: u64,
    trials: usize,
    fd_points: usize,
    trs_instances: usize,
    cross_instances: usize,
) -> Result<ExitCode> {
    let opts = SuiteOptions {
        seed,
        trials,
        fd_points,
        trs_instances,
        cross_instances,
        ..SuiteOptions::default()
    };
    let reports = run_oracle_suite(&default_oracle_fixtures(seed), opts)?;
    println!(
        "{:<32} {:>12} {:>12} {:>8}  result",
        "oracle", "max_error", "tolerance", "samples"
    );
    for r in &reports {
        println!(
            "{:<32} {:>12.3e} {:>12.1e} {:>8}  {}",
            r.name,
            r.max_rel_error,
            r.tolerance,
            r.samples,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(CERTIFIED)
    } else {
        eprintln!("failed oracles: {}", failed.join(", "));
        Ok(not_certified())
    }
}
