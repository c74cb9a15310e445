use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use itrp_core::analytic_center::analytic_center;
use itrp_core::certificate::{
    certify_point, check_definition_level, check_eps_kkt, check_eps_kkt2, check_eps_kkt2_split, CertificationLevel,
    MultiplierSource,
};
use itrp_core::fixtures::{nonconvex_qp, random_constraints, random_problem, random_trs_instance, FixtureKind};
use itrp_core::itrp::{solve, solve_with_observer, Assumption, SolveResult, SolveStatus, SolverConfig};
use itrp_core::numerics::{null_space_basis, vector, Matrix};
use itrp_core::oracle::{
    default_oracle_fixtures, fd_gradient_check, fd_hessian_check, grid_minimize, log_inequality_suite,
    random_interior_point, trs_objective, trs_oracle,
};
use itrp_core::problem::{LinearConstraints, Problem, ProfileOverrides, Quadratic};
use itrp_core::subproblem::{solve_trs, verify_trs_optimality, ScaledSubproblem};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Attaches a grid lower bound to `problem`.
fn with_grid_bound(mut problem: Problem<f64>, resolution: f64) -> Result<Problem<f64>, String> {
    let g = grid_minimize(&problem, resolution).map_err(err)?;
    problem.set_lower_bound(g.lower_bound);
    Ok(problem)
}

fn budget_ok(r: &SolveResult<f64>) -> Result<(u64, usize), String> {
    let budget = r.budget.ok_or("no budget computed")?;
    let t = r.termination_index.ok_or("no termination index")?;
    ensure(t as u64 <= budget, || format!("terminated at {t} > budget {budget}"))?;
    Ok((budget, t))
}

fn feasibility_invariant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut iterates = 0usize;
    for k in 0..20 {
        let n = rng.gen_range(3..=10);
        let m = rng.gen_range(1..=4.min(n - 1));
        let kind = if k % 2 == 0 {
            FixtureKind::Quadratic
        } else {
            FixtureKind::LpRegularized { lambda: 0.5, p: 1.5 }
        };
        let p = random_problem(n, m, kind, 0.5, &mut rng).map_err(err)?;
        let cfg = SolverConfig::for_profile(p.profile().unwrap(), Assumption::A3, 0.1)
            .map_err(err)?
            .with_max_iters(2000);
        let cons = p.constraints();
        let bound = 1e-10 * (1.0 + vector::norm_inf(cons.b()));
        let mut bad: Option<String> = None;
        solve_with_observer(&p, &cfg, |t, x| {
            iterates += 1;
            let res = vector::norm_inf(&cons.residual(x).unwrap());
            if bad.is_none() && (x.iter().any(|&v| !(v > 0.0)) || res > bound) {
                bad = Some(format!(
                    "problem {k}, iterate {t}: min x {:e}, residual {res:e}",
                    vector::min(x)
                ));
            }
        })
        .map_err(err)?;
        if let Some(b) = bad {
            return Err(b);
        }
    }
    Ok(format!("{iterates} iterates checked"))
}

fn first_order_budget() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_ratio = 0.0f64;
    let mut runs = 0;
    for k in 0..10 {
        let kind = if k < 5 {
            FixtureKind::Quadratic
        } else {
            FixtureKind::LpRegularized { lambda: 0.5, p: 1.5 }
        };
        let p = with_grid_bound(random_problem(4, 2, kind, 0.5, &mut rng).map_err(err)?, 1e-3)?;
        for eps in [0.2, 0.1, 0.05] {
            let cfg = SolverConfig::for_profile(p.profile().unwrap(), Assumption::A3, eps).map_err(err)?;
            let r = solve(&p, &cfg).map_err(err)?;
            ensure(r.status == SolveStatus::CertifiedFirstOrder, || {
                format!("fixture {k}, eps {eps}: {:?}", r.status)
            })?;
            let (budget, t) = budget_ok(&r).map_err(|e| format!("fixture {k}, eps {eps}: {e}"))?;
            let cert = r.certificate.as_ref().unwrap();
            let c = check_eps_kkt(&p, &r.x_final, &cert.lambda, 2.0 * eps).map_err(err)?;
            ensure(c.passes() && 2.0 * eps - c.scaled_residual_inf >= 0.0, || {
                format!("fixture {k}, eps {eps}: output fails the 2ε check")
            })?;
            worst_ratio = worst_ratio.max(t as f64 / budget.max(1) as f64);
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, max t/t* = {worst_ratio:.2e}"))
}

fn quadratic_second_order() -> Outcome {
    let p = with_grid_bound(
        nonconvex_qp()
            .with_derived_profile(Some(1.0), Some(0.5), ProfileOverrides::default())
            .map_err(err)?,
        1e-4,
    )?;
    let mut rows = Vec::new();
    for eps in [0.1, 0.05, 0.02] {
        let cfg = SolverConfig::for_profile(p.profile().unwrap(), Assumption::Quadratic, eps).map_err(err)?;
        let r = solve(&p, &cfg).map_err(err)?;
        ensure(r.status == SolveStatus::CertifiedSecondOrder, || {
            format!("eps {eps}: {:?}", r.status)
        })?;
        let (budget, t) = budget_ok(&r).map_err(|e| format!("eps {eps}: {e}"))?;
        let c = check_eps_kkt2(&p, &r.x_final, &r.certificate.as_ref().unwrap().lambda, eps).map_err(err)?;
        ensure(c.passes(), || format!("eps {eps}: output is not ε-KKT2"))?;
        let constant = budget as f64 * eps;
        ensure((t as f64) * eps <= constant, || {
            format!("eps {eps}: t·ε = {} exceeds {constant}", t as f64 * eps)
        })?;
        rows.push(format!("ε={eps}: t={t} t*={budget}"));
    }
    Ok(rows.join(", "))
}

fn smooth_second_order() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut rows = Vec::new();
    for (assumption, p_exp) in [(Assumption::A4, 1.5), (Assumption::A5, 0.5)] {
        let kind = FixtureKind::LpRegularized { lambda: 0.5, p: p_exp };
        let p = with_grid_bound(random_problem(4, 2, kind, 0.5, &mut rng).map_err(err)?, 1e-3)?;
        for eps in [0.1, 0.05] {
            let cfg = SolverConfig::for_profile(p.profile().unwrap(), assumption, eps).map_err(err)?;
            let start = Instant::now();
            let r = solve(&p, &cfg).map_err(err)?;
            let tag = format!("{assumption:?} ε={eps}");
            ensure(r.status == SolveStatus::CertifiedSecondOrder, || {
                format!("{tag}: {:?} after {} iterations", r.status, r.iterations)
            })?;
            let (budget, t) = budget_ok(&r).map_err(|e| format!("{tag}: {e}"))?;
            let cert = r.certificate.as_ref().unwrap();
            let c = check_eps_kkt2_split(&p, &r.x_final, &cert.lambda, eps, eps.sqrt()).map_err(err)?;
            ensure(c.first.scaled_residual_inf <= eps, || {
                format!("{tag}: scaled residual {:e}", c.first.scaled_residual_inf)
            })?;
            ensure(c.reduced_min_eig >= -eps.sqrt() - 1e-9, || {
                format!("{tag}: reduced min eigenvalue {:e}", c.reduced_min_eig)
            })?;
            rows.push(format!(
                "{tag}: t={t} t*={budget:.2e} ({:.1}s)",
                start.elapsed().as_secs_f64(),
                budget = budget as f64
            ));
        }
    }
    Ok(rows.join(", "))
}

fn trs_global() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut worst_gap, mut worst_res, mut hard_count) = (f64::NEG_INFINITY, 0.0f64, 0);
    for i in 0..200 {
        let hard = i < 20;
        let (g, h, beta) = random_trs_instance(6, hard, &mut rng);
        hard_count += hard as usize;
        let sp = ScaledSubproblem::unconstrained(g.clone(), Some(h.clone()), beta).map_err(err)?;
        let sol = solve_trs(&sp, 1e-10).map_err(err)?;
        let (oracle, _) = trs_oracle(&g, &h, beta).map_err(err)?;
        let gap = trs_objective(&g, &h, &sol.d) - oracle;
        let res = verify_trs_optimality(&sp, &sol).map_err(err)?;
        let r = res.stationarity.max(-res.min_eig).max(res.complementarity);
        ensure(gap <= 1e-8 && r <= 1e-8, || {
            format!("instance {i} (hard: {hard}): gap {gap:e}, residual {r:e}")
        })?;
        worst_gap = worst_gap.max(gap);
        worst_res = worst_res.max(r);
    }
    Ok(format!(
        "200 instances ({hard_count} hard), worst gap {worst_gap:e}, worst residual {worst_res:e}"
    ))
}

fn log_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let r = log_inequality_suite(1000, &mut rng).map_err(err)?;
    ensure(r.pass, || format!("worst violation {:e}", r.max_abs_error))?;
    Ok(format!("{} samples, worst violation {:e}", r.samples, r.max_abs_error))
}

fn derivative_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let fixtures = default_oracle_fixtures(7);
    let (mut worst_g, mut worst_h) = (0.0f64, 0.0f64);
    for fx in &fixtures {
        let f = fx.objective.as_ref();
        for _ in 0..100 {
            let x: Vec<f64> = random_interior_point(f.dim(), &mut rng);
            let g = fd_gradient_check(f, &x, 1e-6).map_err(err)?;
            ensure(g.max_rel_error <= 1e-5, || {
                format!("{}: gradient error {:e}", fx.name, g.max_rel_error)
            })?;
            worst_g = worst_g.max(g.max_rel_error);
            if f.hessian(&x).is_some() {
                let h = fd_hessian_check(f, &x, 1e-6).map_err(err)?;
                ensure(h.max_rel_error <= 1e-4, || {
                    format!("{}: Hessian error {:e}", fx.name, h.max_rel_error)
                })?;
                worst_h = worst_h.max(h.max_rel_error);
            }
        }
    }
    Ok(format!(
        "{} objectives, worst gradient {worst_g:e}, worst Hessian {worst_h:e}",
        fixtures.len()
    ))
}

fn analytic_centers() -> Outcome {
    let tol = 1e-12;
    for n in [2, 3, 5, 10] {
        let c = analytic_center(&LinearConstraints::simplex(n).map_err(err)?, tol).map_err(err)?;
        let dev = c.x0.iter().map(|v| (v - 1.0 / n as f64).abs()).fold(0.0, f64::max);
        ensure(dev <= 1e-8, || format!("simplex n={n}: deviation {dev:e}"))?;
    }
    let a = Matrix::from_rows(&[vec![1.0, 2.0]], 2).map_err(err)?;
    let c = analytic_center(&LinearConstraints::new(a, vec![1.0]).map_err(err)?, tol).map_err(err)?;
    let dev = (c.x0[0] - 0.5).abs().max((c.x0[1] - 0.25).abs());
    ensure(dev <= 1e-8, || format!("x1 + 2x2 = 1: deviation {dev:e}"))?;
    Ok("simplex n ∈ {2,3,5,10} and x1 + 2x2 = 1".into())
}

/// Constraints whose second row repeats the first, so `Aᵀw = 0` has nonzero
/// solutions.
fn redundant_problem(rng: &mut ChaCha8Rng) -> Problem<f64> {
    let base = random_constraints(4, 2, rng);
    let a0 = base.a();
    let rows = vec![a0.row(0).to_vec(), a0.row(1).to_vec(), a0.row(0).to_vec()];
    let a = Matrix::from_rows(&rows, 4).unwrap();
    let b = vec![base.b()[0], base.b()[1], base.b()[0]];
    let f = itrp_core::fixtures::random_quadratic_objective(4, rng);
    Problem::new(Box::new(f), LinearConstraints::new(a, b).unwrap()).unwrap()
}

fn certificate_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut passing = 0usize;
    let mut checked = 0usize;
    // solver outputs and random points with estimated multipliers
    for k in 0..30 {
        let p = if k % 3 == 0 {
            nonconvex_qp()
        } else {
            random_problem(4, 2, FixtureKind::Quadratic, 0.5, &mut rng).map_err(err)?
        };
        let center = analytic_center(p.constraints(), 1e-10).map_err(err)?;
        let z = null_space_basis(p.constraints().a(), 1e-12).map_err(err)?;
        for _ in 0..20 {
            let mut x = center.x0.clone();
            let u: Vec<f64> = (0..z.cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dir = z.matvec(&u).unwrap();
            let room = x
                .iter()
                .zip(&dir)
                .filter(|(_, d)| **d < 0.0)
                .map(|(xi, d)| -xi / d)
                .fold(f64::INFINITY, f64::min);
            let t = rng.gen::<f64>() * room.min(10.0) * 0.999;
            vector::axpy(t, &dir, &mut x);
            let lambda = itrp_core::certificate::estimate_multipliers(&p, &x).map_err(err)?;
            let eps = 10f64.powf(rng.gen_range(-2.0..1.0));
            let so = check_eps_kkt2(&p, &x, &lambda, eps).map_err(err)?;
            checked += 1;
            if so.passes() {
                passing += 1;
                let def =
                    check_definition_level(&p, &x, &lambda, &so.first.s, Some(&so.theta), eps, eps).map_err(err)?;
                ensure(def.passes(), || {
                    format!("point passes the scaled check but not the definition: {def:?}")
                })?;
            }
        }
    }
    ensure(passing > 0, || "no passing points sampled".into())?;

    // multiplier perturbations along null(Aᵀ)
    let p = redundant_problem(&mut rng);
    let w_basis = null_space_basis(&p.constraints().a().transpose(), 1e-12).map_err(err)?;
    ensure(w_basis.cols() > 0, || "Aᵀ has trivial null space".into())?;
    let x = analytic_center(p.constraints(), 1e-10).map_err(err)?.x0;
    let lambda = itrp_core::certificate::estimate_multipliers(&p, &x).map_err(err)?;
    let base = certify_point(
        &p,
        &x,
        &lambda,
        CertificationLevel::second_order(0.1, 0.1),
        MultiplierSource::Supplied,
    )
    .map_err(err)?;
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let u: Vec<f64> = (0..w_basis.cols()).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let w = w_basis.matvec(&u).unwrap();
        let l2 = vector::add(&lambda, &w);
        let c = certify_point(
            &p,
            &x,
            &l2,
            CertificationLevel::second_order(0.1, 0.1),
            MultiplierSource::Supplied,
        )
        .map_err(err)?;
        for (name, clause) in &base.clauses {
            let other = c.clauses.get(name).ok_or("clause missing")?;
            worst = worst.max((clause.slack - other.slack).abs());
            ensure(clause.pass == other.pass, || format!("clause {name} flipped"))?;
        }
        worst = worst.max((base.scaled_residual_inf - c.scaled_residual_inf).abs());
    }
    ensure(worst <= 1e-12, || format!("residuals moved by {worst:e}"))?;
    Ok(format!(
        "{passing}/{checked} sampled points certified, all sound; 500 perturbations moved residuals by ≤ {worst:e}"
    ))
}

fn negative_controls() -> Outcome {
    let simplex = LinearConstraints::simplex(2).map_err(err)?;
    let linear = |c: Vec<f64>| {
        Problem::new(
            Box::new(Quadratic::new(Matrix::zeros(2, 2), c).unwrap()),
            simplex.clone(),
        )
        .unwrap()
    };

    // non-stationary: f = x1 - x2 at the midpoint, any multiplier
    let p = linear(vec![1.0, -1.0]);
    for lambda in [-2.0, -0.5, 0.0, 0.5, 2.0] {
        let c = check_eps_kkt(&p, &[0.5, 0.5], &[lambda], 0.1).map_err(err)?;
        let expect = 0.5 * f64::max((1.0 + lambda).abs(), (lambda - 1.0).abs());
        ensure(!c.passes(), || format!("λ={lambda}: non-stationary point accepted"))?;
        ensure((c.scaled_residual_inf - expect).abs() < 1e-15, || {
            format!(
                "λ={lambda}: reported residual {} expected {expect}",
                c.scaled_residual_inf
            )
        })?;
        let cert = certify_point(
            &p,
            &[0.5, 0.5],
            &[lambda],
            CertificationLevel::first_order(0.1),
            MultiplierSource::Supplied,
        )
        .map_err(err)?;
        let slack = cert.clauses["scaled_stationarity"].slack;
        ensure(!cert.passed && (slack - (0.1 - expect)).abs() < 1e-15, || {
            format!("λ={lambda}: stationarity slack {slack}")
        })?;
    }

    // sign violation: f = -x1 near the vertex (0, 1) with λ = 0
    let p = linear(vec![-1.0, 0.0]);
    let x = [1e-3, 1.0 - 1e-3];
    let cert = certify_point(
        &p,
        &x,
        &[0.0],
        CertificationLevel::first_order(0.1),
        MultiplierSource::Supplied,
    )
    .map_err(err)?;
    ensure(cert.clauses["scaled_stationarity"].pass, || {
        "stationarity should hold".into()
    })?;
    let sign = cert.clauses["scaled_sign"];
    ensure(!cert.passed && !sign.pass && (sign.slack + 0.9).abs() < 1e-15, || {
        format!("sign clause {sign:?}")
    })?;

    // tiny iteration limits
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let qp = nonconvex_qp()
        .with_derived_profile(Some(1.0), Some(0.5), ProfileOverrides::default())
        .map_err(err)?;
    let rand_p = random_problem(5, 2, FixtureKind::Quadratic, 0.5, &mut rng).map_err(err)?;
    for (p, assumption) in [
        (&qp, Assumption::Quadratic),
        (&rand_p, Assumption::A3),
        (&rand_p, Assumption::A4),
    ] {
        for iters in [1, 2] {
            let cfg = SolverConfig::for_profile(p.profile().unwrap(), assumption, 0.02)
                .map_err(err)?
                .with_max_iters(iters);
            let r = solve(p, &cfg).map_err(err)?;
            ensure(
                r.status == SolveStatus::BudgetExhausted && r.certificate.is_none(),
                || format!("{assumption:?} with max_iters {iters}: {:?}", r.status),
            )?;
        }
    }
    Ok("non-stationary and sign-violating points rejected; tiny limits exhaust".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("feasibility invariant", feasibility_invariant),
        ("first-order budget compliance", first_order_budget),
        ("quadratic second-order end-to-end", quadratic_second_order),
        ("smooth second-order outputs", smooth_second_order),
        ("trust-region global optimality", trs_global),
        ("logarithmic inequality", log_inequality),
        ("derivative oracles", derivative_oracles),
        ("analytic center", analytic_centers),
        ("certificate soundness", certificate_soundness),
        ("negative controls", negative_controls),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(e) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {e} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
