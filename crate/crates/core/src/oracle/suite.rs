use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    fd_gradient_check, fd_hessian_check, log_inequality_suite, random_interior_point, trs_multistart, trs_objective,
    trs_oracle_with_grid, OracleReport,
};
use crate::error::Result;
use crate::fixtures::{random_quadratic_objective, random_trs_instance};
use crate::numerics::Matrix;
use crate::problem::{zero_objective, LpRegularized, Objective, Quadratic};
use crate::subproblem::{solve_trs, verify_trs_optimality, ScaledSubproblem};

/// An objective whose derivatives the suite checks.
#[derive(Debug)]
pub struct OracleFixture {
    pub name: String,
    pub objective: Box<dyn Objective<f64>>,
}

impl OracleFixture {
    pub fn new(name: impl Into<String>, objective: Box<dyn Objective<f64>>) -> Self {
        Self {
            name: name.into(),
            objective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Samples for the logarithmic inequality.
    pub trials: usize,
    /// Random interior points per derivative check.
    pub fd_points: usize,
    /// Random trust-region instances (a tenth of them in the hard case).
    pub trs_instances: usize,
    pub trs_grid_points: usize,
    /// Instances for the oracle-vs-multistart agreement check.
    pub cross_instances: usize,
    pub cross_samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 1000,
            fd_points: 100,
            trs_instances: 200,
            trs_grid_points: super::TRS_GRID_POINTS,
            cross_instances: 100,
            cross_samples: 100_000,
        }
    }
}

/// Every built-in family on a few dimensions.
pub fn default_oracle_fixtures(seed: u64) -> Vec<OracleFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quad = |rng: &mut ChaCha8Rng, n| -> Box<dyn Objective<f64>> { Box::new(random_quadratic_objective(n, rng)) };
    let mut out = vec![
        OracleFixture::new("zero", Box::new(zero_objective::<f64>(3))),
        OracleFixture::new("quadratic_4", quad(&mut rng, 4)),
        OracleFixture::new(
            "saddle_2",
            Box::new(Quadratic::new(Matrix::from_diag(&[1.0, -1.0]), vec![0.0, 0.0]).expect("valid")),
        ),
    ];
    for (p, lambda) in [(0.5, 1.0), (1.5, 0.7)] {
        out.push(OracleFixture::new(
            format!("lp_{p}_pure"),
            Box::new(LpRegularized::new(Box::new(zero_objective::<f64>(3)), lambda, p).expect("valid")),
        ));
        let smooth = quad(&mut rng, 4);
        out.push(OracleFixture::new(
            format!("lp_{p}_quadratic"),
            Box::new(LpRegularized::new(smooth, lambda, p).expect("valid")),
        ));
    }
    out
}

/// Runs the derivative checks on `fixtures`, the logarithmic inequality,
/// the trust-region solver against the brute-force oracle, and the oracle
/// against multistart sampling.
pub fn run_oracle_suite(fixtures: &[OracleFixture], opts: SuiteOptions) -> Result<Vec<OracleReport<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut reports = Vec::new();
    let h = 1e-6;
    for fx in fixtures {
        let n = fx.objective.dim();
        let mut grads = Vec::new();
        let mut hess = Vec::new();
        for _ in 0..opts.fd_points {
            let x: Vec<f64> = random_interior_point(n, &mut rng);
            grads.push(fd_gradient_check(fx.objective.as_ref(), &x, h)?);
            if fx.objective.hessian(&x).is_some() {
                hess.push(fd_hessian_check(fx.objective.as_ref(), &x, h)?);
            }
        }
        reports.push(OracleReport::merge(format!("fd_gradient:{}", fx.name), &grads));
        if !hess.is_empty() {
            reports.push(OracleReport::merge(format!("fd_hessian:{}", fx.name), &hess));
        }
    }

    reports.push(log_inequality_suite(opts.trials, &mut rng)?);

    let (mut worst_gap, mut worst_res) = (0.0f64, 0.0f64);
    for i in 0..opts.trs_instances {
        let hard = i % 10 == 0;
        let (g, hm, beta) = random_trs_instance(6, hard, &mut rng);
        let sp = ScaledSubproblem::unconstrained(g.clone(), Some(hm.clone()), beta)?;
        let sol = solve_trs(&sp, 1e-10)?;
        let (oracle_val, _) = trs_oracle_with_grid(&g, &hm, beta, opts.trs_grid_points)?;
        worst_gap = worst_gap.max(trs_objective(&g, &hm, &sol.d) - oracle_val);
        let r = verify_trs_optimality(&sp, &sol)?;
        worst_res = worst_res.max(r.stationarity).max(-r.min_eig).max(r.complementarity);
    }
    let worst = worst_gap.max(worst_res);
    reports.push(OracleReport::from_errors(
        "trs_vs_oracle",
        worst,
        worst,
        opts.trs_instances,
        1e-8,
    ));

    let mut worst_cross = 0.0f64;
    for _ in 0..opts.cross_instances {
        let (g, hm, beta) = random_trs_instance(5, false, &mut rng);
        let (a, _) = trs_oracle_with_grid(&g, &hm, beta, opts.trs_grid_points)?;
        let (b, _) = trs_multistart(&g, &hm, beta, opts.cross_samples, &mut rng)?;
        worst_cross = worst_cross.max((a - b).abs());
    }
    reports.push(OracleReport::from_errors(
        "trs_oracle_vs_multistart",
        worst_cross,
        worst_cross,
        opts.cross_instances,
        1e-6,
    ));
    Ok(reports)
}
