use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use itrp_core::fixtures::{nonconvex_qp, random_trs_instance};
use itrp_core::numerics::Matrix;
use itrp_core::oracle::{
    default_oracle_fixtures, fd_gradient_check, grid_minimize, run_oracle_suite, trs_multistart, trs_oracle_with_grid,
    OracleFixture, SuiteOptions,
};
use itrp_core::problem::{Objective, Quadratic, SmoothnessClass};

/// `½‖x‖²` reporting `2x` as its gradient.
#[derive(Debug)]
struct WrongGradient;

impl Objective<f64> for WrongGradient {
    fn dim(&self) -> usize {
        3
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| 2.0 * v).collect()
    }

    fn hessian(&self, _x: &[f64]) -> Option<Matrix<f64>> {
        None
    }

    fn class(&self) -> SmoothnessClass {
        SmoothnessClass::FirstOrderOnly
    }
}

fn quick() -> SuiteOptions {
    SuiteOptions {
        trials: 200,
        fd_points: 20,
        trs_instances: 40,
        trs_grid_points: 100_000,
        cross_instances: 5,
        cross_samples: 20_000,
        ..SuiteOptions::default()
    }
}

#[test]
fn default_suite_passes() {
    let reports = run_oracle_suite(&default_oracle_fixtures(1), quick()).unwrap();
    for r in &reports {
        assert!(r.pass, "{r:?}");
    }
    assert!(reports.iter().any(|r| r.name == "trs_vs_oracle"));
}

#[test]
fn wrong_gradient_is_caught() {
    let fixtures = vec![OracleFixture::new("wrong", Box::new(WrongGradient))];
    let reports = run_oracle_suite(&fixtures, quick()).unwrap();
    let fd = reports.iter().find(|r| r.name == "fd_gradient:wrong").unwrap();
    assert!(!fd.pass);
    let single = fd_gradient_check(&WrongGradient, &[1.0, 2.0, 3.0], 1e-6).unwrap();
    assert!((single.max_abs_error - 3.0).abs() < 1e-6);
}

#[test]
fn oracle_agrees_with_multistart() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let (g, h, beta) = random_trs_instance(5, false, &mut rng);
        let (a, _) = trs_oracle_with_grid(&g, &h, beta, 100_000).unwrap();
        let (b, _) = trs_multistart(&g, &h, beta, 20_000, &mut rng).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn hard_case_oracle_reaches_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let (g, h, beta) = random_trs_instance(4, true, &mut rng);
        let (_, u) = trs_oracle_with_grid(&g, &h, beta, 100_000).unwrap();
        let nu = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((nu - beta).abs() < 1e-9);
    }
}

#[test]
fn grid_bounds_the_nonconvex_minimum() {
    let r = grid_minimize(&nonconvex_qp(), 1e-3).unwrap();
    assert!((r.f_min + 0.5).abs() < 1e-12);
    assert!(r.lower_bound <= -0.5);
    let f = Quadratic::new(Matrix::identity(2), vec![0.0, 0.0]).unwrap();
    assert!(f.value(&r.x_min) >= 0.0);
}
