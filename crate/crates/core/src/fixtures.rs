//! Seeded random problems and subproblem instances for tests, benchmarks and
//! the oracle suite.

use rand::Rng;

use crate::error::Result;
use crate::numerics::{symmetric_eigen, Matrix};
use crate::problem::{LinearConstraints, LpRegularized, Objective, Problem, ProfileOverrides, Quadratic};

fn uniform_vec(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Symmetric `Q` with entries in `[-1, 1]` and `c` in `[-1, 1]`.
pub fn random_quadratic_objective(n: usize, rng: &mut impl Rng) -> Quadratic<f64> {
    let mut q = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-1.0..1.0);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    Quadratic::new(q, uniform_vec(n, -1.0, 1.0, rng)).expect("finite data")
}

/// Bounded constraints `Ax = b` with a strictly positive first row of `A`
/// and `b = A x̄` for some `x̄ > 0`.
pub fn random_constraints(n: usize, m: usize, rng: &mut impl Rng) -> LinearConstraints<f64> {
    assert!(m >= 1 && m <= n);
    let mut rows = vec![uniform_vec(n, 0.5, 1.5, rng)];
    for _ in 1..m {
        rows.push(uniform_vec(n, -1.0, 1.0, rng));
    }
    let a = Matrix::from_rows(&rows, n).expect("rectangular");
    let xbar = uniform_vec(n, 0.5, 1.5, rng);
    let b = a.matvec(&xbar).expect("dims");
    LinearConstraints::new(a, b).expect("valid")
}

/// Which objective a random fixture carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixtureKind {
    Quadratic,
    /// `λ Σ xᵢᵖ` on top of a random quadratic.
    LpRegularized {
        lambda: f64,
        p: f64,
    },
}

/// A random problem with derived smoothness constants and the given `r`.
pub fn random_problem(n: usize, m: usize, kind: FixtureKind, r: f64, rng: &mut impl Rng) -> Result<Problem<f64>> {
    let cons = random_constraints(n, m, rng);
    let quad: Box<dyn Objective<f64>> = Box::new(random_quadratic_objective(n, rng));
    let obj: Box<dyn Objective<f64>> = match kind {
        FixtureKind::Quadratic => quad,
        FixtureKind::LpRegularized { lambda, p } => Box::new(LpRegularized::new(quad, lambda, p)?),
    };
    Problem::new(obj, cons)?.with_derived_profile(None, Some(r), ProfileOverrides::default())
}

/// `min ½(x₁² - x₂²)` on `x₁ + x₂ = 1`, minimized at `(0, 1)`.
pub fn nonconvex_qp() -> Problem<f64> {
    let q = Matrix::from_diag(&[1.0, -1.0]);
    let f = Quadratic::new(q, vec![0.0, 0.0]).expect("valid");
    Problem::new(Box::new(f), LinearConstraints::simplex(2).expect("valid")).expect("dims")
}

fn random_orthogonal(n: usize, rng: &mut impl Rng) -> Matrix<f64> {
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-1.0..1.0);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    symmetric_eigen(&s).vectors
}

/// A trust-region instance `(g, H, β)` of dimension `1..=max_dim`.
///
/// With `hard`, `g` is orthogonal to the bottom eigenvector of `H` (which
/// is negative) and small enough that the step along the remaining
/// eigenvectors stays strictly inside the ball.
pub fn random_trs_instance(max_dim: usize, hard: bool, rng: &mut impl Rng) -> (Vec<f64>, Matrix<f64>, f64) {
    let n = rng.gen_range(if hard { 2 } else { 1 }..=max_dim);
    let beta = rng.gen_range(0.1..0.9);
    let v = random_orthogonal(n, rng);
    let mut lam = uniform_vec(n, -2.0, 2.0, rng);
    let mut coeffs = uniform_vec(n, -1.0, 1.0, rng);
    if hard {
        lam.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let bottom = -rng.gen_range(0.2..2.0);
        lam[0] = bottom;
        for l in lam.iter_mut().skip(1) {
            *l = l.max(bottom + 0.5);
        }
        coeffs[0] = 0.0;
        let norm: f64 = coeffs
            .iter()
            .zip(&lam)
            .skip(1)
            .map(|(c, l)| (c / (l - lam[0])).powi(2))
            .sum::<f64>()
            .sqrt();
        let target = beta * rng.gen_range(0.1..0.8);
        if norm > 0.0 {
            for c in &mut coeffs {
                *c *= target / norm;
            }
        }
    }
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = (0..n).map(|k| v[(i, k)] * lam[k] * v[(j, k)]).sum();
        }
    }
    let h = h.symmetrized();
    let g = v.matvec(&coeffs).expect("square");
    (g, h, beta)
}
