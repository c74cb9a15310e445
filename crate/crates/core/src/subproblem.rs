//! The scaled per-iteration subproblem
//!
//! ```text
//! minimize  gᵀd (+ ½ dᵀHd)   subject to  Md = 0,  ‖d‖ ≤ β
//! ```
//!
//! with `g = X∇φ(x)`, `H = X∇²f(x)X` and `M = AX`. The linear version has a
//! closed form; the quadratic version is a trust-region subproblem solved to
//! global optimality by null-space reduction and bisection on the
//! trust-region multiplier.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    cholesky, cholesky_solve, default_tol, least_squares, min_eigpair, null_space_basis, project_onto_nullspace,
    symmetric_eigen, vector, Matrix,
};
use crate::Scalar;

/// Bisection gives up after this many halvings.
pub const MAX_BISECTION_ITERS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSubproblem<T> {
    g: Vec<T>,
    h: Option<Matrix<T>>,
    m: Matrix<T>,
    beta: T,
}

impl<T: Scalar> ScaledSubproblem<T> {
    pub fn new(g: Vec<T>, h: Option<Matrix<T>>, m: Matrix<T>, beta: T) -> Result<Self> {
        if !(beta > T::zero() && beta < T::one()) {
            return Err(Error::InvalidInput(format!(
                "trust radius must lie in (0,1), got {beta}"
            )));
        }
        if m.cols() != g.len() {
            return Err(Error::DimensionMismatch(format!(
                "M has {} columns, g has length {}",
                m.cols(),
                g.len()
            )));
        }
        if !vector::all_finite(&g) || !m.is_finite() {
            return Err(Error::InvalidInput("subproblem data has non-finite entries".into()));
        }
        let h = match h {
            Some(h) => {
                if h.rows() != g.len() || h.cols() != g.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "H is {}x{}, expected {n}x{n}",
                        h.rows(),
                        h.cols(),
                        n = g.len()
                    )));
                }
                if !h.is_finite() {
                    return Err(Error::InvalidInput("H has non-finite entries".into()));
                }
                if h.asymmetry() > T::tol(1e-10, 64.0) * (T::one() + h.norm_max()) {
                    return Err(Error::InvalidInput("H must be symmetric".into()));
                }
                Some(h.symmetrized())
            }
            None => None,
        };
        Ok(Self { g, h, m, beta })
    }

    /// Subproblem without constraints.
    pub fn unconstrained(g: Vec<T>, h: Option<Matrix<T>>, beta: T) -> Result<Self> {
        let n = g.len();
        Self::new(g, h, Matrix::zeros(0, n), beta)
    }

    pub fn g(&self) -> &[T] {
        &self.g
    }

    pub fn h(&self) -> Option<&Matrix<T>> {
        self.h.as_ref()
    }

    pub fn m(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    /// `gᵀd + ½ dᵀHd` (the quadratic term only when `H` is present).
    pub fn model_value(&self, d: &[T]) -> T {
        let lin = vector::dot(&self.g, d);
        match &self.h {
            Some(h) => {
                let hd = h.matvec(d).expect("dimension checked");
                lin + T::lit(0.5) * vector::dot(d, &hd)
            }
            None => lin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SubproblemSolution<T> {
    pub d: Vec<T>,
    /// Multipliers of `Md = 0` in the stationarity equation
    /// `g + Hd + λ d + Mᵀy = 0`.
    pub y: Vec<T>,
    pub lambda_tr: T,
    pub on_boundary: bool,
    /// Smallest eigenvalue of `ZᵀHZ`, where `Z` spans `null(M)`. Only set by
    /// the second-order solver on a nontrivial null space.
    pub reduced_min_eig: Option<T>,
}

fn multipliers<T: Scalar>(m: &Matrix<T>, rhs: &[T]) -> Result<Vec<T>> {
    // Mᵀy ≈ -rhs
    least_squares(&m.transpose(), &vector::scale(rhs, -T::one()))
}

/// Closed-form solution of the linear model over the scaled ball.
pub fn solve_first_order<T: Scalar>(sp: &ScaledSubproblem<T>) -> Result<SubproblemSolution<T>> {
    let gp = project_onto_nullspace(&sp.m, &sp.g, default_tol())?;
    let gp_norm = vector::norm2(&gp);
    let threshold = T::tol(1e-14, 4.0) * (T::one() + vector::norm2(&sp.g));
    let (d, lambda_tr, on_boundary) = if gp_norm <= threshold {
        (vector::scale(&gp, T::zero()), T::zero(), false)
    } else {
        (vector::scale(&gp, -sp.beta / gp_norm), gp_norm / sp.beta, true)
    };
    let mut rhs = sp.g.clone();
    vector::axpy(lambda_tr, &d, &mut rhs);
    let y = multipliers(&sp.m, &rhs)?;
    Ok(SubproblemSolution {
        d,
        y,
        lambda_tr,
        on_boundary,
        reduced_min_eig: None,
    })
}

/// `-(Hz + λI)⁻¹ gz`, or `None` when the shifted matrix is not positive definite.
fn shifted_solve<T: Scalar>(hz: &Matrix<T>, gz: &[T], lambda: T) -> Option<Vec<T>> {
    let mut s = hz.clone();
    s.add_diagonal(lambda);
    let l = cholesky(&s)?;
    let u = cholesky_solve(&l, gz);
    if vector::all_finite(&u) {
        Some(vector::scale(&u, -T::one()))
    } else {
        None
    }
}

/// Minimum-norm solution of `(Hz + λI) u = -gz` for a singular shift.
fn singular_solve<T: Scalar>(hz: &Matrix<T>, gz: &[T], lambda: T) -> Result<Vec<T>> {
    let mut s = hz.clone();
    s.add_diagonal(lambda);
    least_squares(&s, &vector::scale(gz, -T::one()))
}

fn reduced_model<T: Scalar>(hz: &Matrix<T>, gz: &[T], u: &[T]) -> T {
    let hu = hz.matvec(u).expect("dimension checked");
    vector::dot(gz, u) + T::lit(0.5) * vector::dot(u, &hu)
}

/// Moves `u` along the unit vector `v` to the sphere `‖u + τv‖ = β`, picking
/// the root with the smaller model value (ties: `gᵀ(u+τv) ≤ 0`, then `τ > 0`).
fn fill_to_boundary<T: Scalar>(hz: &Matrix<T>, gz: &[T], u: &[T], v: &[T], beta: T) -> Vec<T> {
    let uv = vector::dot(u, v);
    let uu = vector::dot(u, u);
    let disc = (uv * uv + beta * beta - uu).max(T::zero()).sqrt();
    let candidates = [-uv + disc, -uv - disc];
    let mut best: Option<(Vec<T>, T, T)> = None;
    let tie = T::tol(1e-14, 16.0);
    for tau in candidates {
        let mut w = u.to_vec();
        vector::axpy(tau, v, &mut w);
        let q = reduced_model(hz, gz, &w);
        let gd = vector::dot(gz, &w);
        let better = match &best {
            None => true,
            Some((_, bq, bgd)) => {
                let scale = T::one().max(q.abs()).max(bq.abs());
                if q < *bq - tie * scale {
                    true
                } else if q <= *bq + tie * scale {
                    // same model value: prefer a non-ascent direction
                    gd <= T::zero() && *bgd > T::zero()
                } else {
                    false
                }
            }
        };
        if better {
            best = Some((w, q, gd));
        }
    }
    best.expect("two candidates").0
}

/// Global minimizer of the quadratic model over `{Md = 0, ‖d‖ ≤ β}`.
///
/// `tol` bounds the optimality residuals checked after the solve; violations
/// are logged, not raised.
pub fn solve_trs<T: Scalar>(sp: &ScaledSubproblem<T>, tol: T) -> Result<SubproblemSolution<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("subproblem tolerance must be positive".into()));
    }
    let h =
        sp.h.as_ref()
            .ok_or_else(|| Error::InvalidInput("second-order subproblem needs a Hessian".into()))?;
    let n = sp.dim();
    let z = null_space_basis(&sp.m, default_tol())?;
    let k = z.cols();
    if k == 0 {
        let y = multipliers(&sp.m, &sp.g)?;
        return Ok(SubproblemSolution {
            d: vec![T::zero(); n],
            y,
            lambda_tr: T::zero(),
            on_boundary: false,
            reduced_min_eig: None,
        });
    }
    let gz = z.tr_matvec(&sp.g)?;
    let hz = h.congruence(&z)?.symmetrized();
    let (lmin, v) = min_eigpair(&hz, T::tol(1e-10, 64.0))?;
    let beta = sp.beta;
    let gnorm = vector::norm2(&gz);
    let hnorm = hz.norm_frobenius();
    let lower_edge = beta * (T::one() - T::tol(1e-12, 8.0));

    let (u, lambda) = 'solve: {
        // interior Newton step
        if lmin > T::zero() {
            if let Some(u) = shifted_solve(&hz, &gz, T::zero()) {
                if vector::norm2(&u) <= beta {
                    break 'solve (u, T::zero());
                }
            }
        }
        let mut lo = T::zero().max(-lmin);
        if gnorm == T::zero() {
            // pure curvature: sit on the bottom eigenvector
            if lo == T::zero() {
                break 'solve (vec![T::zero(); k], T::zero());
            }
            let zero = vec![T::zero(); k];
            break 'solve (fill_to_boundary(&hz, &gz, &zero, &v, beta), lo);
        }
        let mut hi = lo + gnorm / beta + hnorm;
        let mut u_hi = shifted_solve(&hz, &gz, hi).ok_or(Error::SubproblemFailure {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        })?;
        let collapse = T::epsilon() * T::lit(4.0);
        for _ in 0..MAX_BISECTION_ITERS {
            if hi - lo <= collapse * T::one().max(hi) {
                // hard case (or numerically indistinguishable from it)
                let base = if vector::norm2(&u_hi) <= beta {
                    u_hi.clone()
                } else {
                    singular_solve(&hz, &gz, hi)?
                };
                if vector::norm2(&base) >= lower_edge {
                    break 'solve (base, hi);
                }
                break 'solve (fill_to_boundary(&hz, &gz, &base, &v, beta), hi);
            }
            let mid = lo + (hi - lo) * T::lit(0.5);
            match shifted_solve(&hz, &gz, mid) {
                None => lo = mid,
                Some(u) => {
                    let nu = vector::norm2(&u);
                    if nu > beta {
                        lo = mid;
                    } else if nu < lower_edge {
                        hi = mid;
                        u_hi = u;
                    } else {
                        break 'solve (u, mid);
                    }
                }
            }
        }
        return Err(Error::SubproblemFailure {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    };

    // keep ‖u‖ ≤ β exactly against rounding
    let nu = vector::norm2(&u);
    let u = if nu > beta { vector::scale(&u, beta / nu) } else { u };
    let d = z.matvec(&u)?;
    let hd = h.matvec(&d)?;
    let mut rhs = vector::add(&sp.g, &hd);
    vector::axpy(lambda, &d, &mut rhs);
    let y = multipliers(&sp.m, &rhs)?;
    let sol = SubproblemSolution {
        on_boundary: lambda > T::zero() || vector::norm2(&d) >= lower_edge,
        d,
        y,
        lambda_tr: lambda,
        reduced_min_eig: Some(lmin),
    };
    let res = verify_trs_optimality(sp, &sol)?;
    let scale = T::one() + vector::norm_inf(&sp.g) + hnorm;
    if res.stationarity > tol * scale || res.min_eig < -tol * scale || res.complementarity > tol * scale {
        warn!(
            "trust-region solution residuals above tolerance: stationarity {:e}, min eig {:e}, complementarity {:e}",
            res.stationarity.as_f64(),
            res.min_eig.as_f64(),
            res.complementarity.as_f64()
        );
    }
    Ok(sol)
}

/// Optimality residuals of a trust-region solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrsResiduals<T> {
    /// `‖g + Hd + λd + Mᵀy‖∞`.
    pub stationarity: T,
    /// Smallest eigenvalue of `ZᵀHZ + λI`.
    pub min_eig: T,
    /// `|λ (β - ‖d‖)|`.
    pub complementarity: T,
}

/// Recomputes the global optimality conditions of the trust-region
/// subproblem without judging them. A missing `H` is read as zero.
pub fn verify_trs_optimality<T: Scalar>(
    sp: &ScaledSubproblem<T>,
    sol: &SubproblemSolution<T>,
) -> Result<TrsResiduals<T>> {
    let n = sp.dim();
    if sol.d.len() != n || sol.y.len() != sp.m.rows() {
        return Err(Error::DimensionMismatch("solution does not match subproblem".into()));
    }
    let h = sp.h.clone().unwrap_or_else(|| Matrix::zeros(n, n));
    let hd = h.matvec(&sol.d)?;
    let mty = sp.m.tr_matvec(&sol.y)?;
    let mut r = vector::add(&sp.g, &hd);
    vector::axpy(sol.lambda_tr, &sol.d, &mut r);
    let r = vector::add(&r, &mty);
    let z = null_space_basis(&sp.m, default_tol())?;
    let min_eig = if z.cols() == 0 {
        sol.lambda_tr
    } else {
        let mut hz = h.congruence(&z)?.symmetrized();
        hz.add_diagonal(sol.lambda_tr);
        symmetric_eigen(&hz).values[0]
    };
    Ok(TrsResiduals {
        stationarity: vector::norm_inf(&r),
        min_eig,
        complementarity: (sol.lambda_tr * (sp.beta - vector::norm2(&sol.d))).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn first_order_examples() {
        let sp = ScaledSubproblem::unconstrained(vec![1.0, 0.0], None, 0.5).unwrap();
        let s = solve_first_order(&sp).unwrap();
        assert_abs_diff_eq!(s.d[0], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.d[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.lambda_tr, 2.0, epsilon = 1e-15);
        assert!(s.on_boundary);

        let m = Matrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap();
        let sp = ScaledSubproblem::new(vec![2.0, 2.0], None, m.clone(), 0.5).unwrap();
        let s = solve_first_order(&sp).unwrap();
        assert_eq!(s.lambda_tr, 0.0);
        assert!(vector::norm2(&s.d) < 1e-15);
        assert_abs_diff_eq!(s.y[0], -2.0, epsilon = 1e-14);

        let sp = ScaledSubproblem::new(vec![1.0, 0.0], None, m, 0.3).unwrap();
        let s = solve_first_order(&sp).unwrap();
        let h = 0.3 / 2f64.sqrt();
        assert_abs_diff_eq!(s.d[0], -h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.d[1], h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.lambda_tr, (0.5f64.sqrt()) / 0.3, epsilon = 1e-14);
        let res = verify_trs_optimality(&sp, &s).unwrap();
        assert!(res.stationarity < 1e-12);
    }

    #[test]
    fn trs_interior_newton_step() {
        let sp = ScaledSubproblem::unconstrained(vec![0.1, 0.0], Some(Matrix::identity(2)), 0.99).unwrap();
        let s = solve_trs(&sp, 1e-10).unwrap();
        assert_abs_diff_eq!(s.d[0], -0.1, epsilon = 1e-14);
        assert_abs_diff_eq!(s.d[1], 0.0, epsilon = 1e-14);
        assert_eq!(s.lambda_tr, 0.0);
        let r = verify_trs_optimality(&sp, &s).unwrap();
        assert!(r.stationarity < 1e-12);
        assert_abs_diff_eq!(r.min_eig, 1.0, epsilon = 1e-12);
        assert!(r.complementarity < 1e-12);
    }

    #[test]
    fn trs_pure_negative_curvature() {
        let h = Matrix::<f64>::from_diag(&[-1.0, 1.0]);
        let sp = ScaledSubproblem::unconstrained(vec![0.0, 0.0], Some(h), 0.999_999).unwrap();
        let s = solve_trs(&sp, 1e-10).unwrap();
        assert_abs_diff_eq!(s.d[0].abs(), 0.999_999, epsilon = 1e-12);
        assert_abs_diff_eq!(s.d[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.lambda_tr, 1.0, epsilon = 1e-12);
        let r = verify_trs_optimality(&sp, &s).unwrap();
        assert!(r.stationarity < 1e-10 && r.min_eig.abs() < 1e-10 && r.complementarity < 1e-10);
    }

    #[test]
    fn trs_hard_case_with_gradient() {
        // g orthogonal to the bottom eigenvector, ‖(H+λI)⁻¹g‖ < β at λ = 1
        let h = Matrix::<f64>::from_diag(&[-1.0, 1.0]);
        let sp = ScaledSubproblem::unconstrained(vec![0.0, 0.2], Some(h), 0.5).unwrap();
        let s = solve_trs(&sp, 1e-10).unwrap();
        assert_abs_diff_eq!(s.lambda_tr, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.d[1], -0.1, epsilon = 1e-10);
        assert_abs_diff_eq!(vector::norm2(&s.d), 0.5, epsilon = 1e-12);
        let r = verify_trs_optimality(&sp, &s).unwrap();
        assert!(r.stationarity < 1e-9, "{r:?}");
    }

    #[test]
    fn trs_boundary_easy_case() {
        let h = Matrix::from_diag(&[1.0, 2.0]);
        let sp = ScaledSubproblem::unconstrained(vec![1.0, 1.0], Some(h), 0.2).unwrap();
        let s = solve_trs(&sp, 1e-10).unwrap();
        assert_abs_diff_eq!(vector::norm2(&s.d), 0.2, epsilon = 1e-12);
        assert!(s.lambda_tr > 0.0);
        let r = verify_trs_optimality(&sp, &s).unwrap();
        assert!(r.stationarity < 1e-10 && r.min_eig > 0.0 && r.complementarity < 1e-10);
    }

    #[test]
    fn perturbed_solution_fails_stationarity() {
        let h = Matrix::from_diag(&[1.0, 2.0]);
        let sp = ScaledSubproblem::unconstrained(vec![1.0, 1.0], Some(h), 0.2).unwrap();
        let mut s = solve_trs(&sp, 1e-10).unwrap();
        s.d[0] += 1e-3;
        assert!(verify_trs_optimality(&sp, &s).unwrap().stationarity >= 1e-4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ScaledSubproblem::unconstrained(vec![1.0], None, 1.0).is_err());
        assert!(ScaledSubproblem::unconstrained(vec![f64::NAN], None, 0.5).is_err());
        let sp = ScaledSubproblem::unconstrained(vec![1.0], None, 0.5).unwrap();
        assert!(solve_trs(&sp, 1e-10).is_err());
    }
}
