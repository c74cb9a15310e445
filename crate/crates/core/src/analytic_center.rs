//! Starting points: a phase-I search for a strictly feasible point and damped
//! Newton centering of the log barrier over `{Ax = b, x > 0}`.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{solve_standard_form, LpOutcome};
use crate::numerics::{default_tol, least_squares, project_onto_nullspace, vector, Matrix};
use crate::problem::{is_strictly_feasible, LinearConstraints};
use crate::Scalar;

/// Default Newton-decrement threshold for an approximate center.
pub const DEFAULT_CENTER_TOL: f64 = 0.25;

const MAX_CENTER_ITERS: usize = 1000;

/// An approximate analytic center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CenterResult<T> {
    pub x0: Vec<T>,
    pub newton_decrement: T,
    pub iterations: usize,
    /// `2·decrement + n·log 2`: for every strictly feasible `x`,
    /// `-Σ log xᵢ ≥ -Σ log x0ᵢ - c0`.
    pub c0: T,
}

fn feasibility_tol<T: Scalar>() -> T {
    T::tol(1e-10, 64.0)
}

/// One least-squares correction of `Ax = b` starting from `x`.
fn polish<T: Scalar>(c: &LinearConstraints<T>, x: &[T]) -> Result<Vec<T>> {
    if c.num_constraints() == 0 {
        return Ok(x.to_vec());
    }
    let r = c.residual(x)?;
    let dx = least_squares(c.a(), &r)?;
    Ok(vector::sub(x, &dx))
}

/// Finds a point with `Ax = b` and every coordinate strictly positive by
/// maximizing the minimum coordinate over the affine set.
///
/// The phase-I program is `max t s.t. A(w + t e) = b, w ≥ 0, t ≤ 1`, solved by
/// simplex with `t = t⁺ - t⁻` and a slack for the cap.
pub fn find_strictly_feasible<T: Scalar>(constraints: &LinearConstraints<T>) -> Result<Vec<T>> {
    let (m, n) = (constraints.num_constraints(), constraints.dim());
    let a = constraints.a();
    let ae: Vec<T> = (0..m).map(|i| a.row(i).iter().copied().sum()).collect();
    // columns: w (n), t+, t-, sigma
    let cols = n + 3;
    let mut e = Matrix::zeros(m + 1, cols);
    for i in 0..m {
        for j in 0..n {
            e[(i, j)] = a[(i, j)];
        }
        e[(i, n)] = ae[i];
        e[(i, n + 1)] = -ae[i];
    }
    e[(m, n)] = T::one();
    e[(m, n + 1)] = -T::one();
    e[(m, n + 2)] = T::one();
    let mut f = constraints.b().to_vec();
    f.push(T::one());
    let mut cost = vec![T::zero(); cols];
    cost[n] = -T::one();
    cost[n + 1] = T::one();

    let (z, t) = match solve_standard_form(&cost, &e, &f) {
        LpOutcome::Optimal { z, value } => (z, -value),
        LpOutcome::Infeasible { residual } => {
            return Err(Error::Infeasible {
                reason: format!("Ax = b is inconsistent (phase-I residual {:e})", residual.as_f64()),
                slack: f64::NEG_INFINITY,
            })
        }
        LpOutcome::Unbounded => unreachable!("phase-I objective is capped at 1"),
    };
    let scale = T::one().max(vector::norm_inf(constraints.b()));
    if t <= T::tol(1e-9, 1024.0) * scale {
        return Err(Error::Infeasible {
            reason: "feasible set has empty interior".into(),
            slack: t.as_f64(),
        });
    }
    let x: Vec<T> = z[..n].iter().map(|&w| w + t).collect();
    let x = polish(constraints, &x)?;
    if !is_strictly_feasible(constraints, &x, feasibility_tol()) {
        return Err(Error::Infeasible {
            reason: "phase-I point lost feasibility after refinement".into(),
            slack: vector::min(&x).as_f64(),
        });
    }
    debug!("phase-I slack {:e}", t.as_f64());
    Ok(x)
}

/// Damped Newton ascent on `Σ log xᵢ` over the affine set, started at a
/// strictly feasible `start`. Stops once the Newton decrement is at most `tol`.
pub fn approximate_analytic_center<T: Scalar>(
    constraints: &LinearConstraints<T>,
    start: &[T],
    tol: T,
) -> Result<CenterResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("centering tolerance must be positive".into()));
    }
    if !is_strictly_feasible(constraints, start, feasibility_tol()) {
        return Err(Error::InvalidInput("start point is not strictly feasible".into()));
    }
    let n = constraints.dim();
    let ones = vec![T::one(); n];
    let huge = T::lit(1e15).min(T::max_value().sqrt());
    let mut x = start.to_vec();
    for it in 0..MAX_CENTER_ITERS {
        // scaled Newton direction: projection of e onto null(AX)
        let ax = constraints.a().scale_columns(&x)?;
        let d = project_onto_nullspace(&ax, &ones, default_tol())?;
        let dec = vector::norm2(&d);
        if dec <= tol {
            let x0 = if constraints.num_constraints() > 0 {
                let p = polish(constraints, &x)?;
                if p.iter().all(|&v| v > T::zero()) {
                    p
                } else {
                    x
                }
            } else {
                x
            };
            let c0 = T::lit(2.0) * dec + T::from_usize(n).unwrap() * T::lit(2.0).ln();
            debug!("centered after {it} Newton steps, decrement {:e}", dec.as_f64());
            return Ok(CenterResult {
                x0,
                newton_decrement: dec,
                iterations: it,
                c0,
            });
        }
        let damp = T::one() / (T::one() + dec);
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += *xi * *di * damp;
        }
        if vector::norm_inf(&x) > huge {
            return Err(Error::Unbounded(format!(
                "log-barrier ascent diverged after {} steps; the feasible set is unbounded",
                it + 1
            )));
        }
    }
    Err(Error::Unbounded(format!(
        "centering did not converge within {MAX_CENTER_ITERS} Newton steps"
    )))
}

/// Phase-I followed by centering.
pub fn analytic_center<T: Scalar>(constraints: &LinearConstraints<T>, tol: T) -> Result<CenterResult<T>> {
    let start = find_strictly_feasible(constraints)?;
    approximate_analytic_center(constraints, &start, tol)
}

/// `max(1, max over the feasible set of ‖x‖∞)`, one linear program per
/// coordinate.
pub fn coordinate_bound<T: Scalar>(constraints: &LinearConstraints<T>) -> Result<T> {
    let n = constraints.dim();
    let mut bound = T::one();
    for i in 0..n {
        let mut c = vec![T::zero(); n];
        c[i] = -T::one();
        match solve_standard_form(&c, constraints.a(), constraints.b()) {
            LpOutcome::Optimal { value, .. } => bound = bound.max(-value),
            LpOutcome::Unbounded => {
                return Err(Error::Unbounded(format!(
                    "coordinate {i} is unbounded on the feasible set"
                )))
            }
            LpOutcome::Infeasible { .. } => {
                return Err(Error::Infeasible {
                    reason: "feasible set is empty".into(),
                    slack: f64::NEG_INFINITY,
                })
            }
        }
    }
    Ok(bound)
}
