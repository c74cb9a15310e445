use serde::{Deserialize, Serialize};

use crate::analytic_center::analytic_center;
use crate::error::{Error, Result};
use crate::lp::{solve_standard_form, LpOutcome};
use crate::numerics::{default_tol, null_space_basis, vector};
use crate::problem::Problem;
use crate::Scalar;

/// Largest null-space dimension `grid_minimize` accepts.
pub const MAX_GRID_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GridResult<T> {
    pub f_min: T,
    pub x_min: Vec<T>,
    /// `2 · resolution · √k · L̂` with `L̂` the largest difference quotient
    /// between adjacent samples.
    pub slack: T,
    /// `f_min - slack`.
    pub lower_bound: T,
    pub evaluations: usize,
}

/// Range of `zᵀx` over the feasible set.
fn direction_range<T: Scalar>(problem: &Problem<T>, z: &[T]) -> Result<(T, T)> {
    let c = problem.constraints();
    let solve = |sign: T| -> Result<T> {
        let cost: Vec<T> = z.iter().map(|&v| sign * v).collect();
        match solve_standard_form(&cost, c.a(), c.b()) {
            LpOutcome::Optimal { value, .. } => Ok(sign * value),
            LpOutcome::Unbounded => Err(Error::Unbounded("feasible set is unbounded".into())),
            LpOutcome::Infeasible { .. } => Err(Error::Infeasible {
                reason: "feasible set is empty".into(),
                slack: f64::NEG_INFINITY,
            }),
        }
    };
    Ok((solve(T::one())?, solve(-T::one())?))
}

/// Grid search over `x = x_c + Z u`, `x_c` the analytic center and `Z` an
/// orthonormal basis of `null(A)` with at most three columns. The leading
/// coordinates of `u` run over a grid of step `resolution` inside their LP
/// ranges; the last one runs over its exact feasible interval (endpoints
/// included) for each choice of the others.
pub fn grid_minimize<T: Scalar>(problem: &Problem<T>, resolution: T) -> Result<GridResult<T>> {
    if !(resolution > T::zero()) {
        return Err(Error::InvalidInput("grid resolution must be positive".into()));
    }
    let cons = problem.constraints();
    let z = null_space_basis(cons.a(), default_tol())?;
    let k = z.cols();
    if k > MAX_GRID_DIM {
        return Err(Error::Capability(format!(
            "grid search needs at most {MAX_GRID_DIM} free dimensions, got {k}"
        )));
    }
    let xc = analytic_center(cons, T::tol(1e-10, 64.0))?.x0;
    let f = problem.objective();
    if k == 0 {
        let v = f.value(&xc);
        return Ok(GridResult {
            f_min: v,
            x_min: xc,
            slack: T::zero(),
            lower_bound: v,
            evaluations: 1,
        });
    }
    let cols: Vec<Vec<T>> = (0..k).map(|j| z.column(j)).collect();
    let mut ranges = Vec::with_capacity(k);
    for c in &cols {
        let (lo, hi) = direction_range(problem, c)?;
        let base = vector::dot(c, &xc);
        ranges.push((lo - base, hi - base));
    }

    let axis = |lo: T, hi: T| -> Vec<T> {
        let count = ((hi - lo) / resolution).ceil().to_usize().unwrap_or(0).max(1);
        (0..=count)
            .map(|i| lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(count).unwrap())
            .collect()
    };
    let lead: Vec<Vec<T>> = ranges[..k - 1].iter().map(|&(lo, hi)| axis(lo, hi)).collect();
    let last = &cols[k - 1];
    let mut best = (T::infinity(), xc.clone());
    let mut lip = T::zero();
    let mut evals = 0usize;
    // (t, x, f) samples of the previous line
    let mut prev_line: Option<Vec<(T, Vec<T>, T)>> = None;

    let mut idx = vec![0usize; k - 1];
    loop {
        let mut base = xc.clone();
        for (j, &i) in idx.iter().enumerate() {
            vector::axpy(lead[j][i], &cols[j], &mut base);
        }
        // feasible interval for the last coordinate: base + t·last ≥ 0
        let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
        for (b, c) in base.iter().zip(last) {
            if *c > T::zero() {
                lo = lo.max(-*b / *c);
            } else if *c < T::zero() {
                hi = hi.min(-*b / *c);
            } else if *b < T::zero() {
                lo = T::infinity();
            }
        }
        let mut line = Vec::new();
        if lo <= hi && lo.is_finite() && hi.is_finite() {
            let mut last_sample: Option<(T, T)> = None;
            for t in axis(lo, hi) {
                let mut x = base.clone();
                vector::axpy(t, last, &mut x);
                for v in &mut x {
                    *v = v.max(T::zero());
                }
                let val = f.value(&x);
                evals += 1;
                if let Some((pt, pv)) = last_sample {
                    if t > pt {
                        lip = lip.max((val - pv).abs() / (t - pt));
                    }
                }
                last_sample = Some((t, val));
                if val < best.0 {
                    best = (val, x.clone());
                }
                line.push((t, x, val));
            }
        }
        // difference quotients across neighbouring lines, pairing samples
        // with the nearest line parameter
        if let (Some(prev), false) = (&prev_line, line.is_empty()) {
            for (t, x, v) in line.iter().step_by((line.len() / 16).max(1)) {
                let pos = prev.partition_point(|s| s.0 < *t);
                for (_, px, pv) in prev[pos.saturating_sub(1)..(pos + 1).min(prev.len())].iter() {
                    let dist = vector::norm2(&vector::sub(px, x));
                    if dist > T::zero() {
                        lip = lip.max((*v - *pv).abs() / dist);
                    }
                }
            }
        }
        // advance the odometer over the leading coordinates
        let mut j = 0;
        loop {
            if j == k - 1 {
                let kf = T::from_usize(k).unwrap();
                let slack = T::lit(2.0) * resolution * kf.sqrt() * lip;
                return Ok(GridResult {
                    f_min: best.0,
                    lower_bound: best.0 - slack,
                    x_min: best.1,
                    slack,
                    evaluations: evals,
                });
            }
            idx[j] += 1;
            if idx[j] < lead[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        prev_line = if j == 0 && !line.is_empty() { Some(line) } else { None };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use crate::problem::{LinearConstraints, Quadratic};

    fn simplex(q: Matrix<f64>, c: Vec<f64>) -> Problem<f64> {
        let n = c.len();
        Problem::new(
            Box::new(Quadratic::new(q, c).unwrap()),
            LinearConstraints::simplex(n).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn examples() {
        let p = simplex(Matrix::zeros(2, 2), vec![1.0, 1.0]);
        let r = grid_minimize(&p, 1e-2).unwrap();
        assert!((r.f_min - 1.0).abs() < 1e-12);

        let p = simplex(Matrix::identity(2), vec![0.0, 0.0]);
        let r = grid_minimize(&p, 1e-3).unwrap();
        assert!((r.f_min - 0.25).abs() < 1e-6);
        assert!(r.lower_bound <= 0.25);

        let p = simplex(Matrix::from_diag(&[1.0, -1.0]), vec![0.0, 0.0]);
        let r = grid_minimize(&p, 1e-3).unwrap();
        assert!((r.f_min + 0.5).abs() < 1e-12);
        assert!(r.x_min[0].abs() < 1e-12);
    }

    #[test]
    fn two_dimensional_null_space() {
        // min (x1 - 0.2)² + x2² + x3² on the simplex: x = (0.4667, 0.2667, 0.2667)
        let p = simplex(Matrix::from_diag(&[2.0, 2.0, 2.0]), vec![-0.4, 0.0, 0.0]);
        let r = grid_minimize(&p, 1e-3).unwrap();
        let exact = {
            let x = [7.0 / 15.0, 4.0 / 15.0, 4.0 / 15.0];
            x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 0.4 * x[0]
        };
        assert!(r.f_min >= exact - 1e-12);
        assert!(r.f_min - exact < 1e-5);
        assert!(r.lower_bound <= exact);
    }

    #[test]
    fn monotone_in_resolution() {
        let q = Matrix::from_rows(&[vec![1.0, -2.0, 0.0], vec![-2.0, 0.5, 1.0], vec![0.0, 1.0, -1.0]], 3).unwrap();
        let p = simplex(q, vec![0.1, -0.3, 0.2]);
        let coarse = grid_minimize(&p, 0.02).unwrap();
        let fine = grid_minimize(&p, 0.01).unwrap();
        assert!(fine.f_min <= coarse.f_min + coarse.slack);
    }
}
