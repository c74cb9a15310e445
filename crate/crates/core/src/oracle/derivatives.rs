use rand::Rng;

use super::OracleReport;
use crate::error::{Error, Result};
use crate::problem::Objective;
use crate::Scalar;

pub const FD_GRADIENT_RTOL: f64 = 1e-5;
pub const FD_HESSIAN_RTOL: f64 = 1e-4;

fn check_margin<T: Scalar>(x: &[T], h: T) -> Result<()> {
    if !(h > T::zero()) {
        return Err(Error::InvalidInput("difference step must be positive".into()));
    }
    if let Some((i, v)) = x.iter().enumerate().find(|(_, &v)| !(v > h)) {
        return Err(Error::Domain(format!(
            "x[{i}] = {v} is within the difference step {h} of the boundary"
        )));
    }
    Ok(())
}

fn rel<T: Scalar>(approx: T, exact: T) -> (T, T) {
    let abs = (approx - exact).abs();
    (abs, abs / T::one().max(exact.abs()))
}

/// Central differences of `value` against `gradient`, relative error measured
/// against `max(1, |∂ᵢf|)`.
pub fn fd_gradient_check<T: Scalar>(objective: &dyn Objective<T>, x: &[T], h: T) -> Result<OracleReport<T>> {
    check_margin(x, h)?;
    let g = objective.gradient(x);
    let (mut max_abs, mut max_rel) = (T::zero(), T::zero());
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let fp = objective.value(&xp);
        xp[i] = x[i] - h;
        let fm = objective.value(&xp);
        xp[i] = x[i];
        let (a, r) = rel((fp - fm) / (T::lit(2.0) * h), g[i]);
        max_abs = max_abs.max(a);
        max_rel = max_rel.max(r);
    }
    if !max_rel.is_finite() {
        max_rel = T::infinity();
    }
    Ok(OracleReport::from_errors(
        format!("fd_gradient[{}]", objective.family()),
        max_abs,
        max_rel,
        1,
        T::lit(FD_GRADIENT_RTOL),
    ))
}

/// Central differences of `gradient` against `hessian`.
pub fn fd_hessian_check<T: Scalar>(objective: &dyn Objective<T>, x: &[T], h: T) -> Result<OracleReport<T>> {
    check_margin(x, h)?;
    let hess = objective
        .hessian(x)
        .ok_or_else(|| Error::Capability(format!("objective family '{}' provides no Hessian", objective.family())))?;
    let (mut max_abs, mut max_rel) = (T::zero(), T::zero());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        xp[j] = x[j] + h;
        let gp = objective.gradient(&xp);
        xp[j] = x[j] - h;
        let gm = objective.gradient(&xp);
        xp[j] = x[j];
        for i in 0..x.len() {
            let (a, r) = rel((gp[i] - gm[i]) / (T::lit(2.0) * h), hess[(i, j)]);
            max_abs = max_abs.max(a);
            max_rel = max_rel.max(r);
        }
    }
    if !max_rel.is_finite() {
        max_rel = T::infinity();
    }
    Ok(OracleReport::from_errors(
        format!("fd_hessian[{}]", objective.family()),
        max_abs,
        max_rel,
        1,
        T::lit(FD_HESSIAN_RTOL),
    ))
}

/// A point with coordinates uniform in `[0.2, 3]`.
pub fn random_interior_point<T: Scalar>(n: usize, rng: &mut impl Rng) -> Vec<T> {
    (0..n).map(|_| T::lit(rng.gen_range(0.2..3.0))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use crate::problem::{zero_objective, LpRegularized, Quadratic};

    #[test]
    fn exact_for_zero_and_quadratic() {
        let z = zero_objective::<f64>(3);
        let r = fd_gradient_check(&z, &[1.0, 2.0, 3.0], 1e-6).unwrap();
        assert_eq!(r.max_abs_error, 0.0);
        assert!(r.pass);
        let q = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, -3.0]], 2).unwrap();
        let f = Quadratic::new(q, vec![1.0, -1.0]).unwrap();
        assert!(fd_gradient_check(&f, &[0.5, 1.5], 1e-6).unwrap().pass);
        let r = fd_hessian_check(&f, &[0.5, 1.5], 1e-6).unwrap();
        assert!(r.pass && r.max_abs_error < 1e-8);
    }

    #[test]
    fn lp_regularized() {
        let f = LpRegularized::new(Box::new(zero_objective::<f64>(2)), 1.0, 0.5).unwrap();
        assert!(fd_gradient_check(&f, &[1.0, 4.0], 1e-6).unwrap().pass);
        let f = LpRegularized::new(Box::new(zero_objective::<f64>(1)), 2.0, 1.5).unwrap();
        assert!((f.hessian(&[1.0]).unwrap()[(0, 0)] - 1.5).abs() < 1e-15);
        assert!(fd_hessian_check(&f, &[1.0], 1e-6).unwrap().pass);
    }

    #[test]
    fn margin_enforced() {
        let z = zero_objective::<f64>(2);
        assert!(matches!(
            fd_gradient_check(&z, &[1e-7, 1.0], 1e-6),
            Err(Error::Domain(_))
        ));
    }
}
