use rand::Rng;

use super::OracleReport;
use crate::error::{Error, Result};
use crate::numerics::vector;
use crate::Scalar;

/// `RHS - LHS` of
/// `-Σ ln(xᵢ + dᵢ) + Σ ln xᵢ ≤ -eᵀX⁻¹d + β²/(2(1-β))`
/// for `x > 0`, `‖X⁻¹d‖ ≤ β < 1`.
pub fn log_inequality_slack<T: Scalar>(x: &[T], d: &[T], beta: T) -> Result<T> {
    if x.len() != d.len() {
        return Err(Error::DimensionMismatch("x and d differ in length".into()));
    }
    if !(beta >= T::zero() && beta < T::one()) {
        return Err(Error::InvalidInput(format!("beta must lie in [0,1), got {beta}")));
    }
    if x.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::Domain("x must be strictly positive".into()));
    }
    let w: Vec<T> = d.iter().zip(x).map(|(&di, &xi)| di / xi).collect();
    if vector::norm2(&w) > beta * (T::one() + T::tol(1e-12, 8.0)) {
        return Err(Error::InvalidInput("‖X⁻¹d‖ exceeds beta".into()));
    }
    let lhs: T = -w.iter().map(|&wi| wi.ln_1p()).sum::<T>();
    let rhs = -w.iter().copied().sum::<T>() + beta * beta / (T::lit(2.0) * (T::one() - beta));
    Ok(rhs - lhs)
}

/// Single-sample check with the `-1e-12` slack allowance.
pub fn log_inequality_check<T: Scalar>(x: &[T], d: &[T], beta: T) -> Result<OracleReport<T>> {
    let slack = log_inequality_slack(x, d, beta)?;
    let violation = T::zero().max(-slack);
    Ok(OracleReport::from_errors(
        "log_inequality",
        violation,
        violation,
        1,
        T::lit(1e-12),
    ))
}

/// `trials` random samples with `n ≤ 8`, `β ∈ (0, 0.9]`, and `X⁻¹d` drawn in
/// the ball of radius β (a quarter of them on its boundary).
pub fn log_inequality_suite(trials: usize, rng: &mut impl Rng) -> Result<OracleReport<f64>> {
    let mut worst = 0.0f64;
    for k in 0..trials {
        let n = rng.gen_range(1..=8);
        let beta: f64 = rng.gen_range(1e-6..=0.9);
        let x: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.gen_range(-3.0..3.0))).collect();
        let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nw = vector::norm2(&w).max(1e-300);
        let radius = if k % 4 == 0 {
            beta
        } else {
            beta * rng.gen::<f64>().powf(1.0 / n as f64)
        };
        for v in &mut w {
            *v *= radius / nw;
        }
        let d: Vec<f64> = w.iter().zip(&x).map(|(wi, xi)| wi * xi).collect();
        let slack = log_inequality_slack(&x, &d, beta)?;
        worst = worst.max(-slack);
    }
    Ok(OracleReport::from_errors("log_inequality", worst, worst, trials, 1e-12))
}
