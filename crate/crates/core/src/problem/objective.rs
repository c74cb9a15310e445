use std::fmt;

use super::smoothness::{LipschitzData, SmoothnessClass};
use crate::error::{Error, Result};
use crate::numerics::{vector, Matrix};
use crate::Scalar;

/// Objective `f` on the nonnegative orthant.
///
/// `value` must be continuous on `x >= 0`. `gradient` is only required to be
/// finite for strictly positive `x`, and `hessian` (when provided) only on the
/// open orthant as well. Callers check the domain; implementations may assume
/// `x > 0` for the derivatives.
pub trait Objective<T: Scalar>: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &[T]) -> T;

    fn gradient(&self, x: &[T]) -> Vec<T>;

    /// `None` when second derivatives are not available.
    fn hessian(&self, x: &[T]) -> Option<Matrix<T>>;

    fn class(&self) -> SmoothnessClass;

    /// Constants from which `gamma`/`eta` can be derived. Custom objectives
    /// that return `None` must declare their constants explicitly.
    fn lipschitz_data(&self) -> Option<LipschitzData<T>> {
        None
    }

    fn family(&self) -> &'static str {
        "custom"
    }
}

/// `f(x) = ½ xᵀQx + cᵀx`.
#[derive(Debug, Clone)]
pub struct Quadratic<T> {
    q: Matrix<T>,
    c: Vec<T>,
}

impl<T: Scalar> Quadratic<T> {
    pub fn new(q: Matrix<T>, c: Vec<T>) -> Result<Self> {
        if q.rows() != q.cols() || c.len() != q.rows() {
            return Err(Error::DimensionMismatch(format!(
                "Q is {}x{}, c has length {}",
                q.rows(),
                q.cols(),
                c.len()
            )));
        }
        if q.asymmetry() > T::tol(1e-12, 16.0) * (T::one() + q.norm_max()) {
            return Err(Error::InvalidInput("Q must be symmetric".into()));
        }
        if !vector::all_finite(&c) {
            return Err(Error::InvalidInput("c has non-finite entries".into()));
        }
        Ok(Self { q: q.symmetrized(), c })
    }

    pub fn q(&self) -> &Matrix<T> {
        &self.q
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    /// Spectral norm of `Q`.
    pub fn hessian_norm(&self) -> T {
        if self.q.rows() == 0 {
            return T::zero();
        }
        let e = crate::numerics::symmetric_eigen(&self.q);
        e.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Convenience constructor mirroring `Quadratic::new`.
pub fn quadratic_objective<T: Scalar>(q: Matrix<T>, c: Vec<T>) -> Result<Quadratic<T>> {
    Quadratic::new(q, c)
}

impl<T: Scalar> Objective<T> for Quadratic<T> {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn value(&self, x: &[T]) -> T {
        let qx = self.q.matvec(x).expect("dimension checked by problem");
        T::lit(0.5) * vector::dot(x, &qx) + vector::dot(&self.c, x)
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let qx = self.q.matvec(x).expect("dimension checked by problem");
        vector::add(&qx, &self.c)
    }

    fn hessian(&self, _x: &[T]) -> Option<Matrix<T>> {
        Some(self.q.clone())
    }

    fn class(&self) -> SmoothnessClass {
        SmoothnessClass::Quadratic
    }

    fn lipschitz_data(&self) -> Option<LipschitzData<T>> {
        Some(LipschitzData::Quadratic {
            hessian_norm: self.hessian_norm(),
        })
    }

    fn family(&self) -> &'static str {
        "quadratic"
    }
}

/// The identically zero objective on `n` variables.
pub fn zero_objective<T: Scalar>(n: usize) -> Quadratic<T> {
    Quadratic {
        q: Matrix::zeros(n, n),
        c: vec![T::zero(); n],
    }
}

/// `f(x) = H(x) + λ Σ xᵢᵖ` with smooth `H`.
///
/// For `p < 1` the gradient blows up at the boundary; for `1 < p < 2` the
/// Hessian does.
#[derive(Debug)]
pub struct LpRegularized<T: Scalar> {
    smooth: Box<dyn Objective<T>>,
    lambda: T,
    p: T,
}

impl<T: Scalar> LpRegularized<T> {
    pub fn new(smooth: Box<dyn Objective<T>>, lambda: T, p: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!(
                "regularization weight must be positive, got {lambda}"
            )));
        }
        let valid = p > T::zero() && p < T::lit(2.0) && p != T::one();
        if !valid {
            return Err(Error::InvalidInput(format!(
                "exponent p must lie in (0,1) or (1,2), got {p}"
            )));
        }
        Ok(Self { smooth, lambda, p })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn p(&self) -> T {
        self.p
    }
}

pub fn lp_regularized_objective<T: Scalar>(smooth: Box<dyn Objective<T>>, lambda: T, p: T) -> Result<LpRegularized<T>> {
    LpRegularized::new(smooth, lambda, p)
}

impl<T: Scalar> Objective<T> for LpRegularized<T> {
    fn dim(&self) -> usize {
        self.smooth.dim()
    }

    fn value(&self, x: &[T]) -> T {
        let reg: T = x.iter().map(|&xi| xi.max(T::zero()).powf(self.p)).sum();
        self.smooth.value(x) + self.lambda * reg
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = self.smooth.gradient(x);
        let lp = self.lambda * self.p;
        let pm1 = self.p - T::one();
        for (gi, &xi) in g.iter_mut().zip(x) {
            *gi += lp * xi.powf(pm1);
        }
        g
    }

    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        let mut h = self.smooth.hessian(x)?;
        let coef = self.lambda * self.p * (self.p - T::one());
        let pm2 = self.p - T::lit(2.0);
        for (i, &xi) in x.iter().enumerate() {
            h[(i, i)] += coef * xi.powf(pm2);
        }
        Some(h)
    }

    fn class(&self) -> SmoothnessClass {
        if self.p < T::one() {
            SmoothnessClass::OnceOnInterior
        } else {
            SmoothnessClass::TwiceOnInterior
        }
    }

    fn lipschitz_data(&self) -> Option<LipschitzData<T>> {
        Some(LipschitzData::LpRegularized {
            smooth: Box::new(self.smooth.lipschitz_data()?),
            lambda: self.lambda,
            p: self.p,
        })
    }

    fn family(&self) -> &'static str {
        "lp_regularized"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_examples() {
        let z = zero_objective::<f64>(2);
        assert_eq!(z.value(&[1.0, 2.0]), 0.0);
        assert_eq!(z.gradient(&[1.0, 2.0]), vec![0.0, 0.0]);

        let f = Quadratic::new(Matrix::identity(2), vec![0.0; 2]).unwrap();
        assert_eq!(f.value(&[1.0, 1.0]), 1.0);
        assert_eq!(f.gradient(&[1.0, 1.0]), vec![1.0, 1.0]);

        let q = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 2).unwrap();
        let f = Quadratic::new(q, vec![-1.0, 0.0]).unwrap();
        assert_eq!(f.value(&[2.0, 3.0]), 4.0);
        assert_eq!(f.gradient(&[2.0, 3.0]), vec![2.0, 2.0]);
    }

    #[test]
    fn quadratic_rejects_asymmetric() {
        let q = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]], 2).unwrap();
        assert!(Quadratic::new(q, vec![0.0; 2]).is_err());
    }

    #[test]
    fn lp_examples() {
        let f = LpRegularized::new(Box::new(zero_objective::<f64>(2)), 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(f.value(&[1.0, 4.0]), 3.0, epsilon = 1e-15);
        let g = f.gradient(&[1.0, 4.0]);
        assert_abs_diff_eq!(g[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], 0.25, epsilon = 1e-15);
        assert_eq!(f.class(), SmoothnessClass::OnceOnInterior);

        let f = LpRegularized::new(Box::new(zero_objective::<f64>(3)), 1.0, 1.5).unwrap();
        assert_abs_diff_eq!(f.value(&[1.0; 3]), 3.0, epsilon = 1e-15);
        assert_eq!(f.gradient(&[1.0; 3]), vec![1.5; 3]);
        assert_eq!(f.class(), SmoothnessClass::TwiceOnInterior);

        let h = Quadratic::new(Matrix::identity(2), vec![0.0; 2]).unwrap();
        let f = LpRegularized::new(Box::new(h), 2.0, 0.5).unwrap();
        assert_abs_diff_eq!(f.value(&[0.25, 1.0]), 3.53125, epsilon = 1e-14);
        // continuous up to the boundary
        assert_abs_diff_eq!(f.value(&[0.0, 1.0]), 2.5, epsilon = 1e-15);
    }

    #[test]
    fn lp_rejects_bad_parameters() {
        for p in [0.0, 1.0, 2.0, -0.5, 2.5] {
            assert!(LpRegularized::new(Box::new(zero_objective::<f64>(1)), 1.0, p).is_err());
        }
        assert!(LpRegularized::new(Box::new(zero_objective::<f64>(1)), 0.0, 0.5).is_err());
    }
}
