//! Problem model: `min f(x) s.t. Ax = b, x ≥ 0`.

mod file;
mod objective;
mod smoothness;

pub use file::{parse_problem, read_problem, ObjectiveSpec, ProblemFile, ProfileSpec};
pub use objective::{
    lp_regularized_objective, quadratic_objective, zero_objective, LpRegularized, Objective, Quadratic,
};
pub use smoothness::{
    smoothness_constants, LipschitzData, ProfileOverrides, SmoothnessClass, SmoothnessProfile, DEFAULT_SMALL_R,
};

use crate::error::{Error, Result};
use crate::numerics::{vector, Matrix};
use crate::Scalar;

/// Equality constraints `Ax = b` of the feasible set `{Ax = b, x ≥ 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraints<T> {
    a: Matrix<T>,
    b: Vec<T>,
}

impl<T: Scalar> LinearConstraints<T> {
    pub fn new(a: Matrix<T>, b: Vec<T>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows, b has length {}",
                a.rows(),
                b.len()
            )));
        }
        if a.rows() > a.cols() {
            return Err(Error::InvalidInput(format!(
                "more constraints than variables ({} > {})",
                a.rows(),
                a.cols()
            )));
        }
        if a.cols() == 0 {
            return Err(Error::InvalidInput("no variables".into()));
        }
        if !a.is_finite() || !vector::all_finite(&b) {
            return Err(Error::InvalidInput("constraints have non-finite entries".into()));
        }
        Ok(Self { a, b })
    }

    /// The probability simplex `{Σxᵢ = 1}` in `n` variables.
    pub fn simplex(n: usize) -> Result<Self> {
        Self::new(Matrix::new(1, n, vec![T::one(); n])?, vec![T::one()])
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn num_constraints(&self) -> usize {
        self.a.rows()
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    /// `Ax - b`.
    pub fn residual(&self, x: &[T]) -> Result<Vec<T>> {
        let ax = self.a.matvec(x)?;
        Ok(vector::sub(&ax, &self.b))
    }
}

/// True iff `min xᵢ > 0` and `‖Ax - b‖∞ ≤ tol (1 + ‖b‖∞)`.
pub fn is_strictly_feasible<T: Scalar>(constraints: &LinearConstraints<T>, x: &[T], tol: T) -> bool {
    if x.len() != constraints.dim() || !vector::all_finite(x) {
        return false;
    }
    if x.iter().any(|&xi| xi <= T::zero()) {
        return false;
    }
    match constraints.residual(x) {
        Ok(r) => vector::norm_inf(&r) <= tol * (T::one() + vector::norm_inf(&constraints.b)),
        Err(_) => false,
    }
}

/// An objective together with its constraints and (once known) its
/// smoothness constants.
#[derive(Debug)]
pub struct Problem<T: Scalar> {
    objective: Box<dyn Objective<T>>,
    constraints: LinearConstraints<T>,
    profile: Option<SmoothnessProfile<T>>,
}

impl<T: Scalar> Problem<T> {
    pub fn new(objective: Box<dyn Objective<T>>, constraints: LinearConstraints<T>) -> Result<Self> {
        if objective.dim() != constraints.dim() {
            return Err(Error::DimensionMismatch(format!(
                "objective has {} variables, constraints have {}",
                objective.dim(),
                constraints.dim()
            )));
        }
        Ok(Self {
            objective,
            constraints,
            profile: None,
        })
    }

    pub fn with_profile(mut self, profile: SmoothnessProfile<T>) -> Result<Self> {
        profile.validate()?;
        self.profile = Some(profile);
        Ok(self)
    }

    /// Computes the smoothness profile from the objective family. `R` is taken
    /// from `big_r` when given, otherwise from the coordinate bound of the
    /// feasible polytope.
    pub fn with_derived_profile(self, big_r: Option<T>, r: Option<T>, overrides: ProfileOverrides<T>) -> Result<Self> {
        let big_r = match big_r {
            Some(v) => v,
            None => crate::analytic_center::coordinate_bound(&self.constraints)?,
        };
        let r = r.unwrap_or_else(|| T::lit(DEFAULT_SMALL_R));
        let profile = smoothness_constants(self.objective.as_ref(), big_r, r, overrides)?;
        self.with_profile(profile)
    }

    pub fn objective(&self) -> &dyn Objective<T> {
        self.objective.as_ref()
    }

    pub fn constraints(&self) -> &LinearConstraints<T> {
        &self.constraints
    }

    pub fn profile(&self) -> Option<&SmoothnessProfile<T>> {
        self.profile.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.constraints.dim()
    }

    /// Records a lower bound on `f` over the feasible set.
    pub fn set_lower_bound(&mut self, lower: T) {
        if let Some(p) = self.profile.as_mut() {
            p.lower_bound = Some(lower);
        }
    }

    fn check_interior(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has length {}, problem has {} variables",
                x.len(),
                self.dim()
            )));
        }
        if let Some((i, v)) = x.iter().enumerate().find(|(_, &v)| !(v > T::zero())) {
            return Err(Error::Domain(format!("x[{i}] = {v} is not strictly positive")));
        }
        Ok(())
    }
}

/// `φ(x) = f(x) - μ Σ log xᵢ`.
pub fn potential<T: Scalar>(problem: &Problem<T>, x: &[T], mu: T) -> Result<T> {
    problem.check_interior(x)?;
    let barrier: T = x.iter().map(|v| v.ln()).sum();
    Ok(problem.objective.value(x) - mu * barrier)
}

/// `∇φ(x) = ∇f(x) - μ X⁻¹e`.
pub fn potential_gradient<T: Scalar>(problem: &Problem<T>, x: &[T], mu: T) -> Result<Vec<T>> {
    problem.check_interior(x)?;
    let mut g = problem.objective.gradient(x);
    for (gi, &xi) in g.iter_mut().zip(x) {
        *gi -= mu / xi;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn simplex_problem(obj: Box<dyn Objective<f64>>) -> Problem<f64> {
        let n = obj.dim();
        Problem::new(obj, LinearConstraints::simplex(n).unwrap()).unwrap()
    }

    #[test]
    fn potential_examples() {
        let p = simplex_problem(Box::new(zero_objective(2)));
        assert_eq!(potential(&p, &[1.0, 1.0], 3.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            potential(&p, &[std::f64::consts::E, 1.0], 1.0).unwrap(),
            -1.0,
            epsilon = 1e-15
        );
        let q = Quadratic::new(Matrix::identity(2), vec![0.0; 2]).unwrap();
        let p = simplex_problem(Box::new(q));
        assert_abs_diff_eq!(
            potential(&p, &[1.0, 2.0], 0.5).unwrap(),
            2.5 - 0.5 * 2f64.ln(),
            epsilon = 1e-15
        );
        assert!(matches!(potential(&p, &[0.0, 1.0], 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn potential_gradient_examples() {
        let p = simplex_problem(Box::new(zero_objective(2)));
        assert_eq!(potential_gradient(&p, &[1.0, 1.0], 1.0).unwrap(), vec![-1.0, -1.0]);
        let q = Quadratic::new(Matrix::identity(2), vec![0.0; 2]).unwrap();
        let p = simplex_problem(Box::new(q));
        assert_eq!(potential_gradient(&p, &[1.0, 1.0], 1.0).unwrap(), vec![0.0, 0.0]);
        let lp = LpRegularized::new(Box::new(zero_objective(2)), 1.0, 0.5).unwrap();
        let p = simplex_problem(Box::new(lp));
        let g = potential_gradient(&p, &[1.0, 4.0], 0.1).unwrap();
        assert_abs_diff_eq!(g[0], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], 0.225, epsilon = 1e-15);
        assert!(potential_gradient(&p, &[-1.0, 2.0], 0.1).is_err());
    }

    #[test]
    fn strict_feasibility() {
        let c = LinearConstraints::<f64>::simplex(4).unwrap();
        assert!(is_strictly_feasible(&c, &[0.25; 4], 1e-10));
        assert!(!is_strictly_feasible(&c, &[0.5, 0.5, 0.0, 0.0], 1e-10));
        let c = LinearConstraints::<f64>::simplex(2).unwrap();
        assert!(is_strictly_feasible(&c, &[0.6, 0.4], 1e-10));
        assert!(!is_strictly_feasible(&c, &[0.6, 0.5], 1e-10));
    }

    #[test]
    fn constraint_validation() {
        let a = Matrix::<f64>::zeros(3, 2);
        assert!(LinearConstraints::new(a, vec![0.0; 3]).is_err());
        let a = Matrix::<f64>::zeros(1, 2);
        assert!(LinearConstraints::new(a, vec![0.0; 2]).is_err());
        let obj = Box::new(zero_objective::<f64>(3));
        assert!(Problem::new(obj, LinearConstraints::simplex(2).unwrap()).is_err());
    }
}
