//! Smoothness classes and the constants `gamma`, `eta`, `R`, `r`, `L` that
//! drive step sizes, stopping thresholds and iteration budgets.

use serde::{Deserialize, Serialize};

use super::objective::Objective;
use crate::error::{Error, Result};
use crate::Scalar;

/// Regularity class of the objective on the interior of the feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessClass {
    /// Differentiable on the interior with a scaled quadratic upper model (`gamma`).
    FirstOrderOnly,
    /// Twice differentiable on the interior; `X ∇²f` is Lipschitz in the
    /// scaled step with constant `eta`.
    TwiceOnInterior,
    /// Twice differentiable on the interior; only `X ∇²f X` is Lipschitz.
    /// Gradients may blow up at the boundary.
    OnceOnInterior,
    Quadratic,
}

/// Family data from which the constants are computed.
#[derive(Debug, Clone, PartialEq)]
pub enum LipschitzData<T> {
    /// Quadratic with `‖Q‖₂ = hessian_norm`.
    Quadratic { hessian_norm: T },
    /// Gradient Lipschitz constant `β̂` and Hessian Lipschitz constant `η̂` in
    /// unscaled variables over the feasible set.
    Smooth {
        gradient_lipschitz: T,
        hessian_lipschitz: T,
    },
    /// Smooth part plus `λ Σ xᵢᵖ`.
    LpRegularized {
        smooth: Box<LipschitzData<T>>,
        lambda: T,
        p: T,
    },
}

impl<T: Scalar> LipschitzData<T> {
    /// Constant of the scaled quadratic upper model over `‖d‖ ≤ r`, before
    /// clamping to `≥ 1`.
    fn raw_gamma(&self, big_r: T, r: T) -> T {
        match self {
            LipschitzData::Quadratic { hessian_norm } => *hessian_norm * big_r * big_r,
            LipschitzData::Smooth { gradient_lipschitz, .. } => *gradient_lipschitz * big_r * big_r,
            LipschitzData::LpRegularized { smooth, lambda, p } => {
                let base = smooth.raw_gamma(big_r, r);
                if *p > T::one() {
                    // d²/dd² of λ xᵖ(1+d)ᵖ is largest at d = -r
                    let two = T::lit(2.0);
                    base + *lambda * *p * (*p - T::one()) * big_r.powf(*p) * (T::one() - r).powf(*p - two)
                } else {
                    // concave in d: no upward curvature
                    base
                }
            }
        }
    }

    /// Lipschitz constant of the scaled Hessian (and cubic Taylor constant),
    /// before clamping.
    fn raw_eta(&self, big_r: T, r: T) -> T {
        match self {
            LipschitzData::Quadratic { .. } => T::zero(),
            LipschitzData::Smooth { hessian_lipschitz, .. } => *hessian_lipschitz * big_r * big_r * big_r,
            LipschitzData::LpRegularized { smooth, lambda, p } => {
                let three = T::lit(3.0);
                let two = T::lit(2.0);
                let third = (*p * (*p - T::one()) * (*p - two)).abs();
                smooth.raw_eta(big_r, r) + *lambda * third * big_r.powf(*p) * (T::one() - r).powf(*p - three)
            }
        }
    }
}

/// Constants of the smoothness assumptions for one problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SmoothnessProfile<T> {
    pub class: SmoothnessClass,
    pub gamma: T,
    pub eta: T,
    /// Bound on `‖x‖∞` over the feasible set.
    pub big_r: T,
    /// Radius of the scaled neighbourhood in which the model bounds hold.
    pub r: T,
    /// Lower bound on `f` over the feasible set, when known.
    pub lower_bound: Option<T>,
}

impl<T: Scalar> SmoothnessProfile<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= T::one()) {
            return Err(Error::InvalidInput(format!("gamma must be >= 1, got {}", self.gamma)));
        }
        if !(self.big_r >= T::one()) {
            return Err(Error::InvalidInput(format!("R must be >= 1, got {}", self.big_r)));
        }
        if !(self.r > T::zero() && self.r < T::one()) {
            return Err(Error::InvalidInput(format!("r must lie in (0,1), got {}", self.r)));
        }
        match self.class {
            SmoothnessClass::Quadratic if self.eta != T::zero() => {
                Err(Error::InvalidInput("eta must be 0 for a quadratic objective".into()))
            }
            SmoothnessClass::TwiceOnInterior | SmoothnessClass::OnceOnInterior if !(self.eta >= T::one()) => {
                Err(Error::InvalidInput(format!("eta must be >= 1, got {}", self.eta)))
            }
            _ => Ok(()),
        }
    }
}

/// User-declared constants that take precedence over derived ones.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProfileOverrides<T> {
    pub gamma: Option<T>,
    pub eta: Option<T>,
    pub lower_bound: Option<T>,
}

/// Default `r` when none is declared.
pub const DEFAULT_SMALL_R: f64 = 0.9;

/// Derives `gamma` and `eta` for a built-in family (`γ := β̂R²`, `η := η̂R³`,
/// and the scaled power-function bounds for `λΣxᵢᵖ`). Both are clamped to
/// at least 1, except that `eta` is exactly 0 for quadratics.
pub fn smoothness_constants<T: Scalar>(
    objective: &dyn Objective<T>,
    big_r: T,
    r: T,
    overrides: ProfileOverrides<T>,
) -> Result<SmoothnessProfile<T>> {
    if !(big_r >= T::one()) {
        return Err(Error::InvalidInput(format!("R must be >= 1, got {big_r}")));
    }
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::InvalidInput(format!("r must lie in (0,1), got {r}")));
    }
    let class = objective.class();
    let data = objective.lipschitz_data();
    let gamma = match (overrides.gamma, &data) {
        (Some(g), _) => g,
        (None, Some(d)) => d.raw_gamma(big_r, r).max(T::one()),
        (None, None) => {
            return Err(Error::MissingConstants(format!(
                "objective family '{}' has no derivable gamma; declare it",
                objective.family()
            )))
        }
    };
    let eta = match (class, overrides.eta, &data) {
        (SmoothnessClass::Quadratic, _, _) => T::zero(),
        (_, Some(e), _) => e,
        (_, None, Some(d)) => d.raw_eta(big_r, r).max(T::one()),
        (SmoothnessClass::FirstOrderOnly, None, None) => T::one(),
        (_, None, None) => {
            return Err(Error::MissingConstants(format!(
                "objective family '{}' has no derivable eta; declare it",
                objective.family()
            )))
        }
    };
    let profile = SmoothnessProfile {
        class,
        gamma,
        eta,
        big_r,
        r,
        lower_bound: overrides.lower_bound,
    };
    profile.validate()?;
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use crate::problem::objective::{zero_objective, LpRegularized, Quadratic};

    #[derive(Debug)]
    struct HessLip;

    impl Objective<f64> for HessLip {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            x[0].powi(3) / 3.0
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0] * x[0]]
        }
        fn hessian(&self, x: &[f64]) -> Option<Matrix<f64>> {
            Some(Matrix::from_diag(&[2.0 * x[0]]))
        }
        fn class(&self) -> SmoothnessClass {
            SmoothnessClass::TwiceOnInterior
        }
        fn lipschitz_data(&self) -> Option<LipschitzData<f64>> {
            Some(LipschitzData::Smooth {
                gradient_lipschitz: 4.0,
                hessian_lipschitz: 2.0,
            })
        }
    }

    #[derive(Debug)]
    struct Opaque;

    impl Objective<f64> for Opaque {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            x[0]
        }
        fn gradient(&self, _x: &[f64]) -> Vec<f64> {
            vec![1.0]
        }
        fn hessian(&self, _x: &[f64]) -> Option<Matrix<f64>> {
            None
        }
        fn class(&self) -> SmoothnessClass {
            SmoothnessClass::FirstOrderOnly
        }
    }

    #[test]
    fn quadratic_gamma_and_eta() {
        let f = Quadratic::new(Matrix::identity(2), vec![0.0; 2]).unwrap();
        let p = smoothness_constants(&f, 1.0, 0.9, Default::default()).unwrap();
        assert_eq!(p.gamma, 1.0);
        assert_eq!(p.eta, 0.0);
        let p = smoothness_constants(&f, 3.0, 0.9, Default::default()).unwrap();
        assert_eq!(p.gamma, 9.0);
    }

    #[test]
    fn hessian_lipschitz_scales_with_r_cubed() {
        let p = smoothness_constants(&HessLip, 2.0, 0.9, Default::default()).unwrap();
        assert_eq!(p.eta, 16.0);
        assert_eq!(p.gamma, 16.0);
    }

    #[test]
    fn lp_constants() {
        let f = LpRegularized::new(Box::new(zero_objective::<f64>(2)), 1.0, 1.5).unwrap();
        let p = smoothness_constants(&f, 1.0, 0.5, Default::default()).unwrap();
        // λ p (p-1) (1-r)^(p-2) = 0.75 * 0.5^-0.5
        assert!((p.gamma - 0.75 * 2f64.sqrt()).abs() < 1e-14);
        // λ |p(p-1)(p-2)| (1-r)^(p-3) = 0.375 * 0.5^-1.5, clamped to >= 1
        assert!((p.eta - 0.375 * 0.5f64.powf(-1.5)).abs() < 1e-14);
        let f = LpRegularized::new(Box::new(zero_objective::<f64>(2)), 1.0, 0.5).unwrap();
        let p = smoothness_constants(&f, 1.0, 0.5, Default::default()).unwrap();
        assert_eq!(p.gamma, 1.0);
        assert_eq!(p.class, SmoothnessClass::OnceOnInterior);
    }

    #[test]
    fn custom_objective_needs_declared_constants() {
        let err = smoothness_constants(&Opaque, 1.0, 0.9, Default::default()).unwrap_err();
        assert!(matches!(err, Error::MissingConstants(_)));
        let p = smoothness_constants(
            &Opaque,
            1.0,
            0.9,
            ProfileOverrides {
                gamma: Some(2.0),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(p.gamma, 2.0);
    }

    #[test]
    fn rejects_bad_radii() {
        let f = zero_objective::<f64>(1);
        assert!(smoothness_constants(&f, 0.5, 0.9, Default::default()).is_err());
        assert!(smoothness_constants(&f, 1.0, 1.0, Default::default()).is_err());
    }
}
