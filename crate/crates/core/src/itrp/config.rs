use serde::{Deserialize, Serialize};

use crate::analytic_center::DEFAULT_CENTER_TOL;
use crate::certificate::CertificationLevel;
use crate::error::{Error, Result};
use crate::problem::{SmoothnessClass, SmoothnessProfile};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FirstOrder,
    SecondOrder,
}

/// Which smoothness assumption fixes the parameter schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    /// Scaled quadratic upper model only.
    A3,
    /// Lipschitz scaled Hessian with bounded gradients.
    A4,
    /// Lipschitz scaled Hessian, gradients may blow up at the boundary.
    A5,
    Quadratic,
}

impl Assumption {
    pub fn mode(self) -> Mode {
        match self {
            Assumption::A3 => Mode::FirstOrder,
            _ => Mode::SecondOrder,
        }
    }

    /// Whether an objective of class `class` satisfies this assumption.
    pub fn admits(self, class: SmoothnessClass) -> bool {
        use SmoothnessClass::*;
        match self {
            Assumption::A3 => true,
            Assumption::A4 => matches!(class, TwiceOnInterior | Quadratic),
            Assumption::A5 => matches!(class, TwiceOnInterior | OnceOnInterior | Quadratic),
            Assumption::Quadratic => class == Quadratic,
        }
    }
}

impl std::str::FromStr for Assumption {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a3" => Ok(Assumption::A3),
            "a4" => Ok(Assumption::A4),
            "a5" => Ok(Assumption::A5),
            "quadratic" | "a6" => Ok(Assumption::Quadratic),
            other => Err(Error::InvalidConfig(format!("unknown assumption '{other}'"))),
        }
    }
}

/// Parameters of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolverConfig<T> {
    pub mode: Mode,
    pub assumption: Assumption,
    pub epsilon: T,
    /// Barrier weight.
    pub mu: T,
    /// Trust radius of the scaled step.
    pub beta: T,
    /// A potential change above `-delta_stop` triggers the stopping test.
    pub delta_stop: T,
    /// Which iterate after the trigger is returned (0, 1 or 2).
    pub output_lag: usize,
    /// Smoothness constant the schedule was built from (`gamma` or `eta`).
    pub constant: T,
    /// Coordinate bound used by the schedule.
    pub big_r: T,
    pub max_iters: usize,
    /// Newton-decrement threshold for the starting point.
    pub center_tol: T,
    /// Residual tolerance reported by the trust-region solver.
    pub trs_tol: T,
}

pub const DEFAULT_MAX_ITERS: usize = 100_000;

impl<T: Scalar> SolverConfig<T> {
    fn base(
        assumption: Assumption,
        epsilon: T,
        mu: T,
        beta: T,
        delta_stop: T,
        lag: usize,
        constant: T,
        big_r: T,
    ) -> Self {
        Self {
            mode: assumption.mode(),
            assumption,
            epsilon,
            mu,
            beta,
            delta_stop,
            output_lag: lag,
            constant,
            big_r,
            max_iters: DEFAULT_MAX_ITERS,
            center_tol: T::lit(DEFAULT_CENTER_TOL),
            trs_tol: T::tol(1e-8, 1024.0),
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_center_tol(mut self, tol: T) -> Self {
        self.center_tol = tol;
        self
    }

    /// Schedule for `assumption` from a problem's smoothness profile.
    pub fn for_profile(profile: &SmoothnessProfile<T>, assumption: Assumption, epsilon: T) -> Result<Self> {
        if !assumption.admits(profile.class) {
            return Err(Error::InvalidConfig(format!(
                "objective class {:?} does not satisfy assumption {:?}",
                profile.class, assumption
            )));
        }
        match assumption {
            Assumption::A3 => configure_first_order(epsilon, profile.gamma, profile.r),
            _ => configure_second_order(epsilon, profile.eta.max(T::one()), profile.big_r, profile.r, assumption),
        }
    }

    /// What the output of this schedule is guaranteed to satisfy: first-order
    /// at `2ε`; second-order at `ε` with curvature `√ε` (A4, A5) or `ε`
    /// (quadratic). A5 drops the sign clause.
    pub fn certification_level(&self) -> CertificationLevel<T> {
        let eps = self.epsilon;
        match self.assumption {
            Assumption::A3 => CertificationLevel::first_order(T::lit(2.0) * eps),
            Assumption::A4 => CertificationLevel::second_order(eps, eps.sqrt()),
            Assumption::A5 => CertificationLevel {
                require_sign: false,
                ..CertificationLevel::second_order(eps, eps.sqrt())
            },
            Assumption::Quadratic => CertificationLevel::second_order(eps, eps),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T, name: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.epsilon, "epsilon")?;
        positive(self.mu, "mu")?;
        positive(self.delta_stop, "delta_stop")?;
        positive(self.center_tol, "center tolerance")?;
        positive(self.trs_tol, "trust-region tolerance")?;
        if !(self.beta > T::zero() && self.beta < T::one()) {
            return Err(Error::InvalidConfig(format!(
                "beta must lie in (0,1), got {}",
                self.beta
            )));
        }
        if self.mode != self.assumption.mode() {
            return Err(Error::InvalidConfig(format!(
                "assumption {:?} requires {:?} mode",
                self.assumption,
                self.assumption.mode()
            )));
        }
        Ok(())
    }
}

/// `μ = ε`, `β = μ/(γ + 2μ)`, `δ = ε²/(2γ + 4ε)`; valid for `0 < ε ≤ min(r, 1)`.
pub fn configure_first_order<T: Scalar>(epsilon: T, gamma: T, r: T) -> Result<SolverConfig<T>> {
    if !(gamma >= T::one()) {
        return Err(Error::InvalidConfig(format!("gamma must be >= 1, got {gamma}")));
    }
    let bound = r.min(T::one());
    if !(epsilon > T::zero() && epsilon <= bound) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must lie in (0, min(r, 1)] = (0, {bound}], got {epsilon}"
        )));
    }
    let two = T::lit(2.0);
    let mu = epsilon;
    let beta = mu / (gamma + two * mu);
    let delta = epsilon * epsilon / (two * gamma + T::lit(4.0) * epsilon);
    let cfg = SolverConfig::base(Assumption::A3, epsilon, mu, beta, delta, 0, gamma, T::one());
    cfg.validate()?;
    Ok(cfg)
}

/// Second-order schedules.
///
/// * A4: `μ = ε/(5ηR)`, `β = √(μ/(2η))`, `δ = √ε³/(200η²R^{3/2})`, output lag 1.
/// * A5: `μ = ε/(5η)`, `β = √(μ/(2η))`, `δ = √ε³/(200η²)`, output lag 2.
/// * Quadratic: `μ = ε/4`, `β = 1/4`, `δ = ε/32`, output lag 2.
///
/// A4/A5 need `η ≥ 1` and `0 < ε ≤ min(10η²r², 1/2)`; the quadratic schedule
/// needs `0 < ε ≤ 1/2` and `r ≥ 1/4` (`η` is ignored).
pub fn configure_second_order<T: Scalar>(
    epsilon: T,
    eta: T,
    big_r: T,
    r: T,
    assumption: Assumption,
) -> Result<SolverConfig<T>> {
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::InvalidConfig(format!("r must lie in (0,1), got {r}")));
    }
    let cfg = match assumption {
        Assumption::A3 => {
            return Err(Error::InvalidConfig(
                "assumption a3 has no second-order schedule".into(),
            ))
        }
        Assumption::Quadratic => {
            if !(epsilon > T::zero() && epsilon <= half) {
                return Err(Error::InvalidConfig(format!(
                    "epsilon must lie in (0, 1/2], got {epsilon}"
                )));
            }
            if r < quarter {
                return Err(Error::InvalidConfig(format!(
                    "the quadratic schedule uses beta = 1/4 and needs r >= 1/4, got {r}"
                )));
            }
            SolverConfig::base(
                assumption,
                epsilon,
                epsilon * quarter,
                quarter,
                epsilon / T::lit(32.0),
                2,
                T::zero(),
                big_r,
            )
        }
        Assumption::A4 | Assumption::A5 => {
            if !(eta >= T::one()) {
                return Err(Error::InvalidConfig(format!("eta must be >= 1, got {eta}")));
            }
            if !(big_r >= T::one()) {
                return Err(Error::InvalidConfig(format!("R must be >= 1, got {big_r}")));
            }
            let bound = (T::lit(10.0) * eta * eta * r * r).min(half);
            if !(epsilon > T::zero() && epsilon <= bound) {
                return Err(Error::InvalidConfig(format!(
                    "epsilon must lie in (0, min(10 eta^2 r^2, 1/2)] = (0, {bound}], got {epsilon}"
                )));
            }
            let eps3 = (epsilon * epsilon * epsilon).sqrt();
            let (mu, delta, lag) = if assumption == Assumption::A4 {
                (
                    epsilon / (T::lit(5.0) * eta * big_r),
                    eps3 / (T::lit(200.0) * eta * eta * big_r.powf(T::lit(1.5))),
                    1,
                )
            } else {
                (epsilon / (T::lit(5.0) * eta), eps3 / (T::lit(200.0) * eta * eta), 2)
            };
            let beta = (mu / (T::lit(2.0) * eta)).sqrt();
            if beta > r {
                return Err(Error::InvalidConfig(format!("trust radius {beta} exceeds r = {r}")));
            }
            SolverConfig::base(assumption, epsilon, mu, beta, delta, lag, eta, big_r)
        }
    };
    cfg.validate()?;
    Ok(cfg)
}
