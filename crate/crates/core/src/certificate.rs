//! ε-KKT and ε-KKT2 certificates for `min f(x) s.t. Ax = b, x ≥ 0`.
//!
//! Two levels of checks are provided. The scaled checks (`check_eps_kkt`,
//! `check_eps_kkt2`) test the sufficient conditions in the affine-scaled
//! variables and construct explicit multipliers `s = max(0, ∇f + Aᵀλ)` and
//! `θᵢ = ε/xᵢ²`. `check_definition_level` then re-tests the unscaled
//! definitions clause by clause with whatever multipliers it is handed.

use std::collections::BTreeMap;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{default_tol, least_squares, null_space_basis, symmetric_eigen, vector, Matrix};
use crate::problem::Problem;
use crate::Scalar;

/// Relative slack allowed on exact PSD statements.
const PSD_RTOL: f64 = 1e-9;

fn feasibility_tol<T: Scalar>() -> T {
    T::tol(1e-10, 64.0)
}

/// Outcome of one clause: `slack = bound - value`, so `slack ≥ 0` passes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ClauseCheck<T> {
    pub pass: bool,
    pub slack: T,
}

impl<T: Scalar> ClauseCheck<T> {
    fn upper(value: T, bound: T) -> Self {
        let slack = bound - value;
        Self {
            pass: slack >= T::zero(),
            slack,
        }
    }

    fn flag(pass: bool, slack: T) -> Self {
        Self { pass, slack }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FirstOrderCertificate<T> {
    pub x: Vec<T>,
    pub lambda: Vec<T>,
    pub s: Vec<T>,
    pub epsilon: T,
    /// `x > 0` and `‖Ax - b‖∞ ≤ 1e-10 (1 + ‖b‖∞)`.
    pub feasible: bool,
    pub feasibility_residual: T,
    /// `max(0, -minᵢ (∇f + Aᵀλ)ᵢ)`.
    pub sign_violation: T,
    /// `‖X(∇f + Aᵀλ)‖∞`.
    pub scaled_residual_inf: T,
    /// `‖∇f + Aᵀλ‖∞`, diagnostic only.
    pub unscaled_residual_inf: T,
    /// `‖∇f + Aᵀλ - s‖∞`.
    pub stationarity_inf: T,
    /// `maxᵢ |xᵢ sᵢ|`.
    pub complementarity_inf: T,
}

impl<T: Scalar> FirstOrderCertificate<T> {
    pub fn sign_ok(&self) -> bool {
        self.sign_violation <= self.epsilon
    }

    pub fn stationarity_ok(&self) -> bool {
        self.scaled_residual_inf <= self.epsilon
    }

    /// All sufficient conditions hold.
    pub fn passes(&self) -> bool {
        self.feasible && self.sign_ok() && self.stationarity_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SecondOrderCertificate<T> {
    pub first: FirstOrderCertificate<T>,
    /// Curvature level `ε₂` (may differ from the first-order level).
    pub curvature_epsilon: T,
    /// `θᵢ = ε₂ / xᵢ²`.
    pub theta: Vec<T>,
    /// `λ_min(Zᵀ X∇²f X Z)` with `Z` spanning `null(AX)`; `+inf` when the null
    /// space is trivial.
    pub reduced_min_eig: T,
    /// `reduced_min_eig + ε₂`.
    pub curvature_slack: T,
    /// Rounding allowance on the PSD test.
    pub psd_tol: T,
}

impl<T: Scalar> SecondOrderCertificate<T> {
    pub fn curvature_ok(&self) -> bool {
        self.curvature_slack >= -self.psd_tol
    }

    pub fn passes(&self) -> bool {
        self.first.passes() && self.curvature_ok()
    }
}

fn check_point<T: Scalar>(problem: &Problem<T>, x: &[T], lambda: &[T]) -> Result<()> {
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch(format!(
            "point has length {}, problem has {} variables",
            x.len(),
            problem.dim()
        )));
    }
    if lambda.len() != problem.constraints().num_constraints() {
        return Err(Error::DimensionMismatch(format!(
            "{} multipliers for {} constraints",
            lambda.len(),
            problem.constraints().num_constraints()
        )));
    }
    Ok(())
}

/// `∇f(x) + Aᵀλ`.
pub fn lagrangian_gradient<T: Scalar>(problem: &Problem<T>, x: &[T], lambda: &[T]) -> Result<Vec<T>> {
    check_point(problem, x, lambda)?;
    let g = problem.objective().gradient(x);
    let atl = problem.constraints().a().tr_matvec(lambda)?;
    Ok(vector::add(&g, &atl))
}

/// Multipliers minimizing `‖X(∇f(x) + Aᵀλ)‖₂` (minimum norm under rank
/// deficiency).
pub fn estimate_multipliers<T: Scalar>(problem: &Problem<T>, x: &[T]) -> Result<Vec<T>> {
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch("point has wrong length".into()));
    }
    if let Some((i, v)) = x.iter().enumerate().find(|(_, &v)| !(v > T::zero())) {
        return Err(Error::Domain(format!("x[{i}] = {v} is on or outside the boundary")));
    }
    let m = problem.constraints().num_constraints();
    if m == 0 {
        return Ok(Vec::new());
    }
    let xat = problem.constraints().a().transpose();
    // rows of Aᵀ scaled by x: X Aᵀ
    let mut xat_data = Vec::with_capacity(x.len() * m);
    for (i, &xi) in x.iter().enumerate() {
        xat_data.extend(xat.row(i).iter().map(|&v| v * xi));
    }
    let xat = Matrix::new(x.len(), m, xat_data)?;
    let g = problem.objective().gradient(x);
    let rhs: Vec<T> = g.iter().zip(x).map(|(&gi, &xi)| -(gi * xi)).collect();
    least_squares(&xat, &rhs)
}

/// Scaled first-order check at level `eps`.
pub fn check_eps_kkt<T: Scalar>(
    problem: &Problem<T>,
    x: &[T],
    lambda: &[T],
    eps: T,
) -> Result<FirstOrderCertificate<T>> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let r = lagrangian_gradient(problem, x, lambda)?;
    let cons = problem.constraints();
    let res = cons.residual(x)?;
    let feasibility_residual = vector::norm_inf(&res);
    let feasible = x.iter().all(|&v| v > T::zero())
        && feasibility_residual <= feasibility_tol::<T>() * (T::one() + vector::norm_inf(cons.b()));
    let s: Vec<T> = r.iter().map(|&v| v.max(T::zero())).collect();
    let scaled = vector::hadamard(x, &r);
    let xs = vector::hadamard(x, &s);
    let sign_violation = T::zero().max(-vector::min(&r));
    Ok(FirstOrderCertificate {
        x: x.to_vec(),
        lambda: lambda.to_vec(),
        stationarity_inf: vector::norm_inf(&vector::sub(&r, &s)),
        complementarity_inf: vector::norm_inf(&xs),
        s,
        epsilon: eps,
        feasible,
        feasibility_residual,
        sign_violation,
        scaled_residual_inf: vector::norm_inf(&scaled),
        unscaled_residual_inf: vector::norm_inf(&r),
    })
}

/// Smallest eigenvalue of `Zᵀ(X∇²f X)Z` on `null(AX)` and the PSD rounding
/// allowance for it.
pub fn reduced_scaled_curvature<T: Scalar>(problem: &Problem<T>, x: &[T]) -> Result<(T, T)> {
    let h = problem.objective().hessian(x).ok_or_else(|| {
        Error::Capability(format!(
            "objective family '{}' provides no Hessian",
            problem.objective().family()
        ))
    })?;
    let hs = h.scale_symmetric(x)?.symmetrized();
    let ax = problem.constraints().a().scale_columns(x)?;
    let z = null_space_basis(&ax, default_tol())?;
    if z.cols() == 0 {
        return Ok((T::infinity(), T::zero()));
    }
    let hz = hs.congruence(&z)?.symmetrized();
    let min = symmetric_eigen(&hz).values[0];
    let tol = T::tol(PSD_RTOL, 64.0) * (T::one() + hz.norm_frobenius());
    Ok((min, tol))
}

/// Scaled second-order check: first-order clauses at `eps`, curvature at
/// `eps` as well.
pub fn check_eps_kkt2<T: Scalar>(
    problem: &Problem<T>,
    x: &[T],
    lambda: &[T],
    eps: T,
) -> Result<SecondOrderCertificate<T>> {
    check_eps_kkt2_split(problem, x, lambda, eps, eps)
}

/// Second-order check with separate first-order (`eps`) and curvature
/// (`curvature_eps`) levels.
pub fn check_eps_kkt2_split<T: Scalar>(
    problem: &Problem<T>,
    x: &[T],
    lambda: &[T],
    eps: T,
    curvature_eps: T,
) -> Result<SecondOrderCertificate<T>> {
    let first = check_eps_kkt(problem, x, lambda, eps)?;
    if !(curvature_eps > T::zero()) {
        return Err(Error::InvalidInput("curvature epsilon must be positive".into()));
    }
    let (reduced_min_eig, psd_tol) = reduced_scaled_curvature(problem, x)?;
    let theta = x
        .iter()
        .map(|&xi| {
            // keep xᵢ²θᵢ ≤ ε₂ in floating point
            let mut t = curvature_eps / (xi * xi);
            while xi * xi * t > curvature_eps {
                t = t - t * T::epsilon();
            }
            t
        })
        .collect();
    Ok(SecondOrderCertificate {
        first,
        curvature_epsilon: curvature_eps,
        theta,
        reduced_min_eig,
        curvature_slack: reduced_min_eig + curvature_eps,
        psd_tol,
    })
}

/// Clause-by-clause evaluation of the unscaled definitions with
/// `h(x) = Ax - b`, `c(x) = x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DefinitionReport<T> {
    pub clauses: BTreeMap<String, ClauseCheck<T>>,
}

impl<T: Scalar> DefinitionReport<T> {
    pub fn passes(&self) -> bool {
        self.clauses.values().all(|c| c.pass)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseCheck<T>> {
        self.clauses.get(name)
    }
}

/// Evaluates the first-order definition with `(λ, s)` at level `eps`, and the
/// second-order clauses with `θ` at level `eps2` when `theta` is given.
pub fn check_definition_level<T: Scalar>(
    problem: &Problem<T>,
    x: &[T],
    lambda: &[T],
    s: &[T],
    theta: Option<&[T]>,
    eps: T,
    eps2: T,
) -> Result<DefinitionReport<T>> {
    let n = problem.dim();
    if s.len() != n || theta.is_some_and(|t| t.len() != n) {
        return Err(Error::DimensionMismatch("multiplier length does not match x".into()));
    }
    let r = lagrangian_gradient(problem, x, lambda)?;
    let cons = problem.constraints();
    let mut clauses = BTreeMap::new();

    let feas = vector::norm_inf(&cons.residual(x)?);
    let feas_bound = feasibility_tol::<T>() * (T::one() + vector::norm_inf(cons.b()));
    let min_x = vector::min(x);
    clauses.insert(
        "feasibility".to_string(),
        ClauseCheck::flag(feas <= feas_bound && min_x >= T::zero(), (feas_bound - feas).min(min_x)),
    );
    let min_s = vector::min(s);
    clauses.insert(
        "s_nonnegative".to_string(),
        ClauseCheck::flag(min_s >= T::zero(), min_s),
    );
    let stat = vector::norm_inf(&vector::sub(&r, s));
    clauses.insert("stationarity".to_string(), ClauseCheck::upper(stat, eps));
    let comp = vector::norm_inf(&vector::hadamard(x, s));
    clauses.insert("complementarity".to_string(), ClauseCheck::upper(comp, eps));

    if let Some(theta) = theta {
        let min_t = vector::min(theta);
        clauses.insert(
            "theta_nonnegative".to_string(),
            ClauseCheck::flag(min_t >= T::zero(), min_t),
        );
        let comp2 = x
            .iter()
            .zip(theta)
            .fold(T::zero(), |m, (&xi, &ti)| m.max((xi * xi * ti).abs()));
        clauses.insert("theta_complementarity".to_string(), ClauseCheck::upper(comp2, eps2));

        let h = problem
            .objective()
            .hessian(x)
            .ok_or_else(|| Error::Capability("second-order clauses need a Hessian".into()))?;
        let mut w = h.symmetrized();
        for (i, &ti) in theta.iter().enumerate() {
            w[(i, i)] += ti;
        }
        w.add_diagonal(eps2);
        let z = null_space_basis(cons.a(), default_tol())?;
        let (min_eig, tol) = if z.cols() == 0 {
            (T::infinity(), T::zero())
        } else {
            let wz = w.congruence(&z)?.symmetrized();
            (
                symmetric_eigen(&wz).values[0],
                T::tol(PSD_RTOL, 64.0) * (T::one() + wz.norm_frobenius()),
            )
        };
        clauses.insert("curvature".to_string(), ClauseCheck::flag(min_eig >= -tol, min_eig));
    }
    Ok(DefinitionReport { clauses })
}

/// Which multipliers a certificate was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierSource {
    Subproblem,
    /// Subproblem multipliers from the iteration after the candidate.
    NextSubproblem,
    Estimated,
    Supplied,
}

/// What a certificate must establish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CertificationLevel<T> {
    /// Level of the first-order clauses.
    pub epsilon: T,
    /// Level of the curvature clause; `None` for first-order certificates.
    pub curvature_epsilon: Option<T>,
    /// Whether the sign clause `∇f + Aᵀλ ≥ -ε` is required.
    pub require_sign: bool,
}

impl<T: Scalar> CertificationLevel<T> {
    pub fn first_order(epsilon: T) -> Self {
        Self {
            epsilon,
            curvature_epsilon: None,
            require_sign: true,
        }
    }

    pub fn second_order(epsilon: T, curvature_epsilon: T) -> Self {
        Self {
            epsilon,
            curvature_epsilon: Some(curvature_epsilon),
            require_sign: true,
        }
    }
}

/// Serializable certificate: `{x, lambda, s, theta, epsilon, clauses}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Certificate<T> {
    pub x: Vec<T>,
    pub lambda: Vec<T>,
    pub s: Vec<T>,
    pub theta: Option<Vec<T>>,
    pub epsilon: T,
    pub curvature_epsilon: Option<T>,
    pub clauses: BTreeMap<String, ClauseCheck<T>>,
    pub passed: bool,
    pub multiplier_source: MultiplierSource,
    pub reduced_min_eig: Option<T>,
    pub scaled_residual_inf: T,
}

impl<T: Scalar> Certificate<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Evaluates `x` with the given multipliers at `level` and assembles the
/// scaled and definition-level clauses.
pub fn certify_point<T: Scalar>(
    problem: &Problem<T>,
    x: &[T],
    lambda: &[T],
    level: CertificationLevel<T>,
    source: MultiplierSource,
) -> Result<Certificate<T>> {
    let mut clauses = BTreeMap::new();
    let (first, second) = match level.curvature_epsilon {
        Some(c) => {
            let so = check_eps_kkt2_split(problem, x, lambda, level.epsilon, c)?;
            (so.first.clone(), Some(so))
        }
        None => (check_eps_kkt(problem, x, lambda, level.epsilon)?, None),
    };
    let eps = level.epsilon;
    clauses.insert(
        "scaled_feasibility".to_string(),
        ClauseCheck::flag(first.feasible, -first.feasibility_residual),
    );
    let sign = ClauseCheck::upper(first.sign_violation, eps);
    let sign_name = if level.require_sign {
        "scaled_sign"
    } else {
        "scaled_sign_informational"
    };
    clauses.insert(sign_name.to_string(), sign);
    clauses.insert(
        "scaled_stationarity".to_string(),
        ClauseCheck::upper(first.scaled_residual_inf, eps),
    );
    let mut passed = first.feasible && first.stationarity_ok() && (!level.require_sign || sign.pass);
    let mut theta = None;
    let mut reduced_min_eig = None;
    if let Some(so) = &second {
        clauses.insert(
            "scaled_curvature".to_string(),
            ClauseCheck::flag(so.curvature_ok(), so.curvature_slack),
        );
        passed &= so.curvature_ok();
        theta = Some(so.theta.clone());
        reduced_min_eig = Some(so.reduced_min_eig);
    }
    // the definition-level clauses are reported; they bind only when the sign
    // clause is part of the guarantee
    let def = check_definition_level(
        problem,
        x,
        lambda,
        &first.s,
        theta.as_deref(),
        eps,
        level.curvature_epsilon.unwrap_or(eps),
    )?;
    for (name, c) in def.clauses {
        if level.require_sign {
            passed &= c.pass;
            clauses.insert(format!("definition_{name}"), c);
        } else {
            clauses.insert(format!("definition_{name}_informational"), c);
        }
    }
    Ok(Certificate {
        x: x.to_vec(),
        lambda: lambda.to_vec(),
        s: first.s,
        theta,
        epsilon: eps,
        curvature_epsilon: level.curvature_epsilon,
        clauses,
        passed,
        multiplier_source: source,
        reduced_min_eig,
        scaled_residual_inf: first.scaled_residual_inf,
    })
}

/// Tries each multiplier candidate in order, then the scaled least-squares
/// estimate. Returns the first passing certificate, or the one with the
/// smallest scaled residual when none passes.
pub fn certify_with_candidates<T: Scalar>(
    problem: &Problem<T>,
    x: &[T],
    candidates: &[(Vec<T>, MultiplierSource)],
    level: CertificationLevel<T>,
) -> Result<Certificate<T>> {
    let mut best: Option<Certificate<T>> = None;
    let estimated = estimate_multipliers(problem, x)?;
    let all = candidates
        .iter()
        .map(|(l, s)| (l.as_slice(), *s))
        .chain(std::iter::once((estimated.as_slice(), MultiplierSource::Estimated)));
    for (lambda, source) in all {
        let cert = certify_point(problem, x, lambda, level, source)?;
        if cert.passed {
            debug!("certified with {source:?} multipliers");
            return Ok(cert);
        }
        let better = best
            .as_ref()
            .map_or(true, |b| cert.scaled_residual_inf < b.scaled_residual_inf);
        if better {
            best = Some(cert);
        }
    }
    Ok(best.expect("at least the estimated multipliers are tried"))
}
