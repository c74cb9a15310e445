//! The interior trust-region point iteration.
//!
//! From an approximate analytic center `x⁰`, each iteration solves the scaled
//! subproblem at `x^t` and moves to `x^{t+1} = X_t(e + d^t)`. Since `‖d‖ ≤ β < 1`
//! and `AX_t d = 0`, every iterate stays strictly feasible. The run stops once
//! the potential `φ(x) = f(x) - μ Σ log xᵢ` fails to decrease by `δ` (once in
//! first-order mode, twice in a row in second-order mode) and the candidate
//! output certifies.

mod config;
mod trace;

pub use config::{configure_first_order, configure_second_order, Assumption, Mode, SolverConfig, DEFAULT_MAX_ITERS};
pub use trace::{IterationRecord, SolveTrace, TRACE_HEADER};

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::analytic_center::{analytic_center, CenterResult};
use crate::certificate::{certify_with_candidates, Certificate, MultiplierSource};
use crate::error::{Error, Result};
use crate::numerics::vector;
use crate::problem::{potential, Problem};
use crate::subproblem::{solve_first_order, solve_trs, ScaledSubproblem, SubproblemSolution};
use crate::Scalar;

/// Worst-case iteration count of the schedule in `config`, with the unknown
/// optimal value replaced by `f_lower` and the centering constant by `c0`.
///
/// With `gap = max(0, f0 - f_lower + c0 - ε)`:
///
/// * first order: `⌈gap (2γ + 4ε) / ε²⌉`
/// * A4: `⌈400 η² R^{3/2} gap (2η + 4ε) / √ε³ + 1⌉`
/// * A5: `⌈400 η² gap (2η + 4ε) / √ε³ + 1⌉`
/// * quadratic: `⌈(64 gap + 1) / ε⌉`
pub fn theoretical_budget<T: Scalar>(config: &SolverConfig<T>, f0: T, f_lower: T, c0: T) -> Result<u64> {
    if !(f0.is_finite() && f_lower.is_finite() && c0.is_finite()) {
        return Err(Error::InvalidInput("budget inputs must be finite".into()));
    }
    let slack = T::tol(1e-12, 16.0) * (T::one() + f0.abs());
    if f0 < f_lower - slack {
        return Err(Error::InvalidInput(format!(
            "lower bound {f_lower} exceeds the initial value {f0}"
        )));
    }
    if c0 < T::zero() {
        return Err(Error::InvalidInput(format!(
            "centering constant must be >= 0, got {c0}"
        )));
    }
    let eps = config.epsilon;
    let gap = (f0 - f_lower + c0 - eps).max(T::zero());
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let eps3 = (eps * eps * eps).sqrt();
    let raw = match config.assumption {
        Assumption::A3 => gap * (two * config.constant + four * eps) / (eps * eps),
        Assumption::A4 | Assumption::A5 => {
            let eta = config.constant;
            let r_term = if config.assumption == Assumption::A4 {
                config.big_r.powf(T::lit(1.5))
            } else {
                T::one()
            };
            T::lit(400.0) * eta * eta * r_term * gap * (two * eta + four * eps) / eps3 + T::one()
        }
        Assumption::Quadratic => (T::lit(64.0) * gap + T::one()) / eps,
    };
    let v = raw.ceil().as_f64();
    if v >= u64::MAX as f64 {
        Ok(u64::MAX)
    } else {
        Ok(v as u64)
    }
}

/// One iteration from `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult<T> {
    pub x_next: Vec<T>,
    pub solution: SubproblemSolution<T>,
    pub f: T,
    pub phi: T,
    pub phi_next: T,
    pub delta_phi: T,
}

/// Builds the scaled subproblem at `x` (`g = X∇φ`, `H = X∇²fX` in
/// second-order mode, `M = AX`) and takes the step `x⁺ = X(e + d)`.
pub fn step<T: Scalar>(problem: &Problem<T>, x: &[T], config: &SolverConfig<T>) -> Result<StepResult<T>> {
    let mu = config.mu;
    let phi = potential(problem, x, mu)?;
    let obj = problem.objective();
    let grad = obj.gradient(x);
    if !vector::all_finite(&grad) {
        return Err(Error::Domain("gradient is not finite at the current iterate".into()));
    }
    let g: Vec<T> = grad.iter().zip(x).map(|(&gi, &xi)| xi * gi - mu).collect();
    let m = problem.constraints().a().scale_columns(x)?;
    let solution = match config.mode {
        Mode::FirstOrder => solve_first_order(&ScaledSubproblem::new(g, None, m, config.beta)?)?,
        Mode::SecondOrder => {
            let h = obj.hessian(x).ok_or_else(|| {
                Error::Capability(format!(
                    "second-order mode needs a Hessian; objective family '{}' has none",
                    obj.family()
                ))
            })?;
            let h = h.scale_symmetric(x)?;
            solve_trs(&ScaledSubproblem::new(g, Some(h), m, config.beta)?, config.trs_tol)?
        }
    };
    let x_next: Vec<T> = x
        .iter()
        .zip(&solution.d)
        .map(|(&xi, &di)| xi * (T::one() + di))
        .collect();
    let phi_next = potential(problem, &x_next, mu)?;
    Ok(StepResult {
        f: obj.value(x),
        delta_phi: phi_next - phi,
        x_next,
        solution,
        phi,
        phi_next,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    CertifiedFirstOrder,
    CertifiedSecondOrder,
    BudgetExhausted,
}

impl SolveStatus {
    pub fn is_certified(self) -> bool {
        self != SolveStatus::BudgetExhausted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolveResult<T> {
    pub status: SolveStatus,
    pub x_final: Vec<T>,
    pub certificate: Option<Certificate<T>>,
    pub trace: SolveTrace<T>,
    /// Subproblems solved.
    pub iterations: usize,
    /// `t` at which the stopping test fired for the returned point.
    pub termination_index: Option<usize>,
    /// Index of the returned iterate.
    pub output_index: Option<usize>,
    /// Theoretical budget when a lower bound on `f` is known.
    pub budget: Option<u64>,
    pub center: CenterResult<T>,
}

impl<T: Scalar> SolveResult<T> {
    /// Whether the run stopped within its theoretical budget (`None` when
    /// the budget or the stopping index is unknown).
    pub fn within_budget(&self) -> Option<bool> {
        Some(self.termination_index? as u64 <= self.budget?)
    }

    /// Largest scaled KKT residual of the returned certificate.
    pub fn residual(&self) -> Option<T> {
        self.certificate.as_ref().map(|c| c.scaled_residual_inf)
    }
}

/// Runs the method from the approximate analytic center.
pub fn solve<T: Scalar>(problem: &Problem<T>, config: &SolverConfig<T>) -> Result<SolveResult<T>> {
    solve_with_observer(problem, config, |_, _| {})
}

/// Like [`solve`], calling `observer(t, x^t)` for every iterate, `x⁰` included.
pub fn solve_with_observer<T: Scalar>(
    problem: &Problem<T>,
    config: &SolverConfig<T>,
    observer: impl FnMut(usize, &[T]),
) -> Result<SolveResult<T>> {
    config.validate()?;
    let center = analytic_center(problem.constraints(), config.center_tol)?;
    solve_from_center(problem, config, center, observer)
}

struct Visited<T> {
    y: Vec<T>,
    delta_phi: T,
}

/// Runs the method from a precomputed center.
pub fn solve_from_center<T: Scalar>(
    problem: &Problem<T>,
    config: &SolverConfig<T>,
    center: CenterResult<T>,
    mut observer: impl FnMut(usize, &[T]),
) -> Result<SolveResult<T>> {
    config.validate()?;
    let class = problem.objective().class();
    if !config.assumption.admits(class) {
        return Err(Error::InvalidConfig(format!(
            "objective class {class:?} does not satisfy assumption {:?}",
            config.assumption
        )));
    }
    let f0 = problem.objective().value(&center.x0);
    let budget = match problem.profile().and_then(|p| p.lower_bound) {
        Some(lower) => Some(theoretical_budget(config, f0, lower, center.c0)?),
        None => None,
    };
    let level = config.certification_level();
    let certified_status = match config.mode {
        Mode::FirstOrder => SolveStatus::CertifiedFirstOrder,
        Mode::SecondOrder => SolveStatus::CertifiedSecondOrder,
    };

    let mut trace = SolveTrace::default();
    let mut x = center.x0.clone();
    observer(0, &x);
    let mut best: (T, Vec<T>) = (T::infinity(), x.clone());
    // multipliers and potential change of the previous iteration
    let mut prev: Option<Visited<T>> = None;

    let finish = |status, x_final, certificate, trace, iterations, term: Option<usize>, out: Option<usize>, center| {
        SolveResult {
            status,
            x_final,
            certificate,
            trace,
            iterations,
            termination_index: term,
            output_index: out,
            budget,
            center,
        }
    };

    for t in 0..config.max_iters {
        let st = step(problem, &x, config)?;
        let y = st.solution.y.clone();
        let scaled_kkt = {
            let grad = problem.objective().gradient(&x);
            let aty = problem.constraints().a().tr_matvec(&y)?;
            let r: Vec<T> = grad
                .iter()
                .zip(&aty)
                .zip(&x)
                .map(|((&g, &a), &xi)| xi * (g + a))
                .collect();
            vector::norm_inf(&r)
        };
        trace.records.push(IterationRecord {
            iter: t,
            f: st.f,
            phi: st.phi,
            step_norm: vector::norm2(&st.solution.d),
            lambda_tr: st.solution.lambda_tr,
            delta_phi: st.delta_phi,
            scaled_kkt_inf: scaled_kkt,
            reduced_min_eig: st.solution.reduced_min_eig,
        });
        debug!(
            "iter {t}: f {:e} phi {:e} dphi {:e} |d| {:e}",
            st.f.as_f64(),
            st.phi.as_f64(),
            st.delta_phi.as_f64(),
            vector::norm2(&st.solution.d).as_f64()
        );
        if scaled_kkt < best.0 {
            best = (scaled_kkt, x.clone());
        }
        observer(t + 1, &st.x_next);
        let stalled = st.delta_phi > -config.delta_stop;

        match config.mode {
            Mode::FirstOrder if stalled => {
                let cert = certify_with_candidates(problem, &x, &[(y.clone(), MultiplierSource::Subproblem)], level)?;
                if cert.passed {
                    info!("stopping test fired at t = {t}; output certified");
                    return Ok(finish(
                        certified_status,
                        x,
                        Some(cert),
                        trace,
                        t + 1,
                        Some(t),
                        Some(t),
                        center,
                    ));
                }
                debug!("stopping test fired at t = {t} but certification failed; continuing");
            }
            Mode::SecondOrder => {
                if let Some(p) = prev.as_ref().filter(|p| stalled && p.delta_phi > -config.delta_stop) {
                    // trigger at t-1: candidates x^t (lag 1) and x^{t+1} (lag 2)
                    let lag1 = (
                        t,
                        x.clone(),
                        vec![
                            (p.y.clone(), MultiplierSource::Subproblem),
                            (y.clone(), MultiplierSource::NextSubproblem),
                        ],
                    );
                    let lag2 = (
                        t + 1,
                        st.x_next.clone(),
                        vec![(y.clone(), MultiplierSource::Subproblem)],
                    );
                    let order = if config.output_lag == 1 {
                        [lag1, lag2]
                    } else {
                        [lag2, lag1]
                    };
                    for (k, (idx, cand, mults)) in order.into_iter().enumerate() {
                        let cert = certify_with_candidates(problem, &cand, &mults, level)?;
                        if cert.passed {
                            if k > 0 {
                                info!("preferred output failed certification; returning x^{idx} instead");
                            }
                            info!("stopping test fired at t = {}; output x^{idx} certified", t - 1);
                            return Ok(finish(
                                certified_status,
                                cand,
                                Some(cert),
                                trace,
                                t + 1,
                                Some(t - 1),
                                Some(idx),
                                center,
                            ));
                        }
                    }
                    debug!(
                        "stopping test fired at t = {} but neither candidate certified; continuing",
                        t - 1
                    );
                }
            }
            Mode::FirstOrder => {}
        }
        prev = Some(Visited {
            y,
            delta_phi: st.delta_phi,
        });
        x = st.x_next;
    }
    info!("iteration limit {} reached without a certified point", config.max_iters);
    let iterations = trace.len();
    let x_final = if iterations == 0 { x } else { best.1 };
    Ok(finish(
        SolveStatus::BudgetExhausted,
        x_final,
        None,
        trace,
        iterations,
        None,
        None,
        center,
    ))
}
