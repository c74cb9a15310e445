//! Independent checks used to validate the solver: finite differences, the
//! logarithmic inequality behind the step analysis, a brute-force
//! trust-region solver, and grid minimization over small polytopes.

mod derivatives;
mod grid;
mod lemma;
mod suite;
mod trs;

pub use derivatives::{fd_gradient_check, fd_hessian_check, random_interior_point, FD_GRADIENT_RTOL, FD_HESSIAN_RTOL};
pub use grid::{grid_minimize, GridResult, MAX_GRID_DIM};
pub use lemma::{log_inequality_check, log_inequality_slack, log_inequality_suite};
pub use suite::{default_oracle_fixtures, run_oracle_suite, OracleFixture, SuiteOptions};
pub use trs::{trs_multistart, trs_objective, trs_oracle, trs_oracle_with_grid, MAX_TRS_ORACLE_DIM, TRS_GRID_POINTS};

use serde::{Deserialize, Serialize};

use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OracleReport<T> {
    pub name: String,
    pub max_abs_error: T,
    pub max_rel_error: T,
    pub samples: usize,
    pub tolerance: T,
    pub pass: bool,
}

impl<T: Scalar> OracleReport<T> {
    /// Passes iff `max_rel_error ≤ tolerance`.
    pub fn from_errors(name: impl Into<String>, abs: T, rel: T, samples: usize, tolerance: T) -> Self {
        Self {
            name: name.into(),
            max_abs_error: abs,
            max_rel_error: rel,
            samples,
            tolerance,
            pass: rel <= tolerance,
        }
    }

    /// Combines reports of the same check; passes iff all do.
    pub fn merge(name: impl Into<String>, reports: &[OracleReport<T>]) -> Self {
        let mut out = Self {
            name: name.into(),
            max_abs_error: T::zero(),
            max_rel_error: T::zero(),
            samples: 0,
            tolerance: reports.first().map_or(T::zero(), |r| r.tolerance),
            pass: true,
        };
        for r in reports {
            out.max_abs_error = out.max_abs_error.max(r.max_abs_error);
            out.max_rel_error = out.max_rel_error.max(r.max_rel_error);
            out.samples += r.samples;
            out.pass &= r.pass;
        }
        out
    }
}
