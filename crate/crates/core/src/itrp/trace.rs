use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use crate::Scalar;

pub const TRACE_HEADER: &str = "iter,f,phi,step_norm,lambda_tr,delta_phi,scaled_kkt_inf,reduced_min_eig";

/// One iteration: the state at `x^t` and the step taken from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IterationRecord<T> {
    pub iter: usize,
    pub f: T,
    pub phi: T,
    pub step_norm: T,
    pub lambda_tr: T,
    /// `φ(x^{t+1}) - φ(x^t)`.
    pub delta_phi: T,
    /// `‖X(∇f + Aᵀy)‖∞` with the subproblem multipliers at `x^t`.
    pub scaled_kkt_inf: T,
    pub reduced_min_eig: Option<T>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolveTrace<T> {
    pub records: Vec<IterationRecord<T>>,
}

impl<T: Scalar> SolveTrace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_HEADER);
        out.push('\n');
        for r in &self.records {
            let eig = r.reduced_min_eig.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.iter, r.f, r.phi, r.step_norm, r.lambda_tr, r.delta_phi, r.scaled_kkt_inf, eig
            );
        }
        out
    }

    pub fn write_csv(&self, mut w: impl io::Write) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}
