//! JSON problem files.
//!
//! ```json
//! {
//!   "constraints": {"A": [[1, 1]], "b": [1]},
//!   "objective": {"family": "quadratic", "Q": [[1, 0], [0, -1]], "c": [0, 0]},
//!   "profile": {"r": 0.5, "L": -1.0}
//! }
//! ```
//!
//! `lp_regularized` objectives carry `lambda`, `p` and an optional
//! `smooth_part` (itself an objective; zero when absent). Every profile entry
//! is optional; missing ones are derived.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::objective::{zero_objective, LpRegularized, Objective, Quadratic};
use super::smoothness::ProfileOverrides;
use super::{LinearConstraints, Problem};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ConstraintSpec<T> {
    #[serde(rename = "A")]
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", bound = "T: Scalar")]
pub enum ObjectiveSpec<T> {
    Quadratic {
        #[serde(rename = "Q")]
        q: Vec<Vec<T>>,
        c: Vec<T>,
    },
    LpRegularized {
        lambda: T,
        p: T,
        #[serde(default)]
        smooth_part: Option<Box<ObjectiveSpec<T>>>,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct ProfileSpec<T> {
    #[serde(rename = "R", default)]
    pub big_r: Option<T>,
    #[serde(default)]
    pub r: Option<T>,
    #[serde(default)]
    pub gamma: Option<T>,
    #[serde(default)]
    pub eta: Option<T>,
    #[serde(rename = "L", default)]
    pub lower_bound: Option<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ProblemFile<T> {
    pub constraints: ConstraintSpec<T>,
    pub objective: ObjectiveSpec<T>,
    #[serde(default)]
    pub profile: ProfileSpec<T>,
}

fn matrix_from_rows<T: Scalar>(rows: &[Vec<T>], cols: usize, what: &str) -> Result<Matrix<T>> {
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch(format!(
            "{what} row has length {}, expected {cols}",
            bad.len()
        )));
    }
    Matrix::from_rows(rows, cols)
}

impl<T: Scalar> ObjectiveSpec<T> {
    pub fn build(&self, n: usize) -> Result<Box<dyn Objective<T>>> {
        match self {
            ObjectiveSpec::Quadratic { q, c } => {
                if q.len() != n || c.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "quadratic objective has Q with {} rows and c of length {}, expected {n}",
                        q.len(),
                        c.len()
                    )));
                }
                let q = matrix_from_rows(q, n, "Q")?;
                Ok(Box::new(Quadratic::new(q, c.clone())?))
            }
            ObjectiveSpec::LpRegularized { lambda, p, smooth_part } => {
                let smooth = match smooth_part {
                    Some(s) => s.build(n)?,
                    None => Box::new(zero_objective(n)),
                };
                Ok(Box::new(LpRegularized::new(smooth, *lambda, *p)?))
            }
        }
    }
}

impl<T: Scalar> ProblemFile<T> {
    /// Builds the problem and derives its smoothness profile.
    pub fn into_problem(self) -> Result<Problem<T>> {
        let m = self.constraints.a.len();
        let n = match self.constraints.a.first() {
            Some(row) => row.len(),
            None => match &self.objective {
                ObjectiveSpec::Quadratic { c, .. } => c.len(),
                ObjectiveSpec::LpRegularized { .. } => {
                    return Err(Error::InvalidInput("cannot infer dimension without constraints".into()))
                }
            },
        };
        let a = if m == 0 {
            Matrix::zeros(0, n)
        } else {
            matrix_from_rows(&self.constraints.a, n, "A")?
        };
        let constraints = LinearConstraints::new(a, self.constraints.b)?;
        let objective = self.objective.build(n)?;
        let overrides = ProfileOverrides {
            gamma: self.profile.gamma,
            eta: self.profile.eta,
            lower_bound: self.profile.lower_bound,
        };
        Problem::new(objective, constraints)?.with_derived_profile(self.profile.big_r, self.profile.r, overrides)
    }
}

/// Parses a problem from JSON text.
pub fn parse_problem<T: Scalar>(text: &str) -> Result<Problem<T>> {
    let file: ProblemFile<T> =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("problem file: {e}")))?;
    file.into_problem()
}

/// Reads and parses a problem file.
pub fn read_problem<T: Scalar>(path: impl AsRef<Path>) -> Result<Problem<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::SmoothnessClass;

    #[test]
    fn parses_quadratic() {
        let text = r#"{
            "constraints": {"A": [[1, 1]], "b": [1]},
            "objective": {"family": "quadratic", "Q": [[1, 0], [0, -1]], "c": [0, 0]},
            "profile": {"r": 0.5, "L": -1.0}
        }"#;
        let p = parse_problem::<f64>(text).unwrap();
        let prof = p.profile().unwrap();
        assert_eq!(prof.class, SmoothnessClass::Quadratic);
        assert_eq!(prof.big_r, 1.0);
        assert_eq!(prof.gamma, 1.0);
        assert_eq!(prof.lower_bound, Some(-1.0));
    }

    #[test]
    fn parses_nested_lp() {
        let text = r#"{
            "constraints": {"A": [[1, 1, 1]], "b": [3]},
            "objective": {"family": "lp_regularized", "lambda": 0.5, "p": 0.5,
                          "smooth_part": {"family": "quadratic", "Q": [[1,0,0],[0,1,0],[0,0,1]], "c": [0,0,0]}},
            "profile": {"r": 0.5}
        }"#;
        let p = parse_problem::<f64>(text).unwrap();
        let prof = p.profile().unwrap();
        assert_eq!(prof.class, SmoothnessClass::OnceOnInterior);
        assert!((prof.big_r - 3.0).abs() < 1e-12);
        assert!((p.objective().value(&[1.0, 1.0, 1.0]) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_problem::<f64>("{").is_err());
        let ragged = r#"{"constraints": {"A": [[1, 1], [1]], "b": [1, 1]},
            "objective": {"family": "quadratic", "Q": [[1,0],[0,1]], "c": [0,0]}}"#;
        assert!(parse_problem::<f64>(ragged).is_err());
        let bad_p = r#"{"constraints": {"A": [[1, 1]], "b": [1]},
            "objective": {"family": "lp_regularized", "lambda": 1, "p": 1}}"#;
        assert!(parse_problem::<f64>(bad_p).is_err());
    }
}
