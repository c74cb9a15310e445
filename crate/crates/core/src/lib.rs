//! Interior trust-region point method for `min f(x) s.t. Ax = b, x ≥ 0`
//! where `f` need not be differentiable on the boundary.

// `!(a > b)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic_center;
pub mod certificate;
mod error;
pub mod fixtures;
pub mod itrp;
pub mod lp;
pub mod numerics;
pub mod oracle;
pub mod problem;
mod scalar;
pub mod subproblem;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix64 = numerics::Matrix<f64>;
pub type Matrix32 = numerics::Matrix<f32>;
pub type Problem64 = problem::Problem<f64>;
pub type Problem32 = problem::Problem<f32>;
