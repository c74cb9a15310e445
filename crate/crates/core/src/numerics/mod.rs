//! Dense linear-algebra kernel: null-space bases, projections, extreme
//! eigenpairs and least squares.
//!
//! All routines are pure functions of their inputs. Problem sizes are desk
//! scale (n up to a few hundred), so everything is dense.

pub mod decomp;
mod matrix;
pub mod vector;

pub use decomp::{cholesky, cholesky_solve, orthogonal_complement, svd, symmetric_eigen, Svd, SymmetricEigen};
pub use matrix::Matrix;

use crate::error::{Error, Result};
use crate::Scalar;

/// Default relative rank tolerance (`1e-12` in double precision).
pub fn default_tol<T: Scalar>() -> T {
    T::tol(1e-12, 8.0)
}

fn check_finite<T: Scalar>(m: &Matrix<T>, what: &str) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} has non-finite entries")))
    }
}

/// Orthonormal basis of the row space of `m` together with its numerical rank.
///
/// Singular values at or below `tol * max(rows, cols) * sigma_max` count as zero.
pub fn row_space_basis<T: Scalar>(m: &Matrix<T>, tol: T) -> Result<Matrix<T>> {
    check_finite(m, "matrix")?;
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(Matrix::zeros(m.cols(), 0));
    }
    let s = svd(m);
    let rank = numerical_rank(&s.sigma, m.rows().max(m.cols()), tol);
    let keep: Vec<usize> = (0..rank).collect();
    Ok(s.v.select_columns(&keep))
}

fn numerical_rank<T: Scalar>(sigma: &[T], dim: usize, tol: T) -> usize {
    let smax = sigma.first().copied().unwrap_or_else(T::zero);
    if smax == T::zero() {
        return 0;
    }
    let thr = tol * T::from_usize(dim).unwrap_or_else(T::one) * smax;
    sigma.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis `Z` (n x k) of `null(m)`, `k = n - rank(m)`.
///
/// A rank-zero (or zero-row) `m` yields the n x n identity.
pub fn null_space_basis<T: Scalar>(m: &Matrix<T>, tol: T) -> Result<Matrix<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("null-space tolerance must be positive".into()));
    }
    let row = row_space_basis(m, tol)?;
    Ok(orthogonal_complement(&row))
}

/// Orthogonal projection of `v` onto `null(m)`, computed as `v - V Vᵀ v` with
/// `V` an orthonormal row-space basis.
pub fn project_onto_nullspace<T: Scalar>(m: &Matrix<T>, v: &[T], tol: T) -> Result<Vec<T>> {
    if v.len() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for matrix with {} columns",
            v.len(),
            m.cols()
        )));
    }
    let basis = row_space_basis(m, tol)?;
    let coeffs = basis.tr_matvec(v)?;
    let along = basis.matvec(&coeffs)?;
    Ok(vector::sub(v, &along))
}

/// Smallest eigenvalue of a symmetric matrix and a unit eigenvector for it.
pub fn min_eigpair<T: Scalar>(s: &Matrix<T>, tol: T) -> Result<(T, Vec<T>)> {
    check_finite(s, "matrix")?;
    if s.rows() != s.cols() {
        return Err(Error::InvalidInput(format!(
            "eigenproblem needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if s.rows() == 0 {
        return Err(Error::InvalidInput("eigenproblem of an empty matrix".into()));
    }
    if s.asymmetry() > tol * (T::one() + s.norm_max()) {
        return Err(Error::InvalidInput(format!(
            "matrix is not symmetric (asymmetry {:e})",
            s.asymmetry()
        )));
    }
    let e = symmetric_eigen(s);
    Ok((e.values[0], e.vectors.column(0)))
}

/// Minimum-norm minimizer of `|m w - v|`.
pub fn least_squares<T: Scalar>(m: &Matrix<T>, v: &[T]) -> Result<Vec<T>> {
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for matrix with {} rows",
            v.len(),
            m.rows()
        )));
    }
    check_finite(m, "matrix")?;
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(vec![T::zero(); m.cols()]);
    }
    let s = svd(m);
    let rank = numerical_rank(&s.sigma, m.rows().max(m.cols()), default_tol());
    let mut w = vec![T::zero(); m.cols()];
    for j in 0..rank {
        let uj = s.u.column(j);
        let coef = vector::dot(&uj, v) / s.sigma[j];
        for (i, wi) in w.iter_mut().enumerate() {
            *wi += coef * s.v[(i, j)];
        }
    }
    Ok(w)
}
