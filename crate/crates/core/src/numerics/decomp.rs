//! Dense factorizations: one-sided Jacobi SVD, cyclic Jacobi symmetric
//! eigensolver, Householder orthogonal completion and Cholesky.
//!
//! Jacobi methods are slow for large matrices but compute small singular
//! values and eigenvalues to high relative accuracy, which matters for rank
//! decisions and for the trust-region hard case.

use super::matrix::Matrix;
use super::vector::{dot, norm2};
use crate::Scalar;

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `M = U diag(sigma) Vᵀ`.
///
/// `sigma` is sorted in decreasing order and has length `min(rows, cols)`.
/// Columns of `u` belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub sigma: Vec<T>,
    pub v: Matrix<T>,
}

pub fn svd<T: Scalar>(m: &Matrix<T>) -> Svd<T> {
    if m.rows() >= m.cols() {
        svd_tall(m)
    } else {
        let t = svd_tall(&m.transpose());
        Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    }
}

fn svd_tall<T: Scalar>(m: &Matrix<T>) -> Svd<T> {
    let (r, c) = (m.rows(), m.cols());
    let mut cols: Vec<Vec<T>> = (0..c).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..c)
        .map(|j| {
            let mut e = vec![T::zero(); c];
            e[j] = T::one();
            e
        })
        .collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in (p + 1)..c {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                rotate_pair(&mut cols, p, q, cs, sn);
                rotate_pair(&mut v, p, q, cs, sn);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..c).collect();
    let norms: Vec<T> = cols.iter().map(|col| norm2(col)).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap_or(std::cmp::Ordering::Equal));

    let mut u = Matrix::zeros(r, c);
    let mut vm = Matrix::zeros(c, c);
    let mut sigma = Vec::with_capacity(c);
    for (jj, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > T::zero() {
            for i in 0..r {
                u[(i, jj)] = cols[j][i] / s;
            }
        }
        for i in 0..c {
            vm[(i, jj)] = v[j][i];
        }
    }
    Svd { u, sigma, v: vm }
}

fn rotate_pair<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, cs: T, sn: T) {
    let (lo, hi) = cols.split_at_mut(q);
    let (a, b) = (&mut lo[p], &mut hi[0]);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = cs * xp - sn * yq;
        *y = sn * xp + cs * yq;
    }
}

/// Full eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `j` is the unit eigenvector for `values[j]`, sign-normalized so
    /// that its largest-magnitude entry is positive.
    pub vectors: Matrix<T>,
}

/// Cyclic Jacobi eigenvalue iteration. The input is symmetrized first.
pub fn symmetric_eigen<T: Scalar>(s: &Matrix<T>) -> SymmetricEigen<T> {
    let n = s.rows();
    let mut a = s.symmetrized();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    let scale = a.norm_frobenius();

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= eps * scale * T::lit(1e-3) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = cs * akp - sn * akq;
                    a[(k, q)] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = cs * apk - sn * aqk;
                    a[(q, k)] = sn * apk + cs * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = cs * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + cs * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = v.select_columns(&order);
    for j in 0..n {
        let mut big = 0;
        for i in 1..n {
            if vectors[(i, j)].abs() > vectors[(big, j)].abs() {
                big = i;
            }
        }
        if n > 0 && vectors[(big, j)] < T::zero() {
            for i in 0..n {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
    SymmetricEigen { values, vectors }
}

/// Given `b` (n x r) with orthonormal columns, returns an n x (n - r) matrix
/// whose columns are an orthonormal basis of the orthogonal complement of
/// `range(b)`.
pub fn orthogonal_complement<T: Scalar>(b: &Matrix<T>) -> Matrix<T> {
    let (n, r) = (b.rows(), b.cols());
    let mut a = b.clone();
    let mut q = Matrix::<T>::identity(n);
    let two = T::lit(2.0);
    for j in 0..r.min(n) {
        let x: Vec<T> = (j..n).map(|i| a[(i, j)]).collect();
        let alpha = norm2(&x);
        if alpha == T::zero() {
            continue;
        }
        let mut v = x.clone();
        let sign = if x[0] >= T::zero() { T::one() } else { -T::one() };
        v[0] += sign * alpha;
        let vtv = dot(&v, &v);
        if vtv == T::zero() {
            continue;
        }
        // A <- H A on rows j..n
        for col in j..r {
            let mut s = T::zero();
            for (k, &vk) in v.iter().enumerate() {
                s += vk * a[(j + k, col)];
            }
            let f = two * s / vtv;
            for (k, &vk) in v.iter().enumerate() {
                a[(j + k, col)] -= f * vk;
            }
        }
        // Q <- Q H on columns j..n
        for row in 0..n {
            let mut s = T::zero();
            for (k, &vk) in v.iter().enumerate() {
                s += q[(row, j + k)] * vk;
            }
            let f = two * s / vtv;
            for (k, &vk) in v.iter().enumerate() {
                q[(row, j + k)] -= f * vk;
            }
        }
    }
    let keep: Vec<usize> = (r.min(n)..n).collect();
    q.select_columns(&keep)
}

/// Lower Cholesky factor of a symmetric positive definite matrix, or `None`
/// when a non-positive pivot appears.
pub fn cholesky<T: Scalar>(s: &Matrix<T>) -> Option<Matrix<T>> {
    let n = s.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / d;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the lower factor.
pub fn cholesky_solve<T: Scalar>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut v = y[i];
        for k in 0..i {
            v -= l[(i, k)] * y[k];
        }
        y[i] = v / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut v = y[i];
        for k in (i + 1)..n {
            v -= l[(k, i)] * y[k];
        }
        y[i] = v / l[(i, i)];
    }
    y
}
