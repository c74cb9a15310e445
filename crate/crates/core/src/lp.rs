//! Dense two-phase tableau simplex for small standard-form linear programs
//!
//! ```text
//! minimize cᵀz  subject to  E z = f,  z ≥ 0
//! ```
//!
//! Bland's rule is used throughout, so the method cannot cycle. Only used at
//! desk scale (phase-I search and coordinate bounds of the feasible polytope).

use crate::numerics::Matrix;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { z: Vec<T>, value: T },
    Infeasible { residual: T },
    Unbounded,
}

struct Tableau<T> {
    // rows x (cols + 1); last column is the right-hand side
    t: Matrix<T>,
    basis: Vec<usize>,
    tol: T,
}

impl<T: Scalar> Tableau<T> {
    fn width(&self) -> usize {
        self.t.cols() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.t.cols();
        let p = self.t[(row, col)];
        for j in 0..w {
            self.t[(row, j)] /= p;
        }
        for i in 0..self.t.rows() {
            if i == row {
                continue;
            }
            let f = self.t[(i, col)];
            if f == T::zero() {
                continue;
            }
            for j in 0..w {
                let v = self.t[(row, j)];
                self.t[(i, j)] -= f * v;
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations for cost `c` restricted to columns `allowed`.
    /// Returns `false` on unboundedness.
    fn optimize(&mut self, c: &[T], allowed: &[bool]) -> bool {
        let rhs = self.width();
        loop {
            // reduced costs r_j = c_j - c_Bᵀ B⁻¹ a_j
            let mut entering = None;
            for j in 0..rhs {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut r = c[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    r -= c[b] * self.t[(i, j)];
                }
                if r < -self.tol {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.t.rows() {
                let a = self.t[(i, col)];
                if a > self.tol {
                    let ratio = self.t[(i, rhs)] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - self.tol
                                || ((ratio - br).abs() <= self.tol && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return false,
                Some((row, _)) => self.pivot(row, col),
            }
        }
    }
}

/// Solves `min cᵀz s.t. E z = f, z ≥ 0`.
pub fn solve_standard_form<T: Scalar>(c: &[T], e: &Matrix<T>, f: &[T]) -> LpOutcome<T> {
    let (m, n) = (e.rows(), e.cols());
    assert_eq!(c.len(), n);
    assert_eq!(f.len(), m);
    let scale = T::one().max(e.norm_max()).max(crate::numerics::vector::norm_inf(f));
    let tol = T::tol(1e-11, 64.0) * scale;

    // phase 1 tableau with artificials n..n+m
    let mut t = Matrix::zeros(m, n + m + 1);
    for i in 0..m {
        let sign = if f[i] < T::zero() { -T::one() } else { T::one() };
        for j in 0..n {
            t[(i, j)] = sign * e[(i, j)];
        }
        t[(i, n + i)] = T::one();
        t[(i, n + m)] = sign * f[i];
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        tol,
    };
    let mut c1 = vec![T::zero(); n + m];
    for v in c1.iter_mut().skip(n) {
        *v = T::one();
    }
    let all = vec![true; n + m];
    tab.optimize(&c1, &all);
    let residual: T = (0..m).filter(|&i| tab.basis[i] >= n).map(|i| tab.t[(i, n + m)]).sum();
    if residual > tol * T::lit(10.0) {
        return LpOutcome::Infeasible { residual };
    }

    // drive remaining artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < tab.t.rows() {
        if tab.basis[i] >= n {
            let col = (0..n).find(|&j| tab.t[(i, j)].abs() > tol);
            match col {
                Some(j) => tab.pivot(i, j),
                None => {
                    let keep: Vec<usize> = (0..tab.t.rows()).filter(|&r| r != i).collect();
                    let rows: Vec<Vec<T>> = keep.iter().map(|&r| tab.t.row(r).to_vec()).collect();
                    let w = tab.t.cols();
                    tab.t = Matrix::from_rows(&rows, w).unwrap_or_else(|_| Matrix::zeros(0, w));
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut c2 = c.to_vec();
    c2.extend(std::iter::repeat(T::zero()).take(m));
    let mut allowed = vec![true; n + m];
    for a in allowed.iter_mut().skip(n) {
        *a = false;
    }
    if !tab.optimize(&c2, &allowed) {
        return LpOutcome::Unbounded;
    }
    let rhs = tab.width();
    let mut z = vec![T::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            z[b] = tab.t[(i, rhs)].max(T::zero());
        }
    }
    let value = z.iter().zip(c).map(|(&a, &b)| a * b).sum();
    LpOutcome::Optimal { z, value }
}
