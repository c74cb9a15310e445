use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{symmetric_eigen, vector, Matrix};
use crate::Scalar;

pub const MAX_TRS_ORACLE_DIM: usize = 8;
pub const TRS_GRID_POINTS: usize = 1_000_000;

/// `gᵀu + ½ uᵀHu`.
pub fn trs_objective<T: Scalar>(g: &[T], h: &Matrix<T>, u: &[T]) -> T {
    let hu = h.matvec(u).expect("dimension checked");
    vector::dot(g, u) + T::lit(0.5) * vector::dot(u, &hu)
}

fn check<T: Scalar>(g: &[T], h: &Matrix<T>, beta: T) -> Result<()> {
    let n = g.len();
    if n == 0 || n > MAX_TRS_ORACLE_DIM {
        return Err(Error::Capability(format!(
            "trust-region oracle handles dimensions 1..={MAX_TRS_ORACLE_DIM}, got {n}"
        )));
    }
    if h.rows() != n || h.cols() != n {
        return Err(Error::DimensionMismatch("H does not match g".into()));
    }
    if !(beta > T::zero()) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    Ok(())
}

/// Global minimum of `gᵀu + ½uᵀHu` over `‖u‖ ≤ β` with the default scan size.
pub fn trs_oracle<T: Scalar>(g: &[T], h: &Matrix<T>, beta: T) -> Result<(T, Vec<T>)> {
    trs_oracle_with_grid(g, h, beta, TRS_GRID_POINTS)
}

/// Eigendecomposition of `H`, a log-spaced scan of the secular equation
/// `Σ (vᵢᵀg)²/(λᵢ + λ)² = β²` refined by bisection, plus the interior and
/// hard-case candidates. Returns the best candidate.
pub fn trs_oracle_with_grid<T: Scalar>(g: &[T], h: &Matrix<T>, beta: T, grid_points: usize) -> Result<(T, Vec<T>)> {
    check(g, h, beta)?;
    let n = g.len();
    let e = symmetric_eigen(&h.symmetrized());
    let lam = &e.values;
    let gt = e.vectors.tr_matvec(g)?;
    let from_coeffs = |c: &[T]| e.vectors.matvec(c).expect("square");
    let mut cands: Vec<Vec<T>> = vec![vec![T::zero(); n]];

    let lmin = lam[0];
    let hnorm = lam.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tiny = T::epsilon() * T::lit(64.0) * (T::one() + hnorm);

    // interior stationary point
    if lmin > tiny {
        let c: Vec<T> = gt.iter().zip(lam).map(|(&gi, &li)| -gi / li).collect();
        if vector::norm2(&c) <= beta {
            cands.push(from_coeffs(&c));
        }
    }

    // boundary: secular equation on λ > lo
    let lo = T::zero().max(-lmin);
    let gnorm = vector::norm2(&gt);
    let width = gnorm / beta + hnorm + T::one();
    let norm_at = |l: T| -> T {
        gt.iter()
            .zip(lam)
            .map(|(&gi, &li)| {
                let q = gi / (li + l);
                q * q
            })
            .sum::<T>()
            .sqrt()
    };
    let coeffs_at = |l: T| -> Vec<T> { gt.iter().zip(lam).map(|(&gi, &li)| -gi / (li + l)).collect() };
    let s_min = T::epsilon() * (T::one() + lo);
    let ratio = (width / s_min).ln();
    let steps = grid_points.max(2);
    let mut prev_s = s_min;
    let mut prev_above = norm_at(lo + s_min) > beta;
    for k in 1..steps {
        let s = s_min * (ratio * T::from_usize(k).unwrap() / T::from_usize(steps - 1).unwrap()).exp();
        let above = norm_at(lo + s) > beta;
        if prev_above && !above {
            let (mut a, mut b) = (prev_s, s);
            for _ in 0..200 {
                let mid = a + (b - a) * T::lit(0.5);
                if mid <= a || mid >= b {
                    break;
                }
                if norm_at(lo + mid) > beta {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let c = coeffs_at(lo + b);
            let nc = vector::norm2(&c);
            let c = if nc > beta { vector::scale(&c, beta / nc) } else { c };
            cands.push(from_coeffs(&c));
        }
        prev_above = above;
        prev_s = s;
    }

    // hard case at λ = lo
    if lmin <= tiny {
        let mut c: Vec<T> = gt
            .iter()
            .zip(lam)
            .map(|(&gi, &li)| if li + lo > tiny { -gi / (li + lo) } else { T::zero() })
            .collect();
        let nc = vector::norm2(&c);
        if nc <= beta {
            let tau = (beta * beta - nc * nc).max(T::zero()).sqrt();
            for sign in [T::one(), -T::one()] {
                let mut c2 = c.clone();
                c2[0] += sign * tau;
                cands.push(from_coeffs(&c2));
            }
        } else {
            c = vector::scale(&c, beta / nc);
            cands.push(from_coeffs(&c));
        }
    }

    let mut best: Option<(T, Vec<T>)> = None;
    for u in cands {
        let v = trs_objective(g, h, &u);
        if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
            best = Some((v, u));
        }
    }
    Ok(best.expect("zero candidate always present"))
}

fn project_ball<T: Scalar>(u: &mut [T], beta: T) {
    let nu = vector::norm2(u);
    if nu > beta {
        for v in u.iter_mut() {
            *v *= beta / nu;
        }
    }
}

/// Cross-check: `samples` uniform points in the ball, the best 20 polished by
/// projected gradient descent.
pub fn trs_multistart<T: Scalar>(
    g: &[T],
    h: &Matrix<T>,
    beta: T,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<(T, Vec<T>)> {
    check(g, h, beta)?;
    let n = g.len();
    let keep = 20usize;
    let mut pool: Vec<(T, Vec<T>)> = Vec::with_capacity(keep + 1);
    for _ in 0..samples.max(1) {
        let mut u: Vec<T> = (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
        let nu = vector::norm2(&u).max(T::min_positive_value());
        let r = beta * T::lit(rng.gen::<f64>().powf(1.0 / n as f64));
        for v in &mut u {
            *v *= r / nu;
        }
        let val = trs_objective(g, h, &u);
        if pool.len() < keep || val < pool[pool.len() - 1].0 {
            let pos = pool.partition_point(|(pv, _)| *pv <= val);
            pool.insert(pos, (val, u));
            pool.truncate(keep);
        }
    }
    let step = T::one() / (h.norm_frobenius() + T::lit(1e-12));
    let mut best: Option<(T, Vec<T>)> = None;
    for (_, mut u) in pool {
        for _ in 0..20_000 {
            let grad = vector::add(g, &h.matvec(&u)?);
            let mut next = u.clone();
            vector::axpy(-step, &grad, &mut next);
            project_ball(&mut next, beta);
            let moved = vector::norm_inf(&vector::sub(&next, &u));
            u = next;
            if moved <= T::epsilon() * beta {
                break;
            }
        }
        let v = trs_objective(g, h, &u);
        if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
            best = Some((v, u));
        }
    }
    Ok(best.expect("nonempty pool"))
}
