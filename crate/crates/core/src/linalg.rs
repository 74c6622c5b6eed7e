//! Thin wrappers around the LAPACK-backed dense routines plus a few small
//! numerical utilities (norms, spectra matching) used across the crate.

use crate::{C64, CMat, CVec, Error, Result};
use ndarray::prelude::*;
use ndarray_linalg::{Determinant, Eig, Inverse, Solve, SVD};

/// Eigenvalues and right eigenvectors (columns) of a general complex matrix.
pub fn eig(m: &CMat) -> Result<(CVec, CMat)> {
    let (vals, vecs) = m.eig()?;
    Ok((vals, vecs))
}

/// Eigenvalues together with right and left eigenvectors.
///
/// Left eigenvectors are returned as columns `w` satisfying `w† M = λ w†`;
/// they are obtained as right eigenvectors of `M†` matched to the right
/// spectrum by conjugate eigenvalue proximity.
pub fn eig_full(m: &CMat) -> Result<(CVec, CMat, CMat)> {
    let (vals, right) = m.eig()?;
    let mh = conj_transpose(m);
    let (vals_h, left_raw) = mh.eig()?;
    // Right eigenvalue λ corresponds to an M† eigenvalue conj(λ).
    let mut used = vec![false; vals_h.len()];
    let mut left = CMat::zeros(left_raw.raw_dim());
    for (j, lam) in vals.iter().enumerate() {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (k, mu) in vals_h.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = (mu - lam.conj()).norm();
            if d < best_d {
                best_d = d;
                best = Some(k);
            }
        }
        let k = best.ok_or_else(|| Error::Inconsistent("left/right spectra cannot be matched".into()))?;
        used[k] = true;
        left.column_mut(j).assign(&left_raw.column(k));
    }
    Ok((vals, right, left))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Result<Array1<f64>> {
    let (_, s, _) = m.svd(false, false)?;
    Ok(s)
}

/// Full SVD `(u, s, v†)`.
pub fn svd_full(m: &CMat) -> Result<(CMat, Array1<f64>, CMat)> {
    let (u, s, vt) = m.svd(true, true)?;
    Ok((
        u.ok_or_else(|| Error::Inconsistent("SVD did not return U".into()))?,
        s,
        vt.ok_or_else(|| Error::Inconsistent("SVD did not return V†".into()))?,
    ))
}

/// Minimum-norm least-squares solve via the SVD pseudo-inverse.
///
/// Also returns σ_min/σ_max of the matrix so callers can flag ill-conditioned
/// systems.
pub fn svd_solve(m: &CMat, rhs: &CVec) -> Result<(CVec, f64)> {
    let (u, s, vt) = svd_full(m)?;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let cutoff = smax * 1e-14;
    let uh_b = conj_transpose(&u).dot(rhs);
    let mut y = CVec::zeros(s.len());
    for i in 0..s.len() {
        if s[i] > cutoff {
            y[i] = uh_b[i] / C64::new(s[i], 0.0);
        }
    }
    let x = conj_transpose(&vt).dot(&y);
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    Ok((x, ratio))
}

/// Exact linear solve (LU); errors on singular systems.
pub fn solve(m: &CMat, rhs: &CVec) -> Result<CVec> {
    Ok(m.solve(rhs)?)
}

/// Determinant of a square complex matrix.
pub fn inv(m: &CMat) -> Result<CMat> {
    Ok(m.inv()?)
}

/// n-fold Kronecker power with the first factor least significant.
pub fn kron_power(a: &CMat, n: usize) -> CMat {
    assert!(n >= 1);
    let mut acc = a.clone();
    for _ in 1..n {
        acc = ndarray::linalg::kron(a, &acc);
    }
    acc
}

pub fn det(m: &CMat) -> Result<C64> {
    Ok(m.det()?)
}

/// Conjugate transpose.
pub fn conj_transpose(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

/// Largest absolute entry; the residual norm used throughout the crate.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest absolute entry of a vector.
pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMat) -> Result<f64> {
    Ok(singular_values(m)?.iter().cloned().fold(0.0, f64::max))
}

/// Relative residual ‖a − b‖ / max(1, ‖a‖, ‖b‖) in the max-abs norm.
pub fn rel_residual(a: &CMat, b: &CMat) -> f64 {
    let diff = max_abs(&(a - b));
    diff / 1f64.max(max_abs(a)).max(max_abs(b))
}

/// Greedy matching distance between two complex multisets.
///
/// Pairs each element of `a` with the closest unused element of `b` (largest
/// magnitudes first) and returns the maximum pair distance. `a` and `b` must
/// have equal length.
pub fn multiset_match_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have equal size");
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| b_mag(a[j]).partial_cmp(&b_mag(a[i])).unwrap());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &i in &order {
        let mut best = f64::INFINITY;
        let mut best_k = None;
        for (k, &bv) in b.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = (a[i] - bv).norm();
            if d < best {
                best = d;
                best_k = Some(k);
            }
        }
        if let Some(k) = best_k {
            used[k] = true;
            worst = worst.max(best);
        }
    }
    worst
}

fn b_mag(z: C64) -> f64 {
    z.norm()
}

/// Identity matrix of the given dimension.
pub fn identity(dim: usize) -> CMat {
    CMat::eye(dim)
}
