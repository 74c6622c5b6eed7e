//! Small helpers for complex polynomials in one variable.
//!
//! A polynomial is a coefficient slice `c` with `c[k]` multiplying `λ^k`.

use crate::{C64, CMat, Result};
use crate::linalg;

/// Evaluate `Σ c[k] λ^k` by Horner's rule.
pub fn eval(c: &[C64], lambda: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        acc = acc * lambda + ck;
    }
    acc
}

/// Monic polynomial with the given roots.
pub fn from_roots(roots: &[C64]) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        // multiply by (λ - r)
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= r * ck;
        }
        c = next;
    }
    c
}

/// Strip trailing coefficients that are negligible relative to the largest one.
pub fn trim(c: &[C64], rel_tol: f64) -> Vec<C64> {
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return vec![C64::new(0.0, 0.0)];
    }
    let mut end = c.len();
    while end > 1 && c[end - 1].norm() <= rel_tol * scale {
        end -= 1;
    }
    c[..end].to_vec()
}

/// Roots of a polynomial via the companion-matrix eigenproblem.
///
/// The input must have a nonzero leading coefficient (use [`trim`] first).
pub fn roots(c: &[C64]) -> Result<Vec<C64>> {
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = c[deg];
    let mut comp = CMat::zeros((deg, deg));
    for k in 0..deg {
        comp[[k, deg - 1]] = -c[k] / lead;
        if k + 1 < deg {
            comp[[k + 1, k]] = C64::new(1.0, 0.0);
        }
    }
    let (vals, _) = linalg::eig(&comp)?;
    Ok(vals.to_vec())
}
