//! Z₂-graded tensor calculus on (C^{m|n})^{⊗s}.
//!
//! Conventions, fixed once and used everywhere:
//!
//! * Local basis indices are 0-based in code. Index `i` is even (parity 0)
//!   for `i < m` and odd (parity 1) for `i ≥ m`.
//! * The product basis vector v_{k₁} ⊗ … ⊗ v_{k_s} sits at linear index
//!   Σ_a k_a·d^(a−1): site 1 is the least significant digit.
//! * Operators are plain matrices acting on columns. Every Koszul sign
//!   required by the graded interchange rule
//!   (A ⊗ B)(v ⊗ w) = (−1)^{p(B)·p(v)} (A v) ⊗ (B w)
//!   is baked into the matrix when an operator is *embedded* into the chain.
//!   Products, traces and covector pairings downstream are then sign-free
//!   ordinary linear algebra. (An equivalent formulation keeps operators as
//!   abstract coordinate tensors and pushes the signs into the action on
//!   basis vectors; we do not implement that convention.)
//!
//! This module is the only place grading signs are written down.

use crate::{C64, CMat, CVec, Error, Result};

/// Grading signature (m|n): the local space C^{m|n} with `m` even (bosonic)
/// and `n` odd (fermionic) basis directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub m: usize,
    pub n: usize,
}

impl Signature {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m + n == 0 {
            return Err(Error::Argument("signature (0|0) has no local space".into()));
        }
        Ok(Signature { m, n })
    }

    /// Local dimension d = m + n.
    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    /// Parity of the 0-based local index.
    pub fn parity(&self, i: usize) -> u8 {
        debug_assert!(i < self.dim());
        u8::from(i >= self.m)
    }

    /// Parity of a multi-site digit string (sum of digit parities mod 2).
    pub fn multi_parity(&self, digits: &[usize]) -> u8 {
        digits.iter().map(|&k| self.parity(k)).fold(0, |a, b| a ^ b)
    }
}

/// Linear index of a digit string (site 1 least significant).
pub fn linear_index(d: usize, digits: &[usize]) -> usize {
    let mut idx = 0;
    let mut stride = 1;
    for &k in digits {
        debug_assert!(k < d);
        idx += k * stride;
        stride *= d;
    }
    idx
}

/// Digit string of a linear index (site 1 least significant).
pub fn digits_of(d: usize, sites: usize, mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; sites];
    for slot in out.iter_mut() {
        *slot = idx % d;
        idx /= d;
    }
    out
}

/// Identity operator on `sites` copies of the d-dimensional local space.
pub fn identity(d: usize, sites: usize) -> CMat {
    CMat::eye(d.pow(sites as u32))
}

/// Elementary operator e^j_i (maps v_j ↦ v_i) embedded at `site` (0-based).
///
/// Acting on v_{k₁} ⊗ … ⊗ v_{k_s} the embedded operator picks up the
/// crossing sign (−1)^{(p(i)+p(j))·(p(k₁)+…+p(k_{site}))} from moving an
/// operator of parity p(i)+p(j) past the factors in front of `site`.
pub fn embed_elementary(sig: Signature, sites: usize, site: usize, i: usize, j: usize) -> CMat {
    let d = sig.dim();
    let dim = d.pow(sites as u32);
    let p_op = sig.parity(i) ^ sig.parity(j);
    let mut out = CMat::zeros((dim, dim));
    for col in 0..dim {
        let mut digits = digits_of(d, sites, col);
        if digits[site] != j {
            continue;
        }
        let prefix: u8 = digits[..site]
            .iter()
            .map(|&k| sig.parity(k))
            .fold(0, |a, b| a ^ b);
        let sign = if p_op & prefix == 1 { -1.0 } else { 1.0 };
        digits[site] = i;
        out[[linear_index(d, &digits), col]] = C64::new(sign, 0.0);
    }
    out
}

/// Arbitrary one-site operator embedded at `site`, crossing signs included.
///
/// The operator need not be parity-homogeneous: each matrix element
/// `op[i, j]` carries its own parity p(i)+p(j).
pub fn embed_one_site(sig: Signature, sites: usize, site: usize, op: &CMat) -> Result<CMat> {
    let d = sig.dim();
    check_shape(op, d, "one-site operator")?;
    if site >= sites {
        return Err(Error::Argument(format!("site {site} out of range for {sites} sites")));
    }
    let dim = d.pow(sites as u32);
    let mut out = CMat::zeros((dim, dim));
    for col in 0..dim {
        let digits = digits_of(d, sites, col);
        let j = digits[site];
        let prefix: u8 = digits[..site]
            .iter()
            .map(|&k| sig.parity(k))
            .fold(0, |a, b| a ^ b);
        for i in 0..d {
            let v = op[[i, j]];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let p_op = sig.parity(i) ^ sig.parity(j);
            let sign = if p_op & prefix == 1 { -1.0 } else { 1.0 };
            let mut row_digits = digits.clone();
            row_digits[site] = i;
            out[[linear_index(d, &row_digits), col]] += v * sign;
        }
    }
    Ok(out)
}

/// Two-site operator embedded at sites `a < b`, crossing signs included.
///
/// `op` is a d²×d² matrix on V_a ⊗ V_b with the *first listed* site least
/// significant: pair index = x_a + d·x_b. Writing the element decomposition
/// op = Σ c·(e^{k_a}_{i_a} ⊗ e^{k_b}_{i_b}), each term acquires
/// (−1)^{(p(i_a)+p(k_a))·Σ_{c<a} p(k_c) + (p(i_b)+p(k_b))·Σ_{c<b, c≠a} p(k_c)}
/// on a column with digits k (derivable from the interchange rule; the sites
/// strictly between a and b contribute because an odd factor at b must cross
/// them).
pub fn embed_two_site(sig: Signature, sites: usize, a: usize, b: usize, op: &CMat) -> Result<CMat> {
    let d = sig.dim();
    check_shape(op, d * d, "two-site operator")?;
    if a >= b || b >= sites {
        return Err(Error::Argument(format!(
            "embed_two_site requires a < b < sites, got a={a}, b={b}, sites={sites}"
        )));
    }
    let dim = d.pow(sites as u32);
    let mut out = CMat::zeros((dim, dim));
    for col in 0..dim {
        let digits = digits_of(d, sites, col);
        let (ka, kb) = (digits[a], digits[b]);
        let pre_a: u8 = digits[..a].iter().map(|&k| sig.parity(k)).fold(0, |x, y| x ^ y);
        let mid: u8 = digits[a + 1..b].iter().map(|&k| sig.parity(k)).fold(0, |x, y| x ^ y);
        let pre_b_except_a = pre_a ^ mid;
        for ia in 0..d {
            for ib in 0..d {
                let v = op[[ia + d * ib, ka + d * kb]];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                let pa = sig.parity(ia) ^ sig.parity(ka);
                let pb = sig.parity(ib) ^ sig.parity(kb);
                let exponent = (pa & pre_a) ^ (pb & pre_b_except_a);
                let sign = if exponent == 1 { -1.0 } else { 1.0 };
                let mut row_digits = digits.clone();
                row_digits[a] = ia;
                row_digits[b] = ib;
                out[[linear_index(d, &row_digits), col]] += v * sign;
            }
        }
    }
    Ok(out)
}

/// Even operator on a contiguous block of sites, embedded by plain Kronecker
/// padding (no crossing signs arise for a globally even contiguous block).
pub fn embed_contiguous_even(
    sig: Signature,
    op: &CMat,
    sites_before: usize,
    sites_after: usize,
) -> CMat {
    let d = sig.dim();
    let before = d.pow(sites_before as u32);
    let after = d.pow(sites_after as u32);
    let mid = op.nrows();
    let dim = before * mid * after;
    let mut out = CMat::zeros((dim, dim));
    for r_mid in 0..mid {
        for c_mid in 0..mid {
            let v = op[[r_mid, c_mid]];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for r_out in 0..after {
                for pre in 0..before {
                    let row = pre + before * (r_mid + mid * r_out);
                    let col = pre + before * (c_mid + mid * r_out);
                    out[[row, col]] = v;
                }
            }
        }
    }
    out
}

/// Graded permutation on two local factors: P(v_i ⊗ v_j) = (−1)^{p(i)p(j)} v_j ⊗ v_i,
/// as a d²×d² matrix (first factor least significant).
pub fn permutation_two_site(sig: Signature) -> CMat {
    let d = sig.dim();
    let mut p = CMat::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            let sign = if sig.parity(i) & sig.parity(j) == 1 { -1.0 } else { 1.0 };
            p[[j + d * i, i + d * j]] = C64::new(sign, 0.0);
        }
    }
    p
}

/// Graded permutation P_{ab} embedded into an s-site chain (a < b).
pub fn permutation(sig: Signature, sites: usize, a: usize, b: usize) -> Result<CMat> {
    embed_two_site(sig, sites, a, b, &permutation_two_site(sig))
}

/// Rational graded R-matrix on two sites: R(u) = u·Id + η·P, d²×d².
pub fn r_two_site(sig: Signature, eta: C64, u: C64) -> CMat {
    let d = sig.dim();
    let mut r = permutation_two_site(sig) * eta;
    for k in 0..d * d {
        r[[k, k]] += u;
    }
    r
}

/// R_{ab}(u) embedded into an s-site chain (a < b).
pub fn r_embedded(sig: Signature, sites: usize, a: usize, b: usize, eta: C64, u: C64) -> Result<CMat> {
    let mut r = permutation(sig, sites, a, b)? * eta;
    let dim = sig.dim().pow(sites as u32);
    for k in 0..dim {
        r[[k, k]] += u;
    }
    Ok(r)
}

/// Supertrace of a one-site operator: str A = Σ_i (−1)^{p(i)} A_{ii}.
pub fn supertrace(sig: Signature, op: &CMat) -> Result<C64> {
    check_shape(op, sig.dim(), "supertrace operand")?;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..sig.dim() {
        let w = if sig.parity(i) == 1 { -1.0 } else { 1.0 };
        acc += op[[i, i]] * w;
    }
    Ok(acc)
}

/// Full supertrace of a multi-site operator (graded weight per digit).
pub fn supertrace_multi(sig: Signature, sites: usize, op: &CMat) -> Result<C64> {
    let d = sig.dim();
    let dim = d.pow(sites as u32);
    check_shape(op, dim, "supertrace operand")?;
    let mut acc = C64::new(0.0, 0.0);
    for x in 0..dim {
        let digits = digits_of(d, sites, x);
        let w = if sig.multi_parity(&digits) == 1 { -1.0 } else { 1.0 };
        acc += op[[x, x]] * w;
    }
    Ok(acc)
}

/// Partial supertrace over the first `front` sites (the least significant
/// digits) of an operator on `front + rest` sites.
///
/// For an even operator M = Σ e^β_α ⊗ X^α_β this returns Σ_α (−1)^{p(α)} X^α_α,
/// realised entrywise as T[x,y] = Σ_α w(α)·M[(α,x),(α,y)].
pub fn partial_supertrace_front(sig: Signature, front: usize, rest: usize, op: &CMat) -> Result<CMat> {
    let d = sig.dim();
    let df = d.pow(front as u32);
    let dr = d.pow(rest as u32);
    check_shape(op, df * dr, "partial supertrace operand")?;
    let mut out = CMat::zeros((dr, dr));
    for alpha in 0..df {
        let w = if sig.multi_parity(&digits_of(d, front, alpha)) == 1 { -1.0 } else { 1.0 };
        for x in 0..dr {
            let row = alpha + df * x;
            for y in 0..dr {
                out[[x, y]] += op[[row, alpha + df * y]] * w;
            }
        }
    }
    Ok(out)
}

/// Dual covector ⟨S| of the product state |S,1⟩ ⊗ … ⊗ |S,s⟩, as a row vector.
///
/// The dagger of a product basis vector is defined so that the pairing with
/// any product basis vector is the plain Kronecker delta; consequently the
/// row-vector representation carries the conjugated coefficients and no
/// residual signs, and ⟨S| M |v⟩ is the ordinary row·matrix·column product.
pub fn dual_covector(sig: Signature, states: &[CVec]) -> Result<CVec> {
    let d = sig.dim();
    let sites = states.len();
    if sites == 0 {
        return Err(Error::Argument("dual covector of zero sites".into()));
    }
    for (a, s) in states.iter().enumerate() {
        if s.len() != d {
            return Err(Error::Structure(format!(
                "one-site state {a} has length {}, expected {d}",
                s.len()
            )));
        }
    }
    let dim = d.pow(sites as u32);
    let mut row = CVec::zeros(dim);
    for idx in 0..dim {
        let digits = digits_of(d, sites, idx);
        let mut v = C64::new(1.0, 0.0);
        for (a, &k) in digits.iter().enumerate() {
            v *= states[a][k].conj();
        }
        row[idx] = v;
    }
    Ok(row)
}

fn check_shape(op: &CMat, dim: usize, what: &str) -> Result<()> {
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::Structure(format!(
            "{what} must be {dim}×{dim}, got {}×{}",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    const ONE: C64 = C64::new(1.0, 0.0);

    #[test]
    fn multi_index_round_trip() {
        for d in 2usize..=4 {
            for sites in 1..=3 {
                let dim = d.pow(sites as u32);
                for idx in 0..dim {
                    let digits = digits_of(d, sites, idx);
                    assert_eq!(linear_index(d, &digits), idx);
                }
            }
        }
        // site 1 is least significant: digits (k1,k2) = (1,0) of d=3 → index 1
        assert_eq!(linear_index(3, &[1, 0]), 1);
        assert_eq!(linear_index(3, &[0, 1]), 3);
    }

    /// Hand case: (1|1), two sites, e^2_1 at site 2 applied to v₂ ⊗ v₂ gives
    /// −(v₂ ⊗ v₁): the operator is odd and crosses the odd v₂ at site 1.
    #[test]
    fn elementary_embedding_crossing_sign_hand_case() {
        let sig = Signature::new(1, 1).unwrap();
        // e^{j=2}_{i=1}: 0-based i=0, j=1
        let op = embed_elementary(sig, 2, 1, 0, 1);
        let col = linear_index(2, &[1, 1]); // v₂ ⊗ v₂
        let row = linear_index(2, &[1, 0]); // v₂ ⊗ v₁
        assert_eq!(op[[row, col]], c(-1.0, 0.0));
        // column sums: exactly one nonzero entry in that column
        let nnz = op.column(col).iter().filter(|z| **z != c(0.0, 0.0)).count();
        assert_eq!(nnz, 1);
        // same operator at site 1 crosses nothing
        let op1 = embed_elementary(sig, 2, 0, 0, 1);
        let col1 = linear_index(2, &[1, 1]);
        let row1 = linear_index(2, &[0, 1]);
        assert_eq!(op1[[row1, col1]], ONE);
    }

    /// Hand case on three sites of (1|1): e^2_1 at site 3 applied to
    /// v₂ ⊗ v₁ ⊗ v₂ crosses one odd factor → −(v₂ ⊗ v₁ ⊗ v₁).
    #[test]
    fn elementary_embedding_three_site_hand_case() {
        let sig = Signature::new(1, 1).unwrap();
        let op = embed_elementary(sig, 3, 2, 0, 1);
        let col = linear_index(2, &[1, 0, 1]);
        let row = linear_index(2, &[1, 0, 0]);
        assert_eq!(op[[row, col]], c(-1.0, 0.0));
    }

    /// Odd operators embedded at distinct sites anticommute; even ones commute.
    #[test]
    fn distinct_site_graded_commutation() {
        for (m, n) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
            let sig = Signature::new(m, n).unwrap();
            let d = sig.dim();
            for i1 in 0..d {
                for j1 in 0..d {
                    for i2 in 0..d {
                        for j2 in 0..d {
                            let a = embed_elementary(sig, 2, 0, i1, j1);
                            let b = embed_elementary(sig, 2, 1, i2, j2);
                            let pa = sig.parity(i1) ^ sig.parity(j1);
                            let pb = sig.parity(i2) ^ sig.parity(j2);
                            let sign = if pa & pb == 1 { -1.0 } else { 1.0 };
                            let lhs = a.dot(&b);
                            let rhs = b.dot(&a) * sign;
                            assert!(max_abs(&(&lhs - &rhs)) < 1e-15);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn permutation_action_and_involution() {
        for (m, n) in [(1usize, 1usize), (1, 2), (2, 2)] {
            let sig = Signature::new(m, n).unwrap();
            let d = sig.dim();
            let p = permutation_two_site(sig);
            // action: P(v_i ⊗ v_j) = (−1)^{p(i)p(j)} v_j ⊗ v_i
            for i in 0..d {
                for j in 0..d {
                    let col = i + d * j;
                    let row = j + d * i;
                    let expect = if sig.parity(i) & sig.parity(j) == 1 { -1.0 } else { 1.0 };
                    assert_eq!(p[[row, col]], c(expect, 0.0));
                }
            }
            let p2 = p.dot(&p);
            assert!(max_abs(&(&p2 - &CMat::eye(d * d))) < 1e-15);
        }
    }

    /// P conjugation swaps site contents for any one-site operator, with no
    /// leftover sign: P_{ab} (X at a) P_{ab} = (X at b). Exercises the
    /// mid-chain crossing signs when a and b are not adjacent.
    #[test]
    fn permutation_conjugation_moves_operators() {
        let sig = Signature::new(1, 2).unwrap();
        let d = sig.dim();
        let sites = 3;
        let p13 = permutation(sig, sites, 0, 2).unwrap();
        for i in 0..d {
            for j in 0..d {
                let x1 = embed_elementary(sig, sites, 0, i, j);
                let x3 = embed_elementary(sig, sites, 2, i, j);
                let moved = p13.dot(&x1).dot(&p13);
                assert!(max_abs(&(&moved - &x3)) < 1e-15, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn permutation_squares_to_identity_when_embedded() {
        let sig = Signature::new(1, 2).unwrap();
        let dim = sig.dim().pow(3);
        for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let p = permutation(sig, 3, a, b).unwrap();
            assert!(max_abs(&(&p.dot(&p) - &CMat::eye(dim))) < 1e-15);
        }
    }

    /// P (A ⊗ B) P = (−1)^{p(A)p(B)} (B ⊗ A) for homogeneous one-site A, B.
    #[test]
    fn permutation_intertwines_tensor_factors() {
        let sig = Signature::new(1, 1).unwrap();
        let p = permutation_two_site(sig);
        for (ia, ja) in [(0usize, 1usize), (1, 0), (0, 0), (1, 1)] {
            for (ib, jb) in [(0usize, 1usize), (1, 0), (0, 0), (1, 1)] {
                let a1 = embed_elementary(sig, 2, 0, ia, ja);
                let b2 = embed_elementary(sig, 2, 1, ib, jb);
                let ab = a1.dot(&b2); // A at site 1, B at site 2 (signs baked)
                let b1 = embed_elementary(sig, 2, 0, ib, jb);
                let a2 = embed_elementary(sig, 2, 1, ia, ja);
                let ba = b1.dot(&a2);
                let pa = sig.parity(ia) ^ sig.parity(ja);
                let pb = sig.parity(ib) ^ sig.parity(jb);
                let sign = if pa & pb == 1 { -1.0 } else { 1.0 };
                let lhs = p.dot(&ab).dot(&p);
                assert!(max_abs(&(&lhs - &(ba * sign))) < 1e-15);
            }
        }
    }

    #[test]
    fn supertrace_of_elementary_and_graded_commutator() {
        let sig = Signature::new(1, 2).unwrap();
        let d = sig.dim();
        // str e^j_i = (−1)^{p(j)} δ_ij
        for i in 0..d {
            for j in 0..d {
                let mut e = CMat::zeros((d, d));
                e[[i, j]] = ONE;
                let s = supertrace(sig, &e).unwrap();
                let expect = if i == j {
                    if sig.parity(j) == 1 { c(-1.0, 0.0) } else { ONE }
                } else {
                    c(0.0, 0.0)
                };
                assert_eq!(s, expect);
            }
        }
        // str [A, B} = 0 for homogeneous A, B
        for (ia, ja, ib, jb) in [(0usize, 2usize, 2usize, 0usize), (1, 2, 2, 1), (0, 1, 1, 2)] {
            let mut a = CMat::zeros((d, d));
            a[[ia, ja]] = c(0.3, -1.1);
            let mut b = CMat::zeros((d, d));
            b[[ib, jb]] = c(-0.4, 0.9);
            let pa = sig.parity(ia) ^ sig.parity(ja);
            let pb = sig.parity(ib) ^ sig.parity(jb);
            let sign = if pa & pb == 1 { -1.0 } else { 1.0 };
            let comm = a.dot(&b) - b.dot(&a) * sign;
            assert!(supertrace(sig, &comm).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn supertrace_of_identity_counts_graded_dimension() {
        let sig = Signature::new(1, 2).unwrap();
        let s = supertrace(sig, &CMat::eye(3)).unwrap();
        assert_eq!(s, c(-1.0, 0.0)); // 1 − 2
        let s2 = supertrace_multi(sig, 2, &CMat::eye(9)).unwrap();
        assert_eq!(s2, ONE); // (1 − 2)²
    }

    /// Partial supertrace of the graded permutation over either factor is the
    /// identity on the remaining factor.
    #[test]
    fn partial_supertrace_of_permutation_is_identity() {
        for (m, n) in [(1usize, 1usize), (1, 2), (2, 2)] {
            let sig = Signature::new(m, n).unwrap();
            let d = sig.dim();
            let p = permutation_two_site(sig);
            let t = partial_supertrace_front(sig, 1, 1, &p).unwrap();
            assert!(max_abs(&(&t - &CMat::eye(d))) < 1e-15);
        }
    }

    /// Partial supertrace respects operator products on the untraced factor
    /// and reproduces full supertrace multiplicativity str(A⊗B) = strA·strB.
    #[test]
    fn supertrace_multiplicativity() {
        let sig = Signature::new(1, 1).unwrap();
        let a = array![[c(0.2, 0.1), c(-0.7, 0.0)], [c(0.0, 1.3), c(0.5, -0.2)]];
        let b = array![[c(1.0, -0.4), c(0.3, 0.3)], [c(-0.2, 0.0), c(0.9, 0.8)]];
        // graded A⊗B on two sites = (A at 1)·(B at 2)
        let big = embed_one_site(sig, 2, 0, &a)
            .unwrap()
            .dot(&embed_one_site(sig, 2, 1, &b).unwrap());
        let lhs = supertrace_multi(sig, 2, &big).unwrap();
        let rhs = supertrace(sig, &a).unwrap() * supertrace(sig, &b).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn dual_covector_pairs_to_kronecker_delta() {
        let sig = Signature::new(1, 2).unwrap();
        let d = sig.dim();
        let sites = 2;
        // basis states as one-site coefficient vectors
        for i1 in 0..d {
            for i2 in 0..d {
                let mut s1 = CVec::zeros(d);
                s1[i1] = ONE;
                let mut s2 = CVec::zeros(d);
                s2[i2] = ONE;
                let row = dual_covector(sig, &[s1, s2]).unwrap();
                for j in 0..d * d {
                    let expect = if j == linear_index(d, &[i1, i2]) { ONE } else { c(0.0, 0.0) };
                    assert_eq!(row[j], expect);
                }
                let _ = sites;
            }
        }
    }

    /// ⟨S| K₁ … K_s |e_j⟩ factorises into Π_a ⟨S,a| K |e_{j_a}⟩ for an even K.
    #[test]
    fn even_operator_matrix_elements_factorise() {
        let sig = Signature::new(1, 1).unwrap();
        let d = sig.dim();
        let k = array![[c(1.3, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-0.8, 0.5)]];
        let s1 = array![c(0.7, 0.2), c(-0.3, 1.1)];
        let s2 = array![c(0.1, -0.9), c(2.0, 0.4)];
        let row = dual_covector(sig, &[s1.clone(), s2.clone()]).unwrap();
        let kk = embed_one_site(sig, 2, 0, &k)
            .unwrap()
            .dot(&embed_one_site(sig, 2, 1, &k).unwrap());
        let paired = row.dot(&kk);
        for j1 in 0..d {
            for j2 in 0..d {
                let lhs = paired[linear_index(d, &[j1, j2])];
                let f1: C64 = (0..d).map(|p| s1[p].conj() * k[[p, j1]]).sum();
                let f2: C64 = (0..d).map(|p| s2[p].conj() * k[[p, j2]]).sum();
                assert!((lhs - f1 * f2).norm() < 1e-14);
            }
        }
    }

    /// embed_two_site agrees with the product of one-site embeddings for
    /// pure tensor operators A ⊗ B, including non-adjacent placements.
    #[test]
    fn two_site_embedding_matches_one_site_products() {
        let sig = Signature::new(1, 2).unwrap();
        let sites = 3;
        for (a_site, b_site) in [(0usize, 1usize), (0, 2), (1, 2)] {
            for (ia, ja, ib, jb) in [
                (0usize, 2usize, 1usize, 0usize),
                (2, 2, 0, 1),
                (1, 0, 2, 1),
                (0, 0, 2, 2),
            ] {
                // graded tensor A⊗B as two-site matrix = (A at slot 1)(B at slot 2)
                let a1 = embed_elementary(sig, 2, 0, ia, ja);
                let b2 = embed_elementary(sig, 2, 1, ib, jb);
                let op2 = a1.dot(&b2);
                let lhs = embed_two_site(sig, sites, a_site, b_site, &op2).unwrap();
                let rhs = embed_elementary(sig, sites, a_site, ia, ja)
                    .dot(&embed_elementary(sig, sites, b_site, ib, jb));
                assert!(
                    max_abs(&(&lhs - &rhs)) < 1e-15,
                    "sites ({a_site},{b_site}) op ({ia},{ja},{ib},{jb})"
                );
            }
        }
    }

    #[test]
    fn contiguous_even_embedding_matches_two_site_embedding() {
        let sig = Signature::new(1, 1).unwrap();
        // an even two-site operator: the graded permutation
        let p = permutation_two_site(sig);
        let via_generic = embed_two_site(sig, 3, 1, 2, &p).unwrap();
        let via_block = embed_contiguous_even(sig, &p, 1, 0);
        assert!(max_abs(&(&via_generic - &via_block)) < 1e-15);
        let via_generic0 = embed_two_site(sig, 3, 0, 1, &p).unwrap();
        let via_block0 = embed_contiguous_even(sig, &p, 0, 1);
        assert!(max_abs(&(&via_generic0 - &via_block0)) < 1e-15);
    }
}
