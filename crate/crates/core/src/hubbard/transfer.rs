//! Hubbard monodromy and transfer matrices: the commuting family, the
//! node-point product identity and the η = 0 large-λ asymptotics of the
//! transfer matrix.

use super::rmatrix::{embed_pair_sym, embed_site_op, shastry_r_embedded, xx_asymptotic_diag};
use super::{qubit_sig, HubbardParams};
use crate::graded::partial_supertrace_front;
use crate::linalg::{identity, rel_residual};
use crate::{C64, CMat, Error, Result};

/// Monodromy M_A(λ) = K_A R_{A,N}(λ|ξ_N)⋯R_{A,1}(λ|ξ_1) on the
/// (N+1)-slot space, auxiliary 4-dim slot least significant.
pub fn monodromy(params: &HubbardParams, lambda: C64) -> Result<CMat> {
    let n = params.n_sites();
    let slots = n + 1;
    let mut acc = embed_site_op(slots, 0, &params.twist.k)?;
    for a in (1..=n).rev() {
        let r = shastry_r_embedded(slots, 0, a, lambda, params.xi[a - 1], params.eta, params.branch)?;
        acc = acc.dot(&r);
    }
    Ok(acc)
}

/// Transfer matrix T(λ) = tr_A M_A(λ): an ordinary trace over the auxiliary
/// slot (two qubits; the local space carries no grading).
pub fn transfer(params: &HubbardParams, lambda: C64) -> Result<CMat> {
    let m = monodromy(params, lambda)?;
    partial_supertrace_front(qubit_sig(), 2, 2 * params.n_sites(), &m)
}

/// Transfer matrix at the node ξ_n (0-based n) through the point formula
/// T(ξ_n) = R_{n,n−1}(ξ_n|ξ_{n−1})⋯R_{n,1}(ξ_n|ξ_1)·K_n·R_{n,N}(ξ_n|ξ_N)⋯R_{n,n+1}(ξ_n|ξ_{n+1}),
/// every factor acting on the chain alone. At the node the auxiliary
/// R-matrix degenerates to the double permutation, which swaps the auxiliary
/// slot into site n; no scalar weight is left behind.
pub fn transfer_at_node(params: &HubbardParams, n: usize) -> Result<CMat> {
    let sites = params.n_sites();
    if n >= sites {
        return Err(Error::Argument(format!("node index {n} out of range")));
    }
    let mut acc = identity(params.dim());
    for a in (0..n).rev() {
        acc = acc.dot(&shastry_r_embedded(
            sites,
            n,
            a,
            params.xi[n],
            params.xi[a],
            params.eta,
            params.branch,
        )?);
    }
    acc = acc.dot(&embed_site_op(sites, n, &params.twist.k)?);
    for a in ((n + 1)..sites).rev() {
        acc = acc.dot(&shastry_r_embedded(
            sites,
            n,
            a,
            params.xi[n],
            params.xi[a],
            params.eta,
            params.branch,
        )?);
    }
    Ok(acc)
}

/// ‖T(ξ_n) via the traced monodromy − the product formula‖ (relative).
pub fn node_identity_residual(params: &HubbardParams, n: usize) -> Result<f64> {
    let traced = transfer(params, params.xi[n])?;
    let product = transfer_at_node(params, n)?;
    Ok(rel_residual(&traced, &product))
}

/// ‖[T(λ), T(μ)]‖ / ‖T(λ)T(μ)‖.
pub fn commutation_residual(params: &HubbardParams, lambda: C64, mu: C64) -> Result<f64> {
    let tl = transfer(params, lambda)?;
    let tm = transfer(params, mu)?;
    let ab = tl.dot(&tm);
    let ba = tm.dot(&tl);
    Ok(rel_residual(&ab, &ba))
}

/// Exact λ → −i∞ limit of e^{−2iλN}·T(λ) at η = 0: every R-factor collapses
/// to (e^{−2iξ_n}/4)·D_{A1,n1}D_{A2,n2} with D = diag(1, −i, −i, 1), so the
/// traced product is the diagonal chain operator
///   Π_n (e^{−2iξ_n}/4) · tr_A [ K_A Π_n D_{A1,n1}D_{A2,n2} ].
/// Only the diagonal entries of K survive the trace; the result is diagonal
/// but, for a generic twist, not a multiple of the identity.
pub fn transfer_asymptotic_limit(params: &HubbardParams) -> Result<CMat> {
    if params.eta.norm() > 1e-14 {
        return Err(Error::Argument(
            "the factorized large-λ limit is an η = 0 statement".into(),
        ));
    }
    let n = params.n_sites();
    let slots = n + 1;
    let d = xx_asymptotic_diag();
    let mut acc = embed_site_op(slots, 0, &params.twist.k)?;
    let mut scalar = C64::new(1.0, 0.0);
    for a in 1..=n {
        acc = acc
            .dot(&embed_pair_sym(slots, 0, 2 * a, &d)?)
            .dot(&embed_pair_sym(slots, 1, 2 * a + 1, &d)?);
        scalar *= (-C64::i() * params.xi[a - 1] * 2.0).exp() / 4.0;
    }
    let traced = partial_supertrace_front(qubit_sig(), 2, 2 * n, &acc)?;
    Ok(traced * scalar)
}

/// Residual of e^{−2iλN}·T(λ) against `transfer_asymptotic_limit` at
/// λ = −it, together with the limit's deviation from the nearest identity
/// multiple (which stays O(1): the limit is diagonal, not scalar).
pub fn transfer_asymptotic_residuals(params: &HubbardParams, t: f64) -> Result<(f64, f64)> {
    let limit = transfer_asymptotic_limit(params)?;
    let lambda = C64::new(0.0, -t);
    let big = transfer(params, lambda)?;
    let reg = (-C64::i() * lambda * 2.0).exp().powu(params.n_sites() as u32);
    let scaled = big * reg;
    let matched = rel_residual(&scaled, &limit);
    let dim = limit.nrows();
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..dim {
        tr += limit[[i, i]];
    }
    let nearest = identity(dim) * (tr / dim as f64);
    Ok((matched, rel_residual(&limit, &nearest)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hubbard::{HBranch, HubbardTwist};
    use crate::sampling::{complex_in_disc, stream_rng};

    fn fixture(n: usize, a: usize, branch: HBranch, seed: u64) -> HubbardParams {
        let mut rng = stream_rng(seed, 710);
        let alpha = complex_in_disc(&mut rng, 0.6) + C64::new(0.9, 0.3);
        let beta = complex_in_disc(&mut rng, 0.6) + C64::new(-0.7, 0.6);
        let gamma = complex_in_disc(&mut rng, 0.6) + C64::new(0.5, -0.8);
        let twist = HubbardTwist::new(a, alpha, beta, gamma).unwrap();
        let eta = complex_in_disc(&mut rng, 0.5) + C64::new(0.4, -0.6);
        let xi = (0..n)
            .map(|k| complex_in_disc(&mut rng, 0.4) + C64::new(0.45 * (k as f64 + 1.0), 0.2))
            .collect();
        HubbardParams::new(eta, xi, twist, branch).unwrap()
    }

    #[test]
    fn the_transfer_family_commutes() {
        for (a, branch) in [(1, HBranch::Principal), (2, HBranch::Shifted)] {
            let params = fixture(2, a, branch, 21);
            let mut rng = stream_rng(22, 711);
            let lambda = complex_in_disc(&mut rng, 0.7) + C64::new(0.3, 0.1);
            let mu = complex_in_disc(&mut rng, 0.7) + C64::new(-0.2, 0.25);
            let res = commutation_residual(&params, lambda, mu).unwrap();
            assert!(res < 1e-9, "family {a} on {branch:?}: commutator {res:.3e}");
        }
    }

    #[test]
    fn node_values_match_the_product_formula() {
        for (a, branch) in [(1, HBranch::Principal), (3, HBranch::Principal), (2, HBranch::Shifted)]
        {
            let params = fixture(2, a, branch, 23);
            for n in 0..2 {
                let res = node_identity_residual(&params, n).unwrap();
                assert!(res < 1e-9, "family {a}, node {n}: defect {res:.3e}");
            }
        }
        let one_site = fixture(1, 1, HBranch::Principal, 24);
        // With a single site the product collapses to the embedded twist.
        let node = transfer_at_node(&one_site, 0).unwrap();
        assert!(rel_residual(&node, &one_site.twist.k) < 1e-12);
    }

    #[test]
    fn the_free_point_transfer_has_a_diagonal_nonscalar_limit() {
        let mut params = fixture(2, 1, HBranch::Principal, 25);
        params.eta = C64::new(0.0, 0.0);
        let (matched, off_identity) = transfer_asymptotic_residuals(&params, 16.0).unwrap();
        assert!(matched < 1e-8, "limit not reached: {matched:.3e}");
        assert!(
            off_identity > 0.1,
            "limit unexpectedly close to an identity multiple: {off_identity:.3e}"
        );
        let limit = transfer_asymptotic_limit(&params).unwrap();
        let mut off_diag = 0.0f64;
        for i in 0..limit.nrows() {
            for j in 0..limit.ncols() {
                if i != j {
                    off_diag = off_diag.max(limit[[i, j]].norm());
                }
            }
        }
        assert!(off_diag < 1e-14, "limit has off-diagonal weight {off_diag:.3e}");
    }
}
