//! Twisted, inhomogeneous rational spin chains on (C^{m|n})^{⊗N}.
//!
//! The monodromy acts on an auxiliary copy of the local space (stored as the
//! least-significant tensor slot) times the quantum chain:
//!
//! M₀(λ) = K₀ · R₀N(λ−ξ_N) ⋯ R₀1(λ−ξ_1),
//!
//! and the transfer matrix is its partial supertrace over the auxiliary slot.
//! With R(u) = u·Id + η·P this makes T(λ) a degree-N matrix polynomial with
//! leading coefficient str(K)·Id, and at an inhomogeneity node the regular
//! (point-evaluated) product formula below acquires one overall factor of η
//! from the R-matrix that degenerates to η·P there.

use ndarray::s;

use crate::graded::{
    embed_one_site, identity, partial_supertrace_front, permutation, r_embedded, Signature,
};
use crate::linalg::{inv, kron_power, max_abs, rel_residual, singular_values};
use crate::{C64, CMat, CVec, Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Relative tolerance for the structural twist checks (evenness, simplicity,
/// invertibility, diagonalizability).
const TWIST_TOL: f64 = 1e-10;

/// An even (block-diagonal) twist matrix K together with an even similarity
/// W bringing it to diagonal form, K = W·diag·W⁻¹, computed block by block so
/// that W never mixes parities.
#[derive(Debug, Clone)]
pub struct Twist {
    pub sig: Signature,
    pub k: CMat,
    pub w: CMat,
    pub w_inv: CMat,
    pub diag: CVec,
    /// All eigenvalues pairwise distinct (within tolerance).
    pub simple: bool,
    /// No eigenvalue within tolerance of zero.
    pub invertible: bool,
    /// Both blocks admit a well-conditioned eigenbasis.
    pub diagonalizable: bool,
}

impl Twist {
    /// Build from an explicit matrix; rejects anything with entries in the
    /// parity-mixing blocks.
    pub fn new(sig: Signature, k: CMat) -> Result<Self> {
        let d = sig.dim();
        if k.nrows() != d || k.ncols() != d {
            return Err(Error::Structure(format!(
                "twist must be {d}×{d}, got {}×{}",
                k.nrows(),
                k.ncols()
            )));
        }
        let scale = max_abs(&k).max(1.0);
        let mut off = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if sig.parity(i) != sig.parity(j) {
                    off = off.max(k[[i, j]].norm());
                }
            }
        }
        if off > 1e-12 * scale {
            return Err(Error::Structure(
                "twist must be even: the blocks mixing parities must vanish".into(),
            ));
        }

        let m = sig.m;
        let (we, de, oke) = block_eigen(&k.slice(s![..m, ..m]).to_owned())?;
        let (wo, dd, oko) = block_eigen(&k.slice(s![m.., m..]).to_owned())?;

        let mut w = CMat::zeros((d, d));
        let mut diag = CVec::zeros(d);
        for i in 0..m {
            diag[i] = de[i];
            for j in 0..m {
                w[[i, j]] = we[[i, j]];
            }
        }
        for i in 0..d - m {
            diag[m + i] = dd[i];
            for j in 0..d - m {
                w[[m + i, m + j]] = wo[[i, j]];
            }
        }
        let w_inv = inv(&w)?;

        let eig_scale = diag.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let mut simple = true;
        for i in 0..d {
            for j in i + 1..d {
                if (diag[i] - diag[j]).norm() <= TWIST_TOL * eig_scale {
                    simple = false;
                }
            }
        }
        let invertible = diag.iter().all(|z| z.norm() > TWIST_TOL * eig_scale);

        Ok(Twist {
            sig,
            k,
            w,
            w_inv,
            diag,
            simple,
            invertible,
            diagonalizable: oke && oko,
        })
    }

    /// Diagonal twist with the given entries (ordered even block then odd).
    pub fn diagonal(sig: Signature, entries: &[C64]) -> Result<Self> {
        let d = sig.dim();
        if entries.len() != d {
            return Err(Error::Structure(format!(
                "diagonal twist needs {d} entries, got {}",
                entries.len()
            )));
        }
        let mut k = CMat::zeros((d, d));
        for (i, &z) in entries.iter().enumerate() {
            k[[i, i]] = z;
        }
        Twist::new(sig, k)
    }

    /// str K = Σ_i (−1)^{p(i)} K_ii.
    pub fn supertrace(&self) -> C64 {
        let mut acc = ZERO;
        for i in 0..self.sig.dim() {
            let w = if self.sig.parity(i) == 1 { -1.0 } else { 1.0 };
            acc += self.k[[i, i]] * w;
        }
        acc
    }

    /// N-fold tensor power W^{⊗N} of the diagonalizing similarity (site 1
    /// least significant). Even W ⇒ no grading signs arise.
    pub fn w_tensor(&self, sites: usize) -> CMat {
        kron_power(&self.w, sites)
    }

    /// N-fold tensor power of W⁻¹.
    pub fn w_inv_tensor(&self, sites: usize) -> CMat {
        kron_power(&self.w_inv, sites)
    }

    /// The same chain data with K replaced by its diagonal form.
    pub fn diagonalized(&self) -> Result<Twist> {
        Twist::diagonal(self.sig, self.diag.as_slice().unwrap())
    }
}

/// Eigen-decompose one parity block. Exactly diagonal blocks keep W = Id and
/// their diagonal as eigenvalues, so diagonal twists round-trip exactly.
fn block_eigen(block: &CMat) -> Result<(CMat, CVec, bool)> {
    let b = block.nrows();
    if b == 0 {
        return Ok((CMat::zeros((0, 0)), CVec::zeros(0), true));
    }
    let mut is_diag = true;
    for i in 0..b {
        for j in 0..b {
            if i != j && block[[i, j]] != ZERO {
                is_diag = false;
            }
        }
    }
    if is_diag {
        let diag = CVec::from_iter((0..b).map(|i| block[[i, i]]));
        return Ok((CMat::eye(b), diag, true));
    }
    let (vals, vecs) = crate::linalg::eig(block)?;
    let sv = singular_values(&vecs)?;
    let ok = sv[sv.len() - 1] > TWIST_TOL * sv[0];
    Ok((vecs, vals, ok))
}

/// Chain data: signature, anisotropy η, inhomogeneities ξ, twist.
#[derive(Debug, Clone)]
pub struct ChainParams {
    pub sig: Signature,
    pub eta: C64,
    pub xi: Vec<C64>,
    pub twist: Twist,
}

impl ChainParams {
    /// Validates η ≠ 0 and that the inhomogeneities stay away from the
    /// η-shifted lattice of each other: |ξ_a − ξ_b − kη| bounded below for
    /// all |k| ≤ 2(m+n+2). The fused hierarchy and the separated bases both
    /// divide by such differences.
    pub fn new(sig: Signature, eta: C64, xi: Vec<C64>, twist: Twist) -> Result<Self> {
        if twist.sig != sig {
            return Err(Error::Structure("twist signature differs from chain signature".into()));
        }
        if xi.is_empty() {
            return Err(Error::Parameter("chain needs at least one site".into()));
        }
        if eta.norm() == 0.0 {
            return Err(Error::Parameter("anisotropy η must be nonzero".into()));
        }
        let window = 2 * (sig.m + sig.n + 2) as i64;
        let tol = 1e-8 * eta.norm().max(1.0);
        for a in 0..xi.len() {
            for b in 0..a {
                for k in -window..=window {
                    let gap = xi[a] - xi[b] - eta * k as f64;
                    if gap.norm() <= tol {
                        return Err(Error::Parameter(format!(
                            "inhomogeneities not in generic position: ξ_{} − ξ_{} ≈ {k}·η",
                            a + 1,
                            b + 1
                        )));
                    }
                }
            }
        }
        Ok(ChainParams { sig, eta, xi, twist })
    }

    pub fn n_sites(&self) -> usize {
        self.xi.len()
    }

    /// Hilbert-space dimension d^N.
    pub fn dim(&self) -> usize {
        self.sig.dim().pow(self.n_sites() as u32)
    }

    /// d(λ) = Π_n (λ − ξ_n).
    pub fn d_poly(&self, lambda: C64) -> C64 {
        self.xi.iter().map(|&x| lambda - x).product()
    }

    /// a(λ) = d(λ + η).
    pub fn a_poly(&self, lambda: C64) -> C64 {
        self.d_poly(lambda + self.eta)
    }

    /// Monodromy matrix on aux ⊗ chain (auxiliary slot least significant):
    /// K₀ R₀N(λ−ξ_N) ⋯ R₀1(λ−ξ_1).
    pub fn monodromy(&self, lambda: C64) -> Result<CMat> {
        let n = self.n_sites();
        let sites = n + 1;
        let mut acc = embed_one_site(self.sig, sites, 0, &self.twist.k)?;
        for a in (1..=n).rev() {
            let r = r_embedded(self.sig, sites, 0, a, self.eta, lambda - self.xi[a - 1])?;
            acc = acc.dot(&r);
        }
        Ok(acc)
    }

    /// Transfer matrix T(λ) = str₀ M₀(λ) on the chain space.
    pub fn transfer(&self, lambda: C64) -> Result<CMat> {
        let m = self.monodromy(lambda)?;
        partial_supertrace_front(self.sig, 1, self.n_sites(), &m)
    }

    /// Transfer matrix at the node ξ_n (n is 0-based here), evaluated through
    /// the point formula
    /// T(ξ_n) = η · R_{n,n−1} ⋯ R_{n,1} · K_n · R_{n,N} ⋯ R_{n,n+1},
    /// with R_{n,a} = R_{n,a}(ξ_n − ξ_a) acting on the chain alone. The
    /// leading factor η is exactly the weight the degenerate auxiliary
    /// R-matrix contributes at the node.
    pub fn transfer_at_node(&self, n: usize) -> Result<CMat> {
        let sites = self.n_sites();
        if n >= sites {
            return Err(Error::Argument(format!("node index {n} out of range")));
        }
        let mut acc = identity(self.sig.dim(), sites) * self.eta;
        for a in (0..n).rev() {
            acc = acc.dot(&self.r_pair(n, a)?);
        }
        acc = acc.dot(&embed_one_site(self.sig, sites, n, &self.twist.k)?);
        for a in ((n + 1)..sites).rev() {
            acc = acc.dot(&self.r_pair(n, a)?);
        }
        Ok(acc)
    }

    /// R_{n,a}(ξ_n − ξ_a) on the chain: the graded permutation is symmetric
    /// in its two slots, so only the slot order of the embedding matters.
    fn r_pair(&self, n: usize, a: usize) -> Result<CMat> {
        let sites = self.n_sites();
        let u = self.xi[n] - self.xi[a];
        let (lo, hi) = if n < a { (n, a) } else { (a, n) };
        let mut r = permutation(self.sig, sites, lo, hi)? * self.eta;
        for i in 0..self.dim() {
            r[[i, i]] += u;
        }
        Ok(r)
    }

    /// Replace the twist by its diagonal form (same η, ξ).
    pub fn diagonalized(&self) -> Result<ChainParams> {
        ChainParams::new(self.sig, self.eta, self.xi.clone(), self.twist.diagonalized()?)
    }
}

/// Graded Yang–Baxter residual on three local factors:
/// ‖R₁₂(λ−μ)R₁₃(λ)R₂₃(μ) − R₂₃(μ)R₁₃(λ)R₁₂(λ−μ)‖ (relative).
pub fn ybe_residual(sig: Signature, eta: C64, lambda: C64, mu: C64) -> Result<f64> {
    let r12 = r_embedded(sig, 3, 0, 1, eta, lambda - mu)?;
    let r13 = r_embedded(sig, 3, 0, 2, eta, lambda)?;
    let r23 = r_embedded(sig, 3, 1, 2, eta, mu)?;
    let lhs = r12.dot(&r13).dot(&r23);
    let rhs = r23.dot(&r13).dot(&r12);
    Ok(rel_residual(&lhs, &rhs))
}

/// RTT residual: with two auxiliary slots in front of the chain,
/// ‖R₁₂(λ−μ) M₁(λ) M₂(μ) − M₂(μ) M₁(λ) R₁₂(λ−μ)‖ (relative).
pub fn rtt_residual(params: &ChainParams, lambda: C64, mu: C64) -> Result<f64> {
    let sig = params.sig;
    let n = params.n_sites();
    let sites = n + 2;
    let mono = |aux: usize, z: C64| -> Result<CMat> {
        let mut acc = embed_one_site(sig, sites, aux, &params.twist.k)?;
        for a in (0..n).rev() {
            let r = r_embedded(sig, sites, aux, 2 + a, params.eta, z - params.xi[a])?;
            acc = acc.dot(&r);
        }
        Ok(acc)
    };
    let m1 = mono(0, lambda)?;
    let m2 = mono(1, mu)?;
    let r12 = r_embedded(sig, sites, 0, 1, params.eta, lambda - mu)?;
    let lhs = r12.dot(&m1).dot(&m2);
    let rhs = m2.dot(&m1).dot(&r12);
    Ok(rel_residual(&lhs, &rhs))
}

/// Commutation residual ‖[T(λ), T(μ)]‖ / scale.
pub fn transfer_commutation_residual(params: &ChainParams, lambda: C64, mu: C64) -> Result<f64> {
    let tl = params.transfer(lambda)?;
    let tm = params.transfer(mu)?;
    Ok(rel_residual(&tl.dot(&tm), &tm.dot(&tl)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{digits_of, permutation_two_site, r_two_site};
    use crate::sampling::{complex_in_disc, stream_rng};
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_params(sig: Signature, n: usize, seed: u64) -> ChainParams {
        let mut rng = stream_rng(seed, 7);
        let eta = c(0.83, 0.21);
        let xi: Vec<C64> = (0..n)
            .map(|a| complex_in_disc(&mut rng, 0.9) + c(3.0 * a as f64, 0.0))
            .collect();
        let d = sig.dim();
        let entries: Vec<C64> = (0..d)
            .map(|i| complex_in_disc(&mut rng, 1.0) + c(1.5 + i as f64, 0.0))
            .collect();
        let twist = Twist::diagonal(sig, &entries).unwrap();
        ChainParams::new(sig, eta, xi, twist).unwrap()
    }

    #[test]
    fn r_matrix_point_identities() {
        let sig = Signature::new(1, 2).unwrap();
        let eta = c(0.4, -0.7);
        let u = c(1.3, 0.5);
        // R(0) = ηP
        let r0 = r_two_site(sig, eta, ZERO);
        let p = permutation_two_site(sig) * eta;
        assert!(max_abs(&(&r0 - &p)) < 1e-15);
        // R(u)R(−u) = (η² − u²)·Id
        let prod = r_two_site(sig, eta, u).dot(&r_two_site(sig, eta, -u));
        let scalar = eta * eta - u * u;
        let expect = CMat::eye(9) * scalar;
        assert!(max_abs(&(&prod - &expect)) < 1e-12);
    }

    #[test]
    fn ybe_holds_across_signatures() {
        let mut rng = stream_rng(11, 0);
        for (m, n) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
            let sig = Signature::new(m, n).unwrap();
            for _ in 0..5 {
                let eta = complex_in_disc(&mut rng, 1.5);
                let l = complex_in_disc(&mut rng, 2.0);
                let mu = complex_in_disc(&mut rng, 2.0);
                assert!(ybe_residual(sig, eta, l, mu).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn rtt_and_transfer_commutation() {
        let sig = Signature::new(1, 2).unwrap();
        let params = sample_params(sig, 2, 5);
        let mut rng = stream_rng(5, 9);
        let l = complex_in_disc(&mut rng, 2.0);
        let mu = complex_in_disc(&mut rng, 2.0);
        assert!(rtt_residual(&params, l, mu).unwrap() < 1e-10);
        assert!(transfer_commutation_residual(&params, l, mu).unwrap() < 1e-10);
    }

    /// The point formula at a node carries one factor of η relative to the
    /// naive product of regular R-matrices; the supertraced monodromy is the
    /// independent route.
    #[test]
    fn node_evaluation_matches_supertraced_monodromy() {
        for (m, n_odd, sites) in [(1usize, 1usize, 2usize), (1, 2, 2), (2, 1, 3)] {
            let sig = Signature::new(m, n_odd).unwrap();
            let params = sample_params(sig, sites, 23 + sites as u64);
            for node in 0..sites {
                let via_product = params.transfer_at_node(node).unwrap();
                let via_trace = params.transfer(params.xi[node]).unwrap();
                assert!(
                    rel_residual(&via_product, &via_trace) < 1e-11,
                    "sig ({m}|{n_odd}), node {node}"
                );
            }
        }
    }

    #[test]
    fn transfer_is_polynomial_with_supertrace_leading_term() {
        let sig = Signature::new(1, 2).unwrap();
        let params = sample_params(sig, 2, 3);
        let big = c(2.0e6, 1.0e6);
        let t = params.transfer(big).unwrap();
        let scale = big.powu(2);
        let expect = CMat::eye(params.dim()) * (params.twist.supertrace() * scale);
        let rel = max_abs(&(&t - &expect)) / scale.norm();
        assert!(rel < 1e-4, "rel={rel}");
    }

    /// The transfer matrix is even: it commutes with the global parity
    /// operator diag((−1)^{p(x)}).
    #[test]
    fn transfer_commutes_with_global_parity() {
        let sig = Signature::new(1, 1).unwrap();
        let params = sample_params(sig, 3, 8);
        let dim = params.dim();
        let mut parity = CMat::zeros((dim, dim));
        for x in 0..dim {
            let digits = digits_of(sig.dim(), 3, x);
            let w = if sig.multi_parity(&digits) == 1 { -1.0 } else { 1.0 };
            parity[[x, x]] = c(w, 0.0);
        }
        let t = params.transfer(c(0.37, -0.4)).unwrap();
        assert!(rel_residual(&t.dot(&parity), &parity.dot(&t)) < 1e-13);
    }

    /// Conjugating the twist by an even invertible W conjugates the transfer
    /// matrix by W^{⊗N}.
    #[test]
    fn twist_similarity_conjugates_transfer() {
        let sig = Signature::new(1, 2).unwrap();
        let d = sig.dim();
        let n = 2;
        let diag_entries = [c(1.3, 0.0), c(-0.8, 0.5), c(0.0, 2.1)];
        let mut k = CMat::zeros((d, d));
        // random-ish even W (block diag: 1×1 and 2×2)
        let w = array![
            [c(1.0, 0.0), ZERO, ZERO],
            [ZERO, c(0.9, 0.3), c(-0.4, 0.1)],
            [ZERO, c(0.2, -0.6), c(1.1, 0.2)]
        ];
        let w_inv = inv(&w).unwrap();
        let mut dmat = CMat::zeros((d, d));
        for i in 0..d {
            dmat[[i, i]] = diag_entries[i];
        }
        k.assign(&w.dot(&dmat).dot(&w_inv));

        let eta = c(0.6, 0.1);
        let xi = vec![c(0.0, 0.0), c(1.7, -0.4)];
        let t_full = Twist::new(sig, k).unwrap();
        let t_diag = Twist::diagonal(sig, &diag_entries).unwrap();
        let p_full = ChainParams::new(sig, eta, xi.clone(), t_full).unwrap();
        let p_diag = ChainParams::new(sig, eta, xi, t_diag).unwrap();

        let lambda = c(0.45, 0.8);
        let lhs = p_full.transfer(lambda).unwrap();
        let wt = kron_power(&w, n);
        let wt_inv = kron_power(&w_inv, n);
        let rhs = wt.dot(&p_diag.transfer(lambda).unwrap()).dot(&wt_inv);
        assert!(rel_residual(&lhs, &rhs) < 1e-10);

        // and the stored similarity diagonalizes the stored twist
        let p_full2 = ChainParams::new(
            sig,
            eta,
            vec![c(0.0, 0.0), c(1.7, -0.4)],
            Twist::new(sig, p_full.twist.k.clone()).unwrap(),
        )
        .unwrap();
        let tw = &p_full2.twist;
        let mut recon = tw.w.dot(&CMat::from_diag(&tw.diag)).dot(&tw.w_inv);
        recon -= &tw.k;
        assert!(max_abs(&recon) < 1e-10);
    }

    #[test]
    fn twist_structure_flags_and_errors() {
        let sig = Signature::new(1, 2).unwrap();
        // parity-mixing entry rejected
        let mut bad = CMat::eye(3);
        bad[[0, 2]] = c(0.3, 0.0);
        assert!(Twist::new(sig, bad).is_err());
        // degenerate eigenvalues flagged
        let t = Twist::diagonal(sig, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!(!t.simple);
        assert!(t.invertible);
        // zero eigenvalue flagged
        let t = Twist::diagonal(sig, &[ZERO, c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert!(!t.invertible);
        // Jordan block in the odd block: not diagonalizable
        let mut jordan = CMat::zeros((3, 3));
        jordan[[0, 0]] = c(1.0, 0.0);
        jordan[[1, 1]] = c(2.0, 0.0);
        jordan[[1, 2]] = c(1.0, 0.0);
        jordan[[2, 2]] = c(2.0, 0.0);
        let t = Twist::new(sig, jordan).unwrap();
        assert!(!t.diagonalizable);
        assert!(!t.simple);
        // exact diagonal keeps W = Id
        let t = Twist::diagonal(sig, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert!(max_abs(&(&t.w - &CMat::eye(3))) == 0.0);
        assert!(t.simple && t.invertible && t.diagonalizable);
    }

    #[test]
    fn inhomogeneities_on_the_eta_lattice_are_rejected() {
        let sig = Signature::new(1, 2).unwrap();
        let twist = Twist::diagonal(sig, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        let eta = c(0.5, 0.0);
        let bad = ChainParams::new(sig, eta, vec![ZERO, eta * 2.0], twist.clone());
        assert!(matches!(bad, Err(Error::Parameter(_))));
        let good = ChainParams::new(sig, eta, vec![ZERO, c(1.3, 0.9)], twist.clone());
        assert!(good.is_ok());
        let zero_eta = ChainParams::new(sig, ZERO, vec![ZERO, c(1.3, 0.9)], twist);
        assert!(matches!(zero_eta, Err(Error::Parameter(_))));
    }
}
