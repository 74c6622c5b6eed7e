//! The inhomogeneous Hubbard chain built on Shastry's R-matrix.
//!
//! The local space is ℂ⁴, treated as two ungraded qubits (no parities, plain
//! traces). Internally every operator is embedded at the qubit level through
//! the shared tensor helpers with the trivial signature (2|0), so the global
//! index convention is the same as everywhere else: qubit 1 least
//! significant, four-dimensional site `s` owning qubits `2s` and `2s+1`.

pub mod rmatrix;
pub mod sov;
pub mod transfer;

use crate::graded::Signature;
use crate::linalg::{eig, inv, rel_residual};
use crate::{C64, CMat, Error, Result};

/// Determination of h(λ): the defining relation sinh 2h = (iη/2)·sin 2λ has
/// two solution families; `Shifted` picks iπ/2 − h over the principal h.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HBranch {
    #[default]
    Principal,
    Shifted,
}

/// The all-zero-parity signature used for qubit-level embeddings.
pub(crate) fn qubit_sig() -> Signature {
    Signature::new(2, 0).expect("(2|0) is a valid signature")
}

/// One of the four 4×4 twist families K(a, α, β, γ), a ∈ {1,2,3,4}, closed
/// under the scalar Yang–Baxter relation with Shastry's R-matrix.
#[derive(Debug, Clone)]
pub struct HubbardTwist {
    pub a: usize,
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub k: CMat,
    /// Eigenvalues of `k` in closed form.
    pub eigenvalues: [C64; 4],
    /// Closed-form simple-spectrum flag (see `new` for the per-family rule).
    pub simple: bool,
}

impl HubbardTwist {
    /// Builds the family-`a` twist. All of α, β, γ must be nonzero (the
    /// fourth corner entry is βγ/α and the families are defined generically).
    ///
    /// Simplicity of the spectrum reduces per family to
    /// a=1: α, β, γ, βγ/α pairwise distinct;
    /// a=2: βγ ≠ α² (eigenvalues α, βγ/α, ±√(βγ));
    /// a=3: β ≠ γ (eigenvalues β, γ, ±√(βγ));
    /// a=4: never (eigenvalues ±√(βγ), each twice).
    pub fn new(a: usize, alpha: C64, beta: C64, gamma: C64) -> Result<HubbardTwist> {
        let scale = alpha.norm().max(beta.norm()).max(gamma.norm());
        if scale == 0.0 || [alpha, beta, gamma].iter().any(|z| z.norm() < 1e-14 * scale) {
            return Err(Error::Parameter(
                "twist parameters α, β, γ must all be nonzero".into(),
            ));
        }
        let corner = beta * gamma / alpha;
        let zero = C64::new(0.0, 0.0);
        let rows: [[C64; 4]; 4] = match a {
            1 => [
                [alpha, zero, zero, zero],
                [zero, beta, zero, zero],
                [zero, zero, gamma, zero],
                [zero, zero, zero, corner],
            ],
            2 => [
                [alpha, zero, zero, zero],
                [zero, zero, beta, zero],
                [zero, gamma, zero, zero],
                [zero, zero, zero, corner],
            ],
            3 => [
                [zero, zero, zero, alpha],
                [zero, beta, zero, zero],
                [zero, zero, gamma, zero],
                [corner, zero, zero, zero],
            ],
            4 => [
                [zero, zero, zero, alpha],
                [zero, zero, beta, zero],
                [zero, gamma, zero, zero],
                [corner, zero, zero, zero],
            ],
            _ => {
                return Err(Error::Argument(format!(
                    "twist family must be one of 1, 2, 3, 4 (got {a})"
                )));
            }
        };
        let mut k = CMat::zeros((4, 4));
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                k[[i, j]] = v;
            }
        }
        let root = (beta * gamma).sqrt();
        let (eigenvalues, simple) = match a {
            1 => {
                let vals = [alpha, beta, gamma, corner];
                let mut gap = f64::INFINITY;
                for i in 0..4 {
                    for j in 0..i {
                        gap = gap.min((vals[i] - vals[j]).norm());
                    }
                }
                (vals, gap > 1e-10 * scale)
            }
            2 => (
                [alpha, corner, root, -root],
                (beta * gamma - alpha * alpha).norm() > 1e-10 * scale * scale,
            ),
            3 => ([beta, gamma, root, -root], (beta - gamma).norm() > 1e-10 * scale),
            _ => ([root, -root, root, -root], false),
        };
        Ok(HubbardTwist { a, alpha, beta, gamma, k, eigenvalues, simple })
    }

    /// A similarity W with K = W·diag(eigenvalues')·W⁻¹: the identity for the
    /// already-diagonal family a=1, a numerical eigenbasis otherwise. Returns
    /// (W, W⁻¹); the diagonal entries follow the eigensolver's ordering.
    pub fn diagonalizer(&self) -> Result<(CMat, CMat)> {
        if self.a == 1 {
            let id = crate::linalg::identity(4);
            return Ok((id.clone(), id));
        }
        let (vals, vecs) = eig(&self.k)?;
        let w_inv = inv(&vecs)?;
        let mut kj = CMat::zeros((4, 4));
        for i in 0..4 {
            kj[[i, i]] = vals[i];
        }
        let rebuilt = vecs.dot(&kj).dot(&w_inv);
        if rel_residual(&rebuilt, &self.k) > 1e-10 {
            return Err(Error::Inconsistent(
                "eigenbasis does not reproduce the twist matrix; spectrum too degenerate".into(),
            ));
        }
        Ok((vecs, w_inv))
    }
}

/// Parameters of the inhomogeneous Hubbard chain: N sites, coupling
/// η = −2iU, inhomogeneities ξ, a family twist and the h-branch choice.
///
/// η = 0 is allowed (the free-fermion degeneration); the inhomogeneity
/// separation window then collapses to plain pairwise distinctness.
#[derive(Debug, Clone)]
pub struct HubbardParams {
    pub eta: C64,
    pub xi: Vec<C64>,
    pub twist: HubbardTwist,
    pub branch: HBranch,
}

impl HubbardParams {
    /// Validates that the inhomogeneities stay away from each other's
    /// η-shifted lattice: |ξ_a − ξ_b − kη| bounded below for |k| ≤ 12.
    pub fn new(eta: C64, xi: Vec<C64>, twist: HubbardTwist, branch: HBranch) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::Parameter("chain needs at least one site".into()));
        }
        let window = 12i64;
        let tol = 1e-8 * eta.norm().max(1.0);
        for a in 0..xi.len() {
            for b in 0..a {
                for k in -window..=window {
                    if (xi[a] - xi[b] - eta * k as f64).norm() <= tol {
                        return Err(Error::Parameter(format!(
                            "inhomogeneities not in generic position: ξ_{} − ξ_{} ≈ {k}·η",
                            a + 1,
                            b + 1
                        )));
                    }
                }
            }
        }
        Ok(HubbardParams { eta, xi, twist, branch })
    }

    pub fn n_sites(&self) -> usize {
        self.xi.len()
    }

    /// Hilbert-space dimension 4^N.
    pub fn dim(&self) -> usize {
        4usize.pow(self.n_sites() as u32)
    }

    pub fn h(&self, lambda: C64) -> C64 {
        rmatrix::h_of(lambda, self.eta, self.branch)
    }
}
