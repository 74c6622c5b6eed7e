//! Closed-form two-site reference spectrum.
//!
//! For N = 2 with ξ₁ = 0 the nine eigenvalue polynomials of the (1|2) chain
//! can be written down explicitly: three states whose quadratic has a
//! "diagonal" linear coefficient 2ηk_i, and six states that pair two twist
//! eigenvalues through a square root. These closed forms were derived by
//! hand and are frozen here as an independent oracle for every numerical
//! route (diagonalization, closure hunts, functional equations). The
//! standard benchmark point used throughout the tests is `fixture()`.

use crate::chain::{ChainParams, Twist};
use crate::gl12::sig;
use crate::{Result, C64};

/// Benchmark chain: N = 2, ξ = (0, 1.1−0.3i), η = 0.7+0.2i,
/// K = diag(1.3, −0.8+0.5i, 2.1i).
pub fn fixture() -> Result<ChainParams> {
    let eta = C64::new(0.7, 0.2);
    let xi = vec![C64::new(0.0, 0.0), C64::new(1.1, -0.3)];
    let k = [C64::new(1.3, 0.0), C64::new(-0.8, 0.5), C64::new(0.0, 2.1)];
    let twist = Twist::diagonal(sig(), &k)?;
    ChainParams::new(sig(), eta, xi, twist)
}

/// The nine closed-form eigenvalue polynomials for an N = 2 chain with
/// ξ₁ = 0, second node ξ₂ = xi2, twist eigenvalues k = (k₁; k₂, k₃).
/// Coefficients are returned low to high: t₁(λ) = c₀ + c₁λ + c₂λ².
pub fn reference_polynomials(eta: C64, xi2: C64, k: [C64; 3]) -> Vec<[C64; 3]> {
    let (k1, k2, k3) = (k[0], k[1], k[2]);
    let strk = k1 - k2 - k3;
    let mut polys = Vec::with_capacity(9);
    // Unpaired states: linear coefficient 2ηk_i − strK·ξ₂ and a constant
    // term that carries a sign depending on whether the level sits on the
    // even (k₁) or odd (k₂, k₃) side.
    let constants = [
        k1 * eta * (eta - xi2),
        -k2 * eta * (eta + xi2),
        -k3 * eta * (eta + xi2),
    ];
    for (i, &c0) in constants.iter().enumerate() {
        let ki = k[i];
        polys.push([c0, eta * ki * 2.0 - strk * xi2, strk]);
    }
    // Paired states: for each pair (i, j) the two constants split through
    // the discriminant s_ij = √(4 k_i k_j η² + (k_i − k_j)² ξ₂²).
    for &(i, j) in &[(0usize, 1usize), (0, 2), (1, 2)] {
        let (ki, kj) = (k[i], k[j]);
        let s = (ki * kj * eta * eta * 4.0 + (ki - kj) * (ki - kj) * xi2 * xi2).sqrt();
        let c1 = (ki + kj) * eta - strk * xi2;
        for sign in [1.0, -1.0] {
            let c0 = eta * 0.5 * (-(ki + kj) * xi2 - s * sign);
            polys.push([c0, c1, strk]);
        }
    }
    polys
}

/// Node-value tuples (t₁(ξ₁), t₁(ξ₂)) of the nine reference polynomials.
pub fn reference_tuples(eta: C64, xi2: C64, k: [C64; 3]) -> Vec<[C64; 2]> {
    reference_polynomials(eta, xi2, k)
        .into_iter()
        .map(|c| {
            let at = |l: C64| c[0] + c[1] * l + c[2] * l * l;
            [at(C64::new(0.0, 0.0)), at(xi2)]
        })
        .collect()
}
