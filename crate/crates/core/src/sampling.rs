//! Deterministic pseudo-random sampling: seeded streams, probe points that
//! stay away from the shifted inhomogeneity lattice, and random complex draws.

use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Seeded RNG for a named sub-stream of a global seed.
///
/// Distinct `stream` values give statistically independent, reproducible
/// generators, so parallel work items can draw without sharing state.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut r = ChaCha12Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform draw from the complex disc of the given radius.
pub fn complex_in_disc<R: Rng>(rng: &mut R, radius: f64) -> C64 {
    loop {
        let re = rng.gen_range(-1.0..1.0);
        let im = rng.gen_range(-1.0..1.0);
        if re * re + im * im <= 1.0 {
            return C64::new(re * radius, im * radius);
        }
    }
}

/// Probe points kept at distance ≥ `0.1·|η|` from every `ξ_a + k·η`, |k| ≤ 3.
///
/// Evaluation points for interpolation formulas and functional-equation
/// residuals must avoid the shifted inhomogeneity lattice, where coefficient
/// functions have poles or degenerate zeros.
pub fn probe_points(seed: u64, stream: u64, count: usize, xi: &[C64], eta: C64) -> Vec<C64> {
    let mut rng = stream_rng(seed, stream);
    let spread = xi.iter().map(|z| z.norm()).fold(1.0, f64::max) + 2.0 * eta.norm();
    let min_dist = 0.1 * eta.norm();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = complex_in_disc(&mut rng, spread);
        let ok = xi.iter().all(|&x| {
            (-3..=3).all(|k| (z - x - eta * k as f64).norm() >= min_dist)
        });
        if ok {
            out.push(z);
        }
    }
    out
}

/// `count` random complex numbers in the unit-ish disc (radius `scale`).
pub fn complex_points(seed: u64, stream: u64, count: usize, scale: f64) -> Vec<C64> {
    let mut rng = stream_rng(seed, stream);
    (0..count).map(|_| complex_in_disc(&mut rng, scale)).collect()
}
