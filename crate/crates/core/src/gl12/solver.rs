//! Spectrum solvers for the (1|2) chain.
//!
//! Three independent routes to the same set of 3^N node-value tuples:
//!
//! * `diagonalization_spectrum` — brute force. Diagonalize a generic member
//!   of the commuting family and read the node values off each eigenvector.
//! * `closure_spectrum` — functional. Treat the x_a as unknowns, impose the
//!   height-three closure relation at N sample points, and hunt roots of the
//!   resulting polynomial system with damped Newton from many random starts.
//!   Spurious roots (the system has Bézout degree 4^N but only 3^N physical
//!   solutions) are rejected by re-checking the closure and square relations
//!   at probe points held out from the solve.
//! * `cubic_spectrum` — for the distinguished twist with k₁ = 0 the closure
//!   collapses to the cubic system x_a·t₂(ξ_a+η) = 0, which splits over
//!   supports: each subset S of sites carries 2^|S| solutions with x_a ≠ 0
//!   exactly on S, and Σ_S 2^|S| = 3^N.

use ndarray::Array2;
use rayon::prelude::*;

use crate::chain::ChainParams;
use crate::fusion::f_coeff;
use crate::gl12::require_gl12;
use crate::gl12::tower::ScalarTower;
use crate::linalg::{eig, solve, spectral_norm};
use crate::sampling::{complex_in_disc, probe_points, stream_rng};
use crate::sov::eigenvalue_poly;
use crate::{CVec, Error, Result, C64};

/// Expected number of joint eigenvalue tuples.
pub fn expected_count(n_sites: usize) -> usize {
    3usize.pow(n_sites as u32)
}

/// Knobs of the iterative solvers. `starts_per_target` random starts are
/// launched per expected solution in every round; rounds repeat with fresh
/// starts until the count closes or `max_rounds` is exhausted.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub seed: u64,
    pub tol: f64,
    pub starts_per_target: usize,
    pub max_rounds: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 7,
            tol: 1e-8,
            starts_per_target: 50,
            max_rounds: 4,
        }
    }
}

/// A solved spectrum: one node-value tuple per joint eigenvector. `complete`
/// records whether the expected 3^N count was reached.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub tuples: Vec<Vec<C64>>,
    pub complete: bool,
}

/// Spectrum read off a brute-force diagonalization, together with the joint
/// eigenvectors themselves.
pub struct DiagSpectrum {
    pub tuples: Vec<Vec<C64>>,
    pub vectors: Vec<CVec>,
}

/// Magnitude scale of the node values: the largest spectral norm among the
/// node transfer matrices.
pub fn node_scale(params: &ChainParams) -> Result<f64> {
    let mut scale = 1.0_f64;
    for a in 0..params.n_sites() {
        scale = scale.max(spectral_norm(&params.transfer_at_node(a)?)?);
    }
    Ok(scale)
}

/// Diagonalize a random combination of two transfer matrices (a generically
/// simple member of the commuting family), then extract x_a as the component
/// ratio of T(ξ_a)·v against v at the pivot entry. A residual check guards
/// against accidental eigenvalue collisions of the combination; on failure a
/// different combination is drawn.
pub fn diagonalization_spectrum(params: &ChainParams, seed: u64) -> Result<DiagSpectrum> {
    let nodes: Vec<_> = (0..params.n_sites())
        .map(|a| params.transfer_at_node(a))
        .collect::<Result<_>>()?;
    let scales: Vec<f64> = nodes
        .iter()
        .map(spectral_norm)
        .collect::<Result<_>>()?;
    for attempt in 0..4 {
        let probes = probe_points(seed, 90 + attempt, 2, &params.xi, params.eta);
        let mut rng = stream_rng(seed, 80 + attempt);
        let gamma = complex_in_disc(&mut rng, 1.0) + C64::new(0.5, 0.5);
        let mixed = &params.transfer(probes[0])? + &(&params.transfer(probes[1])? * gamma);
        let (_, vecs) = eig(&mixed)?;
        let mut tuples = Vec::with_capacity(vecs.ncols());
        let mut vectors = Vec::with_capacity(vecs.ncols());
        let mut worst: f64 = 0.0;
        for j in 0..vecs.ncols() {
            let v: CVec = vecs.column(j).to_owned();
            let vn = v.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
            let pivot = v
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap())
                .unwrap()
                .0;
            let mut xs = Vec::with_capacity(nodes.len());
            for (node, &ns) in nodes.iter().zip(scales.iter()) {
                let tv = node.dot(&v);
                let x = tv[pivot] / v[pivot];
                let resid = (&tv - &(&v * x))
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0_f64, f64::max);
                worst = worst.max(resid / (ns * vn).max(1e-300));
                xs.push(x);
            }
            tuples.push(xs);
            vectors.push(v);
        }
        if worst < 1e-8 {
            return Ok(DiagSpectrum { tuples, vectors });
        }
    }
    Err(Error::Incomplete(
        "no generic combination of transfer matrices separated the joint eigenvectors".into(),
    ))
}

/// Greedy multiset match between two collections of node tuples; returns the
/// worst component-wise distance over the matching, or infinity when the
/// collections differ in size.
pub fn tuple_match_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut free: Vec<usize> = (0..b.len()).collect();
    let mut worst: f64 = 0.0;
    for xs in a {
        let (slot, dist) = free
            .iter()
            .enumerate()
            .map(|(slot, &j)| {
                let d = xs
                    .iter()
                    .zip(b[j].iter())
                    .map(|(p, q)| (p - q).norm())
                    .fold(0.0_f64, f64::max);
                (slot, d)
            })
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        free.remove(slot);
        worst = worst.max(dist);
    }
    worst
}

/// Damped Newton iteration for a holomorphic square system, with a numeric
/// Jacobian from central differences. Returns the converged root or None.
fn newton<F>(f: &F, start: &[C64], scale: f64, max_iter: usize) -> Option<Vec<C64>>
where
    F: Fn(&[C64]) -> Option<Vec<C64>>,
{
    let n = start.len();
    let h = 1e-6 * scale.max(1.0);
    let mut x = start.to_vec();
    let norm_inf = |v: &[C64]| v.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    let mut fx = f(&x)?;
    for _ in 0..max_iter {
        let fnorm = norm_inf(&fx);
        if fnorm < 1e-12 {
            return Some(x);
        }
        // Numeric Jacobian, column by column.
        let mut jac = Array2::<C64>::zeros((n, n));
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += C64::new(h, 0.0);
            xm[j] -= C64::new(h, 0.0);
            let fp = f(&xp)?;
            let fm = f(&xm)?;
            for i in 0..n {
                jac[[i, j]] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs = CVec::from(fx.clone());
        let step = solve(&jac, &rhs).ok()?;
        // Backtracking: halve the step until the residual actually drops.
        let mut damp = 1.0_f64;
        let mut accepted = None;
        for _ in 0..10 {
            let trial: Vec<C64> = x
                .iter()
                .zip(step.iter())
                .map(|(xi, si)| xi - si * damp)
                .collect();
            if let Some(ft) = f(&trial) {
                if norm_inf(&ft) < fnorm {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            damp *= 0.5;
        }
        let (nx, nf) = accepted?;
        if norm_inf(&nx) > 1e3 * scale.max(1.0) {
            return None;
        }
        x = nx;
        fx = nf;
    }
    if norm_inf(&fx) < 1e-12 {
        Some(x)
    } else {
        None
    }
}

/// Greedy clustering of root candidates: two tuples within `tol` in the
/// component-wise max distance count as the same root.
fn cluster(cands: Vec<Vec<C64>>, tol: f64) -> Vec<Vec<C64>> {
    let mut reps: Vec<Vec<C64>> = Vec::new();
    for c in cands {
        let dup = reps.iter().any(|r| {
            r.iter()
                .zip(c.iter())
                .map(|(p, q)| (p - q).norm())
                .fold(0.0_f64, f64::max)
                < tol
        });
        if !dup {
            reps.push(c);
        }
    }
    reps
}

/// Hunt the full spectrum through the closure relation alone.
pub fn closure_spectrum(params: &ChainParams, opts: &SolveOptions) -> Result<Spectrum> {
    require_gl12(params.sig)?;
    let n = params.n_sites();
    let expected = expected_count(n);
    let scale = node_scale(params)?;
    let sample = probe_points(opts.seed, 31, n, &params.xi, params.eta);
    let check = probe_points(opts.seed, 32, 3, &params.xi, params.eta);

    // Fixed per-equation normalization, independent of x, so that the Newton
    // system is well scaled without distorting its roots.
    let kd = &params.twist.diag;
    let kmag = (kd[1] * kd[2]).norm().max(kd[0].norm()).max(1.0);
    let eq_scale: Vec<f64> = sample
        .iter()
        .map(|&l| kmag * params.d_poly(l).norm().max(1.0) * scale.powi(3).max(1.0))
        .collect();

    let evaluate = |xs: &[C64]| -> Option<Vec<C64>> {
        let tower = ScalarTower::new(params, xs).ok()?;
        sample
            .iter()
            .zip(eq_scale.iter())
            .map(|(&l, &s)| tower.closure_defect(l).ok().map(|d| d / s))
            .collect()
    };

    let accept = |xs: &[C64]| -> bool {
        let tower = match ScalarTower::new(params, xs) {
            Ok(t) => t,
            Err(_) => return false,
        };
        let functional_ok = check.iter().all(|&l| {
            tower.closure_residual(l).map(|r| r < opts.tol).unwrap_or(false)
                && tower.null_residual(l).map(|r| r < opts.tol).unwrap_or(false)
        });
        let support_ok = !params.twist.invertible
            || xs.iter().all(|x| x.norm() > 1e-8 * scale);
        functional_ok && support_ok
    };

    let mut found: Vec<Vec<C64>> = Vec::new();
    for round in 0..opts.max_rounds {
        let starts = opts.starts_per_target * expected;
        let roots: Vec<Vec<C64>> = (0..starts)
            .into_par_iter()
            .filter_map(|idx| {
                let mut rng =
                    stream_rng(opts.seed, 10_000 + (round as u64) * 1_000_000 + idx as u64);
                let start: Vec<C64> = (0..n)
                    .map(|_| complex_in_disc(&mut rng, 2.0 * scale))
                    .collect();
                newton(&evaluate, &start, scale, 60)
            })
            .collect();
        let mut cands = found.clone();
        cands.extend(roots.into_iter().filter(|xs| accept(xs)));
        found = cluster(cands, 1e-6 * scale);
        if found.len() >= expected {
            break;
        }
    }
    Ok(Spectrum {
        complete: found.len() == expected,
        tuples: found,
    })
}

/// Spectrum of the distinguished singular twist (k₁ = 0) through the cubic
/// system, stratified by support subsets.
pub fn cubic_spectrum(params: &ChainParams, opts: &SolveOptions) -> Result<Spectrum> {
    require_gl12(params.sig)?;
    let kd = &params.twist.diag;
    let kscale = kd.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if kd[0].norm() > 1e-12 * kscale {
        return Err(Error::Parameter(format!(
            "the cubic route needs a twist with vanishing first eigenvalue, got {}",
            kd[0]
        )));
    }
    if !params.twist.simple {
        return Err(Error::Parameter(
            "the cubic route needs a simple twist spectrum (k₂ ≠ k₃, both nonzero)".into(),
        ));
    }
    let n = params.n_sites();
    let scale = node_scale(params)?;
    let (k2, k3) = (kd[1], kd[2]);
    let xi = &params.xi;
    let eta = params.eta;

    // Precompute the fixed coefficients of the brackets:
    // bracket_a(x) = k₂k₃·d(ξ_a+η) + Σ_r f_r^{(2)}(ξ_a+η)·t₁(ξ_r+η)·x_r.
    let base: Vec<C64> = (0..n).map(|a| k2 * k3 * params.d_poly(xi[a] + eta)).collect();
    let fmat: Vec<Vec<C64>> = (0..n)
        .map(|a| (0..n).map(|r| f_coeff(xi, eta, r, 2, xi[a] + eta)).collect())
        .collect();

    let bracket = |a: usize, xs: &[C64]| -> C64 {
        let mut acc = base[a];
        for r in 0..n {
            acc += fmat[a][r] * eigenvalue_poly(params, xs, xi[r] + eta) * xs[r];
        }
        acc
    };

    let eq_scale = base
        .iter()
        .map(|z| z.norm())
        .fold(1.0_f64, f64::max)
        .max(kscale * kscale * scale * scale);

    let mut found: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]];
    let mut complete = true;
    for mask in 1u32..(1 << n) as u32 {
        let support: Vec<usize> = (0..n).filter(|&a| mask & (1 << a) != 0).collect();
        let k = support.len();
        let target = 1usize << k;
        let embed = |ys: &[C64]| -> Vec<C64> {
            let mut xs = vec![C64::new(0.0, 0.0); n];
            for (slot, &a) in support.iter().enumerate() {
                xs[a] = ys[slot];
            }
            xs
        };
        let evaluate = |ys: &[C64]| -> Option<Vec<C64>> {
            let xs = embed(ys);
            Some(support.iter().map(|&a| bracket(a, &xs) / eq_scale).collect())
        };
        let mut stratum: Vec<Vec<C64>> = Vec::new();
        for round in 0..opts.max_rounds {
            let starts = opts.starts_per_target * target;
            let roots: Vec<Vec<C64>> = (0..starts)
                .into_par_iter()
                .filter_map(|idx| {
                    let mut rng = stream_rng(
                        opts.seed,
                        20_000 + (mask as u64) * 10_000_000 + (round as u64) * 100_000 + idx as u64,
                    );
                    let start: Vec<C64> = (0..k)
                        .map(|_| complex_in_disc(&mut rng, 2.0 * scale))
                        .collect();
                    newton(&evaluate, &start, scale, 60)
                })
                .collect();
            let mut cands = stratum.clone();
            // Roots that fall back onto a smaller support belong to another
            // stratum; drop them here to avoid double counting.
            cands.extend(
                roots
                    .into_iter()
                    .filter(|ys| ys.iter().all(|y| y.norm() > 1e-7 * scale)),
            );
            stratum = cluster(cands, 1e-6 * scale);
            if stratum.len() >= target {
                break;
            }
        }
        if stratum.len() != target {
            complete = false;
        }
        found.extend(stratum.into_iter().map(|ys| embed(&ys)));
    }
    Ok(Spectrum {
        complete: complete && found.len() == expected_count(n),
        tuples: found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Twist;
    use crate::gl12::reference::fixture;
    use crate::gl12::sig;
    use crate::graded::Signature;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn singular_params(n: usize) -> ChainParams {
        let sig = Signature::new(1, 2).unwrap();
        let eta = c(0.7, 0.2);
        let xi: Vec<C64> = (0..n).map(|a| c(1.1 * a as f64, -0.3 * a as f64)).collect();
        let k = [c(0.0, 0.0), c(-0.8, 0.5), c(0.0, 2.1)];
        ChainParams::new(sig, eta, xi, Twist::diagonal(sig, &k).unwrap()).unwrap()
    }

    #[test]
    fn closure_hunt_recovers_the_two_site_spectrum() {
        let params = fixture().unwrap();
        let diag = diagonalization_spectrum(&params, 11).unwrap();
        let opts = SolveOptions {
            seed: 11,
            starts_per_target: 30,
            ..SolveOptions::default()
        };
        let hunted = closure_spectrum(&params, &opts).unwrap();
        assert!(hunted.complete, "found {} tuples", hunted.tuples.len());
        let scale = node_scale(&params).unwrap();
        let dist = tuple_match_distance(&hunted.tuples, &diag.tuples);
        assert!(dist < 1e-7 * scale, "spectra differ by {dist:.3e}");
    }

    #[test]
    fn closure_hunt_recovers_a_one_site_spectrum() {
        let sig_ = sig();
        let eta = c(0.7, 0.2);
        let k = [c(1.3, 0.0), c(-0.8, 0.5), c(0.0, 2.1)];
        let params =
            ChainParams::new(sig_, eta, vec![c(0.2, 0.1)], Twist::diagonal(sig_, &k).unwrap())
                .unwrap();
        let diag = diagonalization_spectrum(&params, 13).unwrap();
        let opts = SolveOptions {
            seed: 13,
            starts_per_target: 30,
            ..SolveOptions::default()
        };
        let hunted = closure_spectrum(&params, &opts).unwrap();
        assert!(hunted.complete);
        let scale = node_scale(&params).unwrap();
        assert!(tuple_match_distance(&hunted.tuples, &diag.tuples) < 1e-7 * scale);
    }

    #[test]
    fn cubic_route_matches_diagonalization_for_the_singular_twist() {
        let params = singular_params(2);
        let diag = diagonalization_spectrum(&params, 17).unwrap();
        let opts = SolveOptions {
            seed: 17,
            starts_per_target: 30,
            ..SolveOptions::default()
        };
        let cubic = cubic_spectrum(&params, &opts).unwrap();
        assert!(cubic.complete, "found {} tuples", cubic.tuples.len());
        let scale = node_scale(&params).unwrap();
        let dist = tuple_match_distance(&cubic.tuples, &diag.tuples);
        assert!(dist < 1e-7 * scale, "spectra differ by {dist:.3e}");
    }

    #[test]
    fn cubic_route_rejects_invertible_twists() {
        let params = fixture().unwrap();
        assert!(cubic_spectrum(&params, &SolveOptions::default()).is_err());
    }
}
