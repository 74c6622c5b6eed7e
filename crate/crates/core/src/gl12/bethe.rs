//! Bethe-root description of the (1|2) spectrum.
//!
//! Eigenvalues admit the two-level ansatz
//!
//!   t₁(λ) = k₁·a(λ)·Q₁(λ−η)/Q₁(λ)
//!           − d(λ)·[ k₂·Q₁(λ−η)Q₂(λ+η)/(Q₁(λ)Q₂(λ)) + k₃·Q₂(λ−η)/Q₂(λ) ]
//!
//! with Q₁(λ) = Π(λ−λ_j), Q₂(λ) = Π(λ−μ_j). Regularity at the roots forces
//! the two Bethe equation levels
//!
//!   k₁·a(λ_j)·Q₂(λ_j) = k₂·d(λ_j)·Q₂(λ_j+η),
//!   k₂·Q₂(μ_j+η)·Q₁(μ_j−η) = −k₃·Q₂(μ_j−η)·Q₁(μ_j).
//!
//! For the singular twist (k₁ = 0) the roots can be *read off* a solved
//! Q-equation: Q₁ collects the inhomogeneities on the support of the tuple
//! and Q₂ is φ with its forced roots at ξ_a+η (one per zero site) stripped,
//! while t₂ factorizes over a sign pattern h ∈ {−1,0}^N.

use crate::chain::ChainParams;
use crate::gl12::qsc::QFunction;
use crate::gl12::require_gl12;
use crate::gl12::tower::ScalarTower;
use crate::{poly, Error, Result, C64};

/// Roots of the two Q-polynomials.
#[derive(Debug, Clone)]
pub struct BetheRoots {
    pub level1: Vec<C64>,
    pub level2: Vec<C64>,
}

fn q_eval(roots: &[C64], lambda: C64) -> C64 {
    roots.iter().map(|&r| lambda - r).product()
}

/// The two-level ansatz evaluated at λ (must stay away from the roots).
pub fn naba_eigenvalue(params: &ChainParams, roots: &BetheRoots, lambda: C64) -> C64 {
    let k = &params.twist.diag;
    let eta = params.eta;
    let q1 = q_eval(&roots.level1, lambda);
    let q1m = q_eval(&roots.level1, lambda - eta);
    let q2 = q_eval(&roots.level2, lambda);
    let q2m = q_eval(&roots.level2, lambda - eta);
    let q2p = q_eval(&roots.level2, lambda + eta);
    k[0] * params.a_poly(lambda) * q1m / q1
        - params.d_poly(lambda) * (k[1] * q1m * q2p / (q1 * q2) + k[2] * q2m / q2)
}

/// Worst normalized defect of the two Bethe equation levels.
pub fn bethe_residuals(params: &ChainParams, roots: &BetheRoots) -> (f64, f64) {
    let k = &params.twist.diag;
    let eta = params.eta;
    let mut worst1 = 0.0_f64;
    for &l in &roots.level1 {
        let lhs = k[0] * params.a_poly(l) * q_eval(&roots.level2, l);
        let rhs = k[1] * params.d_poly(l) * q_eval(&roots.level2, l + eta);
        worst1 = worst1.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0));
    }
    let mut worst2 = 0.0_f64;
    for &m in &roots.level2 {
        let lhs = k[1] * q_eval(&roots.level2, m + eta) * q_eval(&roots.level1, m - eta);
        let rhs = -k[2] * q_eval(&roots.level2, m - eta) * q_eval(&roots.level1, m);
        worst2 = worst2.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0));
    }
    (worst1, worst2)
}

/// Pairwise-distinctness and lattice-avoidance conditions on a root set.
/// Level-one roots may sit on the inhomogeneities only when k₁ = 0.
pub fn admissible(params: &ChainParams, roots: &BetheRoots, tol: f64) -> bool {
    let scale = params.xi.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let gap = tol * scale;
    let distinct = |v: &[C64]| {
        v.iter()
            .enumerate()
            .all(|(i, &p)| v[i + 1..].iter().all(|&q| (p - q).norm() > gap))
    };
    if !distinct(&roots.level1) || !distinct(&roots.level2) {
        return false;
    }
    if roots
        .level1
        .iter()
        .any(|&l| roots.level2.iter().any(|&m| (l - m).norm() <= gap))
    {
        return false;
    }
    let forbidden: Vec<C64> = params
        .xi
        .iter()
        .flat_map(|&x| [x, x + params.eta])
        .collect();
    if roots
        .level2
        .iter()
        .any(|&m| forbidden.iter().any(|&f| (m - f).norm() <= gap))
    {
        return false;
    }
    let k1 = params.twist.diag[0];
    if k1.norm() > gap
        && roots
            .level1
            .iter()
            .any(|&l| params.xi.iter().any(|&x| (l - x).norm() <= gap))
    {
        return false;
    }
    true
}

/// Read the Bethe roots of a singular-twist state off its node values and
/// solved Q-equation: level one collects ξ_a over the support of the tuple,
/// level two strips from φ the forced root at ξ_a+η for every zero site.
/// The dictionary holds on the ᾱ = −k₂ branch of the Q-equation.
pub fn khat_roots(params: &ChainParams, xs: &[C64], q: &QFunction) -> Result<BetheRoots> {
    require_gl12(params.sig)?;
    let k2 = params.twist.diag[1];
    if (q.alpha_bar + k2).norm() > 1e-10 * k2.norm().max(1.0) {
        return Err(Error::Argument(
            "root extraction needs the ᾱ = −k₂ branch of the Q-equation".into(),
        ));
    }
    let scale = xs.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let mut level1 = Vec::new();
    let mut remaining = q.roots.clone();
    for (a, &x) in xs.iter().enumerate() {
        if x.norm() > 1e-6 * scale {
            level1.push(params.xi[a]);
        } else {
            let target = params.xi[a] + params.eta;
            let (idx, dist) = remaining
                .iter()
                .enumerate()
                .map(|(i, &r)| (i, (r - target).norm()))
                .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
                .ok_or_else(|| {
                    Error::Inconsistent(format!(
                        "zero site {a} has no matching forced root in φ"
                    ))
                })?;
            if dist > 1e-6 * (1.0 + target.norm()) {
                return Err(Error::Inconsistent(format!(
                    "expected a φ root at ξ_{a}+η, nearest is {dist:.3e} away"
                )));
            }
            remaining.remove(idx);
        }
    }
    Ok(BetheRoots {
        level1,
        level2: remaining,
    })
}

/// Worst normalized distance between the ansatz and the tuple's own scalar
/// tower over the probe set.
pub fn naba_residual(
    params: &ChainParams,
    xs: &[C64],
    roots: &BetheRoots,
    probes: &[C64],
) -> Result<f64> {
    let tower = ScalarTower::new(params, xs)?;
    let mut worst = 0.0_f64;
    for &l in probes {
        let direct = tower.t(1, l)?;
        let ansatz = naba_eigenvalue(params, roots, l);
        worst = worst.max((direct - ansatz).norm() / direct.norm().max(1.0));
    }
    Ok(worst)
}

/// Factorized form of t₂ for a singular-twist state: beyond the universal
/// roots at ξ_a−η, each site contributes one root — at ξ_a on the zero
/// sites of the tuple (so that t₂(ξ_a) = t₁(ξ_a)t₁(ξ_a+η) holds) and at
/// ξ_a+η on the support (forced by t₁(ξ_a)t₂(ξ_a+η) = 0):
/// t₂(λ) = k₂k₃·Π_a (λ−ξ_a+η)·(λ−ξ_a−h_a) with h_a ∈ {0, η}. Returns the
/// worst normalized defect over the probes.
pub fn khat_t2_factorization_residual(
    params: &ChainParams,
    xs: &[C64],
    probes: &[C64],
) -> Result<f64> {
    let tower = ScalarTower::new(params, xs)?;
    let k = &params.twist.diag;
    let scale = xs.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let eta = params.eta;
    let mut worst = 0.0_f64;
    for &l in probes {
        let direct = tower.t(2, l)?;
        let mut factored = k[1] * k[2];
        for (a, &x) in xs.iter().enumerate() {
            let second_root = if x.norm() > 1e-6 * scale {
                params.xi[a] + eta
            } else {
                params.xi[a]
            };
            factored *= (l - params.xi[a] + eta) * (l - second_root);
        }
        worst = worst.max((direct - factored).norm() / direct.norm().max(1.0));
    }
    Ok(worst)
}

/// First term of the two-level ansatz, Λ₁(λ) = k₁·a(λ)·Q₁(λ−η)/Q₁(λ).
/// It is the growth factor of the whole fused family: every higher
/// eigenvalue is Λ₁ times a shifted lower one.
pub fn lambda1(params: &ChainParams, roots: &BetheRoots, lambda: C64) -> C64 {
    params.twist.diag[0]
        * params.a_poly(lambda)
        * q_eval(&roots.level1, lambda - params.eta)
        / q_eval(&roots.level1, lambda)
}

/// Fused eigenvalue of height `n` in Λ-form:
///
///   t₂(λ)     = Λ₁(λ)·(k₁·t₁(λ+η) + k₃k₂·d(λ))/k₁,
///   t_{n+1}(λ) = Λ₁(λ)·t_n(λ+η)   for n ≥ 2,
///
/// which needs an invertible twist (k₁ ≠ 0). Level n = 1 falls back to the
/// plain ansatz so callers can treat the family uniformly.
pub fn lambda_form(
    params: &ChainParams,
    roots: &BetheRoots,
    n: usize,
    lambda: C64,
) -> Result<C64> {
    require_gl12(params.sig)?;
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if n == 1 {
        return Ok(naba_eigenvalue(params, roots, lambda));
    }
    let k = &params.twist.diag;
    if k[0].norm() < 1e-12 * k[1].norm().max(k[2].norm()).max(1.0) {
        return Err(Error::Parameter(
            "the Λ-form of the fused eigenvalues needs k₁ ≠ 0".into(),
        ));
    }
    if n == 2 {
        let t1_up = naba_eigenvalue(params, roots, lambda + params.eta);
        return Ok(lambda1(params, roots, lambda)
            * (k[0] * t1_up + k[2] * k[1] * params.d_poly(lambda))
            / k[0]);
    }
    Ok(lambda1(params, roots, lambda) * lambda_form(params, roots, n - 1, lambda + params.eta)?)
}

/// Cross-checks a converged root set against the scalar tower seeded with the
/// ansatz node values: worst closure and null-boundary residuals of the
/// induced tower and worst normalized mismatch of the Λ-form t₂ and t₃
/// against the tower's own interpolated values, all over the probe set.
#[derive(Debug, Clone, Copy)]
pub struct NabaTowerReport {
    pub closure: f64,
    pub null: f64,
    pub t2_mismatch: f64,
    pub t3_mismatch: f64,
}

pub fn naba_tower_report(
    params: &ChainParams,
    roots: &BetheRoots,
    probes: &[C64],
) -> Result<NabaTowerReport> {
    let xs: Vec<C64> = params
        .xi
        .iter()
        .map(|&x| naba_eigenvalue(params, roots, x))
        .collect();
    let tower = ScalarTower::new(params, &xs)?;
    let mut report = NabaTowerReport {
        closure: 0.0,
        null: 0.0,
        t2_mismatch: 0.0,
        t3_mismatch: 0.0,
    };
    for &l in probes {
        report.closure = report.closure.max(tower.closure_residual(l)?);
        report.null = report.null.max(tower.null_residual(l)?);
        let d2 = tower.t(2, l)?;
        let d3 = tower.t(3, l)?;
        let a2 = lambda_form(params, roots, 2, l)?;
        let a3 = lambda_form(params, roots, 3, l)?;
        report.t2_mismatch = report.t2_mismatch.max((a2 - d2).norm() / d2.norm().max(1.0));
        report.t3_mismatch = report.t3_mismatch.max((a3 - d3).norm() / d3.norm().max(1.0));
    }
    Ok(report)
}

/// Exact Bethe roots of the one-excitation-per-level sector of a two-site
/// chain with generic invertible twist: the second level locks to the first
/// through μ₁ = λ₁ + k₂η/(k₂−k₃), and the first level then satisfies an
/// explicit quadratic. Returns one root pair per solution.
pub fn sector11_solutions(params: &ChainParams) -> Result<Vec<BetheRoots>> {
    require_gl12(params.sig)?;
    if params.n_sites() != 2 {
        return Err(Error::Argument(
            "the explicit one-one sector solver is limited to two sites".into(),
        ));
    }
    let k = &params.twist.diag;
    let (k1, k2, k3) = (k[0], k[1], k[2]);
    if (k2 - k3).norm() < 1e-12 * k2.norm().max(k3.norm()) {
        return Err(Error::Parameter(
            "the level-two lock needs k₂ ≠ k₃".into(),
        ));
    }
    let eta = params.eta;
    let delta = k2 * eta / (k2 - k3);
    // k₁·a(λ₁)·(λ₁−μ₁) = k₂·d(λ₁)·(λ₁+η−μ₁) with μ₁ = λ₁+δ reduces to
    // −δ·k₁·a(λ₁) − (η−δ)·k₂·d(λ₁) = 0, a quadratic in λ₁.
    let a_coeffs = poly::from_roots(&[params.xi[0] - eta, params.xi[1] - eta]);
    let d_coeffs = poly::from_roots(&[params.xi[0], params.xi[1]]);
    let combo: Vec<C64> = a_coeffs
        .iter()
        .zip(d_coeffs.iter())
        .map(|(a, d)| -delta * k1 * a - (eta - delta) * k2 * d)
        .collect();
    let lambda1s = poly::roots(&poly::trim(&combo, 1e-13))?;
    Ok(lambda1s
        .into_iter()
        .map(|l1| BetheRoots {
            level1: vec![l1],
            level2: vec![l1 + delta],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Twist;
    use crate::gl12::qsc;
    use crate::gl12::reference::fixture;
    use crate::gl12::solver::diagonalization_spectrum;
    use crate::graded::Signature;
    use crate::sampling::probe_points;
    use crate::sov::eigenvalue_poly;

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
    fn singular_twist_states_have_admissible_bethe_roots() {
        let params = singular_params(2);
        let diag = diagonalization_spectrum(&params, 41).unwrap();
        let probes = probe_points(41, 9, 5, &params.xi, params.eta);
        let mut support_sizes = [0usize; 3];
        for xs in &diag.tuples {
            let q = qsc::build_with(&params, xs, -params.twist.diag[1], 41).unwrap();
            assert!(q.functional_residual < 1e-9);
            let roots = khat_roots(&params, xs, &q).unwrap();
            let (r1, r2) = bethe_residuals(&params, &roots);
            assert!(r1 < 1e-9, "first level defect {r1:.3e}");
            assert!(r2 < 1e-9, "second level defect {r2:.3e}");
            assert!(admissible(&params, &roots, 1e-8));
            let nr = naba_residual(&params, xs, &roots, &probes).unwrap();
            assert!(nr < 1e-9, "ansatz mismatch {nr:.3e} for {xs:?}");
            let fr = khat_t2_factorization_residual(&params, xs, &probes).unwrap();
            assert!(fr < 1e-9, "t₂ factorization defect {fr:.3e}");
            support_sizes[roots.level1.len()] += 1;
        }
        // Support strata: 1 empty, 2+2 singletons, 4 full.
        assert_eq!(support_sizes, [1, 4, 4]);
    }

    #[test]
    fn one_one_sector_solutions_are_true_eigenvalues() {
        let params = fixture().unwrap();
        let diag = diagonalization_spectrum(&params, 43).unwrap();
        let probes = probe_points(43, 10, 4, &params.xi, params.eta);
        let sols = sector11_solutions(&params).unwrap();
        assert_eq!(sols.len(), 2);
        let mut matched = Vec::new();
        for roots in &sols {
            let (r1, r2) = bethe_residuals(&params, &roots);
            assert!(r1 < 1e-10 && r2 < 1e-10, "bethe defects {r1:.3e}, {r2:.3e}");
            assert!(admissible(&params, roots, 1e-8));
            let hit = diag
                .tuples
                .iter()
                .enumerate()
                .find(|(_, xs)| {
                    probes.iter().all(|&l| {
                        let direct = eigenvalue_poly(&params, xs, l);
                        (naba_eigenvalue(&params, roots, l) - direct).norm()
                            < 1e-8 * direct.norm().max(1.0)
                    })
                })
                .map(|(i, _)| i);
            let hit = hit.expect("sector solution matches no eigenvalue");
            assert!(!matched.contains(&hit), "two sector solutions hit one state");
            matched.push(hit);
        }
    }

    #[test]
    fn lambda_form_reproduces_the_fused_tower() {
        // Cross-route check: the recursion t₂ = Λ₁(k₁t₁(λ+η)+k₃k₂d)/k₁,
        // t₃ = Λ₁t₂(λ+η) against the interpolation tower seeded with the
        // ansatz node values, plus the closure/null certificates of that
        // tower, for both converged (1,1)-sector solutions.
        let params = fixture().unwrap();
        let probes = probe_points(29, 12, 5, &params.xi, params.eta);
        let sols = sector11_solutions(&params).unwrap();
        assert_eq!(sols.len(), 2);
        for roots in &sols {
            let report = naba_tower_report(&params, roots, &probes).unwrap();
            assert!(report.closure < 1e-10, "closure {:.3e}", report.closure);
            assert!(report.null < 1e-10, "null {:.3e}", report.null);
            assert!(report.t2_mismatch < 1e-10, "t2 {:.3e}", report.t2_mismatch);
            assert!(report.t3_mismatch < 1e-10, "t3 {:.3e}", report.t3_mismatch);
        }
    }

    #[test]
    fn misplaced_roots_break_the_equations() {
        let params = fixture().unwrap();
        let sols = sector11_solutions(&params).unwrap();
        let mut roots = sols[0].clone();
        roots.level2[0] += c(0.3, 0.2);
        let (_, r2) = bethe_residuals(&params, &roots);
        assert!(r2 > 1e-4, "moved level-two root kept residual {r2:.3e}");
    }
}
