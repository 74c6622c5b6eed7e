//! Property tests for the graded tensor layer: randomized signatures, sites
//! and operator entries, checking the structural identities that every other
//! module leans on.

use ndarray::Array2;
use proptest::prelude::*;
use sovlab_core::graded::{
    digits_of, embed_elementary, embed_one_site, embed_two_site, linear_index, permutation,
    permutation_two_site, supertrace, supertrace_multi, Signature,
};
use sovlab_core::linalg::max_abs;
use sovlab_core::{C64, CMat};

fn sig_strategy() -> impl Strategy<Value = Signature> {
    prop_oneof![
        Just(Signature::new(1, 1).unwrap()),
        Just(Signature::new(1, 2).unwrap()),
        Just(Signature::new(2, 1).unwrap()),
        Just(Signature::new(2, 2).unwrap()),
        Just(Signature::new(3, 0).unwrap()),
    ]
}

fn complex_entry() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn one_site_op(d: usize) -> impl Strategy<Value = CMat> {
    proptest::collection::vec(complex_entry(), d * d)
        .prop_map(move |v| Array2::from_shape_vec((d, d), v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn index_round_trip(sig in sig_strategy(), sites in 1usize..4, raw in 0usize..10_000) {
        let d = sig.dim();
        let dim = d.pow(sites as u32);
        let idx = raw % dim;
        let digits = digits_of(d, sites, idx);
        prop_assert_eq!(linear_index(d, &digits), idx);
        prop_assert!(digits.iter().all(|&k| k < d));
    }

    #[test]
    fn embedded_permutations_are_involutions(sig in sig_strategy(), pick in 0usize..3) {
        let sites = 3;
        let (a, b) = [(0, 1), (0, 2), (1, 2)][pick];
        let p = permutation(sig, sites, a, b).unwrap();
        let dim = sig.dim().pow(sites as u32);
        prop_assert!(max_abs(&(&p.dot(&p) - &CMat::eye(dim))) < 1e-13);
    }

    #[test]
    fn elementary_ops_obey_graded_commutation(
        sig in sig_strategy(),
        i1 in 0usize..4, j1 in 0usize..4, i2 in 0usize..4, j2 in 0usize..4,
    ) {
        let d = sig.dim();
        let (i1, j1, i2, j2) = (i1 % d, j1 % d, i2 % d, j2 % d);
        let a = embed_elementary(sig, 2, 0, i1, j1);
        let b = embed_elementary(sig, 2, 1, i2, j2);
        let pa = sig.parity(i1) ^ sig.parity(j1);
        let pb = sig.parity(i2) ^ sig.parity(j2);
        let sign = if pa & pb == 1 { -1.0 } else { 1.0 };
        prop_assert!(max_abs(&(&a.dot(&b) - &(b.dot(&a) * sign))) < 1e-13);
    }

    #[test]
    fn one_site_embeddings_multiply_sitewise(sig in sig_strategy(), seed_ops in (0u8..2).prop_flat_map(|_| (1usize..2,))) {
        // (X at a)(Y at a) = (XY at a): crossing signs compose consistently.
        let _ = seed_ops;
        let d = sig.dim();
        let mut x = CMat::zeros((d, d));
        let mut y = CMat::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                x[[i, j]] = C64::new((i * d + j) as f64 * 0.17 - 0.4, 0.23 * i as f64);
                y[[i, j]] = C64::new(0.31 - (j as f64) * 0.11, (i + j) as f64 * 0.07);
            }
        }
        let xy = x.dot(&y);
        for site in 0..3 {
            let ex = embed_one_site(sig, 3, site, &x).unwrap();
            let ey = embed_one_site(sig, 3, site, &y).unwrap();
            let exy = embed_one_site(sig, 3, site, &xy).unwrap();
            prop_assert!(max_abs(&(&ex.dot(&ey) - &exy)) < 1e-12);
        }
    }

    #[test]
    fn supertrace_is_ad_invariant_under_even_conjugation(sig in sig_strategy(), op in sig_strategy().prop_flat_map(|s| one_site_op(s.dim()))) {
        // str(G A G⁻¹) = str(A) for block-diagonal (even, invertible) G.
        let d = sig.dim();
        if op.nrows() != d { return Ok(()); }
        let mut g = CMat::eye(d);
        for i in 0..d {
            g[[i, i]] = C64::new(1.0 + i as f64, 0.5 - 0.2 * i as f64);
        }
        let ginv = {
            let mut m = CMat::eye(d);
            for i in 0..d {
                m[[i, i]] = C64::new(1.0, 0.0) / g[[i, i]];
            }
            m
        };
        let conj = g.dot(&op).dot(&ginv);
        let lhs = supertrace(sig, &conj).unwrap();
        let rhs = supertrace(sig, &op).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn permutation_conjugation_relocates_one_site_ops(sig in sig_strategy(), i in 0usize..4, j in 0usize..4) {
        let d = sig.dim();
        let (i, j) = (i % d, j % d);
        let sites = 3;
        for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let p = permutation(sig, sites, a, b).unwrap();
            let xa = embed_elementary(sig, sites, a, i, j);
            let xb = embed_elementary(sig, sites, b, i, j);
            prop_assert!(max_abs(&(&p.dot(&xa).dot(&p) - &xb)) < 1e-13);
        }
    }

    #[test]
    fn two_site_embedding_is_linear_and_consistent(sig in sig_strategy(), coeff in complex_entry()) {
        let d = sig.dim();
        let p = permutation_two_site(sig);
        let scaled = &p * coeff;
        let e_p = embed_two_site(sig, 3, 0, 2, &p).unwrap();
        let e_scaled = embed_two_site(sig, 3, 0, 2, &scaled).unwrap();
        prop_assert!(max_abs(&(&e_scaled - &(&e_p * coeff))) < 1e-13);
    }

    #[test]
    fn full_supertrace_matches_weighted_diagonal(sig in sig_strategy()) {
        let d = sig.dim();
        let dim = d * d;
        let mut m = CMat::zeros((dim, dim));
        for x in 0..dim {
            m[[x, x]] = C64::new(x as f64 + 0.5, -(x as f64));
        }
        let got = supertrace_multi(sig, 2, &m).unwrap();
        let mut expect = C64::new(0.0, 0.0);
        for x in 0..dim {
            let digits = digits_of(d, 2, x);
            let w = if sig.multi_parity(&digits) == 1 { -1.0 } else { 1.0 };
            expect += m[[x, x]] * w;
        }
        prop_assert!((got - expect).norm() < 1e-13);
    }
}
