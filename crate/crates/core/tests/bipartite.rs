//! Property tests of the bipartite measures against majorization and the polytope engine.

mod common;

use locc_core::bipartite::{
    accessible_entanglement, accessible_volume, in_accessible_set, source_entanglement, source_polytope, source_volume,
};
use locc_core::polytope::{brion_volume, convert_frame, vertex_adjacency, Convention, EmbeddingFrame};
use locc_core::{majorizes, SchmidtVector};
use proptest::prelude::*;

fn schmidt(d: usize) -> impl Strategy<Value = SchmidtVector> {
    prop::collection::vec(0.01f64..1.0, d).prop_map(|x| SchmidtVector::canonicalize(&x).unwrap())
}

/// A pair `(λ, λ')` with `λ ≺ λ'`: `λ` is a convex mix of permutations of `λ'`.
fn ordered_pair(d: usize) -> impl Strategy<Value = (SchmidtVector, SchmidtVector)> {
    (
        schmidt(d),
        prop::collection::vec(
            (
                0.0f64..1.0,
                Just(()).prop_perturb(move |_, mut r| {
                    let mut p: Vec<usize> = (0..d).collect();
                    for i in (1..d).rev() {
                        p.swap(i, r.random_range(0..=i));
                    }
                    p
                }),
            ),
            1..4,
        ),
    )
        .prop_map(move |(target, mix)| {
            let total: f64 = mix.iter().map(|m| m.0).sum::<f64>() + 1e-9;
            let t = target.as_slice();
            let x: Vec<f64> = (0..d)
                .map(|i| mix.iter().map(|(w, p)| w / total * t[p[i]]).sum::<f64>() + 1e-9 / total * t[i])
                .collect();
            (SchmidtVector::canonicalize(&x).unwrap(), target)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measures_are_monotone_under_locc((l, lp) in (2usize..6).prop_flat_map(ordered_pair)) {
        prop_assume!(majorizes(&lp, &l).unwrap());
        prop_assert!(in_accessible_set(&l, &lp).unwrap());
        let (es, esp) = (source_entanglement(&l).unwrap().value, source_entanglement(&lp).unwrap().value);
        let (ea, eap) = (accessible_entanglement(&l).unwrap().value, accessible_entanglement(&lp).unwrap().value);
        prop_assert!(esp <= es + 1e-9, "E_s {es} -> {esp}");
        prop_assert!(eap <= ea + 1e-9, "E_a {ea} -> {eap}");
        prop_assert!(source_volume(&lp).unwrap() >= source_volume(&l).unwrap() - 1e-12);
        prop_assert!(accessible_volume(&lp).unwrap().volume <= accessible_volume(&l).unwrap().volume + 1e-12);
    }

    #[test]
    fn measures_lie_in_unit_interval(l in (2usize..7).prop_flat_map(schmidt)) {
        let es = source_entanglement(&l).unwrap().value;
        let ea = accessible_entanglement(&l).unwrap().value;
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&es));
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&ea));
    }

    #[test]
    fn two_level_measures_coincide(x in 0.5f64..1.0) {
        let l = SchmidtVector::canonicalize(&[x, 1.0 - x]).unwrap();
        let es = source_entanglement(&l).unwrap().value;
        let ea = accessible_entanglement(&l).unwrap().value;
        prop_assert!((es - ea).abs() < 1e-12);
        prop_assert!((es - 2.0 * (1.0 - x)).abs() < 1e-12);
    }
}

#[test]
fn closed_form_matches_brion_up_to_six_levels() {
    let mut r = common::rng(21);
    for d in 3..=6 {
        for _ in 0..3 {
            let l = common::random_schmidt(&mut r, d);
            let (h, vs) = source_polytope(&l).unwrap();
            let adj = vertex_adjacency(&h, &vs).unwrap();
            let projected = brion_volume(&vs, &adj).unwrap();
            let frame = EmbeddingFrame {
                ambient_dim: d,
                convention: Convention::Projected,
            };
            let geometric = convert_frame(projected, frame, Convention::Intrinsic) / (1..=d).product::<usize>() as f64;
            let closed = source_volume(&l).unwrap();
            assert!(
                (closed - geometric).abs() < 1e-9 * closed.max(1e-3),
                "d={d}: {closed} vs {geometric}"
            );
        }
    }
}

#[test]
fn trailing_zeros_change_the_object() {
    let a = SchmidtVector::canonicalize(&[0.5, 0.5]).unwrap();
    let b = SchmidtVector::canonicalize(&[0.5, 0.5, 0.0]).unwrap();
    assert_eq!(source_entanglement(&a).unwrap().value, 1.0);
    assert!(source_entanglement(&b).unwrap().value < 1.0);
}
