mod common;

use bc_core::carleson::{
    carleson_constant, carleson_constant_with_witness, light_subsquare_search, measure_of_square, occupied_squares,
    is_heavy_square, zero_measure, DiskMeasure, DyadicSquare,
};
use common::{disk_point, product};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn measure() -> impl Strategy<Value = DiskMeasure> {
    prop::collection::vec((disk_point(0.999), 0.01..1.0f64), 0..25).prop_map(|a| DiskMeasure::new(a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn occupied_masses_match_direct_sums(sigma in measure()) {
        for (q, m) in occupied_squares(&sigma, 3, 12) {
            prop_assert!((m - measure_of_square(&sigma, q)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_matches_exhaustive_oracle(sigma in measure()) {
        let oracle = (3..=9)
            .flat_map(DyadicSquare::level_squares)
            .map(|q| measure_of_square(&sigma, q) / q.side())
            .fold(0.0, f64::max);
        let got = carleson_constant_with_witness(&sigma, 3, 9);
        prop_assert!((got.value - oracle).abs() <= 1e-12 * oracle.max(1.0));
        if let Some(w) = got.witness {
            prop_assert!((measure_of_square(&sigma, w) / w.side() - got.value).abs() <= 1e-12 * got.value);
        }
    }

    #[test]
    fn square_mass_splits_into_children_and_top(sigma in measure(), level in 3u32..10, index in 0u64..8) {
        let q = DyadicSquare::new(level, index).unwrap();
        let [a, b] = q.children();
        let top: f64 = sigma
            .atoms()
            .iter()
            .filter(|(z, _)| q.contains(*z) && z.abs() <= 1.0 - q.side() / 2.0)
            .map(|(_, m)| m)
            .sum();
        let split = measure_of_square(&sigma, a) + measure_of_square(&sigma, b) + top;
        prop_assert!((measure_of_square(&sigma, q) - split).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_depth(sigma in measure(), extra in 0u32..10) {
        prop_assert!(carleson_constant(&sigma, 3, 10) <= carleson_constant(&sigma, 3, 10 + extra));
        prop_assert!(carleson_constant(&sigma, 4, 10) <= carleson_constant(&sigma, 3, 10));
    }

    #[test]
    fn rotation_by_base_squares(sigma in measure(), k in 0u32..8) {
        // rotating by a whole level-3 square permutes squares of every level ≥ 3
        let rotated = sigma.rotated(TAU * k as f64 / 8.0);
        let (c0, c1) = (carleson_constant(&sigma, 3, 14), carleson_constant(&rotated, 3, 14));
        prop_assert!((c0 - c1).abs() <= 1e-9 * c0.max(1.0), "{} vs {}", c0, c1);
    }

    #[test]
    fn zero_measure_has_bounded_constant(f in product(10, 0.999)) {
        // each atom contributes (1 - |a|²) ≤ 2 (1 - |a|) < 2 ℓ(Q) to any square containing it
        let sigma = zero_measure(&f);
        prop_assert!(carleson_constant(&sigma, 3, 38) <= 2.0 * f.degree() as f64);
    }

    #[test]
    fn light_subsquares_are_light(sigma in measure(), level in 3u32..8, index in 0u64..8, eps in 0.05..0.9f64) {
        let q = DyadicSquare::new(level, index).unwrap();
        if is_heavy_square(&sigma, q).heavy {
            if let Some(found) = light_subsquare_search(&sigma, q, eps, 20).unwrap() {
                prop_assert!(q.is_ancestor_of(&found.square));
                prop_assert!(found.ratio <= eps * (1.0 + 1e-9));
            }
        }
    }
}

#[test]
fn empty_measure() {
    assert_eq!(carleson_constant(&DiskMeasure::empty(), 3, 38), 0.0);
    assert!(carleson_constant_with_witness(&DiskMeasure::empty(), 3, 38).witness.is_none());
}

#[test]
fn single_atom_constant() {
    // atom at 1 - 2^{-10}: the best square is the smallest one containing it
    let z = common::point(1.0 - (-10f64).exp2(), 1e-9);
    let sigma = DiskMeasure::new(vec![(z, 1.0)]).unwrap();
    let got = carleson_constant_with_witness(&sigma, 3, 38);
    let w = got.witness.unwrap();
    assert!(w.contains(z));
    assert!(!w.children().iter().any(|c| c.contains(z)));
    assert!((got.value - 1.0 / w.side()).abs() < 1e-9);
}
