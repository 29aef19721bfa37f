mod common;

use bc_core::density::{
    default_r_ladder, partial_density, quasi_separation_count, separation_constant, uniform_upper_density,
};
use bc_core::grid::{dyadic_centers, transport_grid};
use bc_core::{DiskPoint, Mobius};
use common::disk_point;
use proptest::prelude::*;

fn point_set() -> impl Strategy<Value = Vec<DiskPoint>> {
    prop::collection::vec(disk_point(0.9999), 0..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adding_points_does_not_decrease_density(c in point_set(), extra in disk_point(0.9999), r in 0.6..0.9999f64) {
        let mut more = c.clone();
        more.push(extra);
        prop_assert!(partial_density(&more, r).unwrap() >= partial_density(&c, r).unwrap());
    }

    #[test]
    fn repeated_points_scale_density(c in point_set(), k in 1usize..5, r in 0.6..0.9999f64) {
        let repeated: Vec<DiskPoint> = c.iter().flat_map(|p| std::iter::repeat_n(*p, k)).collect();
        let (one, many) = (partial_density(&c, r).unwrap(), partial_density(&repeated, r).unwrap());
        prop_assert!((many - k as f64 * one).abs() <= 1e-12 * many.max(1.0));
    }

    #[test]
    fn density_is_invariant_on_transported_grids(c in point_set(), a in disk_point(0.9), t in -3.0..3.0f64) {
        let m = Mobius::new(a, t);
        let moved: Vec<DiskPoint> = c.iter().map(|p| m.apply(*p).unwrap()).collect();
        let grid = dyadic_centers(3, 6, true).unwrap();
        let ladder = default_r_ladder(1.0 - 1e-4, 4).unwrap();
        let before = uniform_upper_density(&c, &grid, &ladder).unwrap();
        let after = uniform_upper_density(&moved, &transport_grid(&grid, &m).unwrap(), &ladder).unwrap();
        for (row0, row1) in before.values.iter().zip(&after.values) {
            for (x, y) in row0.iter().zip(row1) {
                prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0), "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn separation_and_quasi_separation_are_invariant(c in point_set(), a in disk_point(0.9), t in -3.0..3.0f64) {
        let m = Mobius::new(a, t);
        let moved: Vec<DiskPoint> = c.iter().map(|p| m.apply(*p).unwrap()).collect();
        let (s0, s1) = (separation_constant(&c), separation_constant(&moved));
        prop_assert!(s0 == s1 || (s0 - s1).abs() < 1e-6 * s0.max(1.0));
        let q = quasi_separation_count(&c, 1.0).unwrap();
        prop_assert!(q.point_centered <= q.bound && q.bound <= c.len());
    }

    #[test]
    fn d_plus_is_the_top_row_maximum(c in point_set()) {
        let grid = dyadic_centers(3, 5, true).unwrap();
        let est = uniform_upper_density(&c, &grid, &default_r_ladder(1.0 - 1e-4, 3).unwrap()).unwrap();
        let top = est.values.last().unwrap();
        prop_assert_eq!(est.d_plus, top.iter().cloned().fold(0.0, f64::max));
        prop_assert!(est.witness.is_some());
    }
}

#[test]
fn clustered_sets_are_denser() {
    // many points at one spot near the boundary versus a single one
    let p = DiskPoint::from_re_im(0.99, 0.0).unwrap();
    let grid = dyadic_centers(3, 8, true).unwrap();
    let ladder = default_r_ladder(1.0 - 1e-4, 4).unwrap();
    let single = uniform_upper_density(&[p], &grid, &ladder).unwrap().d_plus;
    let cluster = uniform_upper_density(&[p; 100], &grid, &ladder).unwrap().d_plus;
    assert!((cluster - 100.0 * single).abs() < 1e-9 * cluster);
    assert!(cluster > 1.0);
}
