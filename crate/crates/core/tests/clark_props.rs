mod common;

use bc_core::clark::{
    clark_measure, gradient_identity_with, herglotz_real_part, is_heavy_arc, light_subarc_search, poisson_extension, Arc,
};
use bc_core::{relative_gap, BoundaryPoint, DiskPoint};
use common::{disk_point, product};
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn atoms_solve_f_equals_alpha(f in product(30, 0.99), alpha in -PI..PI) {
        let mu = clark_measure(&f, BoundaryPoint::new(alpha)).unwrap();
        prop_assert_eq!(mu.len(), f.degree());
        let target = BoundaryPoint::new(alpha).value();
        for &(t, m) in &mu.atoms {
            prop_assert!((f.boundary_value(t) - target).norm() < 1e-9);
            prop_assert!(relative_gap(m, 1.0 / f.boundary_phase_speed(t)) < 1e-12);
        }
        prop_assert!(mu.atoms.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn herglotz_reconstruction(f in product(30, 0.99), alpha in -PI..PI, z in disk_point(0.95)) {
        let a = BoundaryPoint::new(alpha);
        let mu = clark_measure(&f, a).unwrap();
        prop_assert!(relative_gap(poisson_extension(&mu, z), herglotz_real_part(&f, a, z)) < 1e-8);
        let at_origin = herglotz_real_part(&f, a, DiskPoint::origin());
        prop_assert!(relative_gap(mu.total_mass(), at_origin) < 1e-10);
    }

    #[test]
    fn gradient_identity(f in product(30, 0.99), alpha in -PI..PI, z in disk_point(0.95)) {
        let mu = clark_measure(&f, BoundaryPoint::new(alpha)).unwrap();
        prop_assert!(gradient_identity_with(&f, &mu, z).gap < 1e-8);
    }

    #[test]
    fn light_subarcs_are_light(f in product(20, 0.99), alpha in -PI..PI, center in -PI..PI, len in 0.01..1.0f64, eps in 0.05..0.9f64) {
        let mu = clark_measure(&f, BoundaryPoint::new(alpha)).unwrap();
        let arc = Arc::new(center, len).unwrap();
        if is_heavy_arc(&mu, &arc).heavy {
            if let Some(found) = light_subarc_search(&mu, &arc, eps, 1e-9).unwrap() {
                prop_assert!(found.ratio <= eps * (1.0 + 1e-9));
                prop_assert!(found.arc.length() <= arc.length() * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn identity_map_has_the_lebesgue_like_measure() {
    // F = z: one atom at α with mass 1
    let f = bc_core::BlaschkeProduct::power(1).unwrap();
    let mu = clark_measure(&f, BoundaryPoint::new(0.7)).unwrap();
    assert_eq!(mu.len(), 1);
    assert!((mu.atoms[0].0 - 0.7).abs() < 1e-12 && (mu.atoms[0].1 - 1.0).abs() < 1e-12);
}

#[test]
fn power_measures_are_equally_spaced() {
    let d = 6;
    let f = bc_core::BlaschkeProduct::power(d).unwrap();
    let mu = clark_measure(&f, BoundaryPoint::new(0.0)).unwrap();
    assert_eq!(mu.len(), d);
    for (k, &(t, m)) in mu.atoms.iter().enumerate() {
        let expected = bc_core::geometry::normalize_angle(2.0 * PI * k as f64 / d as f64);
        assert!((bc_core::geometry::normalize_angle(t - expected)).abs() < 1e-10, "{t} vs {expected}");
        assert!((m - 1.0 / d as f64).abs() < 1e-12);
    }
}
