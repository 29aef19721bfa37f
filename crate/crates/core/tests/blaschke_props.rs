mod common;

use bc_core::geometry::DISK_MARGIN;
use bc_core::{BlaschkeProduct, DiskPoint, Mobius};
use common::{disk_point, naive_evaluate, product, random_product, rng};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn evaluation_matches_definition(f in product(12, 0.95), z in disk_point(0.95)) {
        prop_assert!((f.evaluate(z) - naive_evaluate(&f, z.value())).norm() < 1e-12);
    }

    #[test]
    fn schwarz_bound(f in product(20, 0.99), z in disk_point(0.999)) {
        prop_assert!(f.hyperbolic_derivative(z) <= 1.0 + 1e-12);
    }

    #[test]
    fn zero_sum_comparability(f in product(20, 0.99), z in disk_point(0.999)) {
        // with |F(z)| > 1/2 the ratio lies in [(1 - t²)/log(1/t²) at t = 1/2, 1/log 4 · 2]
        if f.evaluate(z).norm() > 0.5 {
            let ratio = f.one_minus_abs_sq(z) / f.zero_sum_surrogate(z);
            prop_assert!((0.54..=1.85).contains(&ratio), "ratio {}", ratio);
        }
    }

    #[test]
    fn degree_one_comparability_is_exact(a in disk_point(0.999), z in disk_point(0.999)) {
        let f = BlaschkeProduct::new(vec![a], 0.3).unwrap();
        let (lhs, rhs) = (f.one_minus_abs_sq(z), f.zero_sum_surrogate(z));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn boundary_values_are_unimodular(f in product(20, 0.99), theta in -PI..PI) {
        prop_assert!((f.boundary_value(theta).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_is_an_antiderivative_of_phase_speed(f in product(10, 0.9), theta in -PI..PI) {
        let h = 1e-5;
        let numeric = (f.boundary_phase(theta + h) - f.boundary_phase(theta - h)) / (2.0 * h);
        let exact = f.boundary_phase_speed(theta);
        prop_assert!((numeric - exact).abs() <= 1e-5 * exact.max(1.0));
        let value = Complex64::from_polar(1.0, f.boundary_phase(theta));
        prop_assert!((value - f.boundary_value(theta)).norm() < 1e-10);
    }

    #[test]
    fn preimages_solve_the_equation(f in product(10, 0.95), b in disk_point(0.9)) {
        let pre = f.preimages(b).unwrap();
        prop_assert_eq!(pre.len(), f.degree());
        for p in pre {
            prop_assert!((f.evaluate(p) - b.value()).norm() < 1e-8);
        }
    }

    #[test]
    fn pre_and_post_composition(f in product(8, 0.9), a in disk_point(0.9), z in disk_point(0.9), t in -3.0..3.0f64) {
        let m = Mobius::new(a, t);
        let g = f.pre_compose(&m).unwrap();
        prop_assert!((g.evaluate(z) - f.evaluate(m.apply(z).unwrap())).norm() < 1e-9);
        let h = f.post_compose(&m).unwrap();
        prop_assert!((h.evaluate(z) - m.apply_complex(f.evaluate(z))).norm() < 1e-9);
    }

    #[test]
    fn derivative_matches_difference_quotient(f in product(10, 0.9), z in disk_point(0.8)) {
        let h = 1e-6;
        let dz = Complex64::new(h, 0.0);
        let numeric = (naive_evaluate(&f, z.value() + dz) - naive_evaluate(&f, z.value() - dz)) / (2.0 * h);
        let exact = f.derivative(z);
        prop_assert!((numeric - exact).norm() <= 1e-5 * exact.norm().max(1.0));
    }
}

/// Degree-`d` products have `d - 1` critical points in the disk and `F'`
/// vanishes at each of them.
#[test]
fn critical_points_of_random_products() {
    let mut r = rng(1);
    for _ in 0..200 {
        let d = rand::Rng::gen_range(&mut r, 2..=50);
        let f = random_product(&mut r, d, 0.999);
        let crit = f.critical_points().unwrap();
        assert_eq!(crit.len(), d - 1);
        for c in &crit.points {
            // relative to the size of F' along the circle through c
            let scale = (0..16)
                .map(|k| f.derivative(DiskPoint::from_polar(c.abs(), TAU * k as f64 / 16.0).unwrap()).norm())
                .fold(0.0, f64::max);
            assert!(f.derivative(*c).norm() <= 1e-6 * scale.max(1.0), "{:?}", c);
        }
    }
}

#[test]
fn critical_points_of_exponential_sequences() {
    for n in [10, 20, 30] {
        let zeros: Vec<Complex64> = (1..=n).map(|k| Complex64::new(1.0 - (-(k as f64)).exp2(), 0.0)).collect();
        let f = BlaschkeProduct::from_complex(&zeros, 0.0).unwrap();
        let crit = f.critical_points().unwrap();
        assert_eq!(crit.len(), n - 1);
        // real zeros interlace real critical points
        for c in &crit.points {
            assert!(c.value().im.abs() < 1e-9 && c.value().re > 0.0);
        }
    }
}

#[test]
fn power_has_critical_point_at_origin() {
    let f = BlaschkeProduct::power(4).unwrap();
    let crit = f.critical_points().unwrap();
    assert_eq!(crit.len(), 3);
    assert!(crit.points.iter().all(|c| c.abs() < 1e-6));
}

#[test]
fn phase_speed_integrates_to_full_turns() {
    let mut r = rng(7);
    for d in [1, 3, 10, 25] {
        let f = random_product(&mut r, d, 0.9);
        let n = 4096;
        let integral = (0..n).map(|k| f.boundary_phase_speed(TAU * k as f64 / n as f64)).sum::<f64>() * TAU / n as f64;
        assert!((integral - TAU * d as f64).abs() < 1e-9 * d as f64, "{integral}");
        let winding = f.boundary_phase(TAU) - f.boundary_phase(0.0);
        assert!((winding - TAU * d as f64).abs() < 1e-9 * d as f64);
    }
}

#[test]
fn one_minus_abs_sq_near_the_boundary() {
    let f = BlaschkeProduct::from_complex(&[Complex64::new(0.5, 0.0)], 0.0).unwrap();
    let z = DiskPoint::from_re_im(1.0 - 1e-10, 0.0).unwrap();
    // exact: (1 - |z|²)(1 - |a|²)/|1 - a z|²
    let gap = z.one_minus_abs_sq();
    let expected = gap * 0.75 / (1.0f64 - 0.5 * (1.0 - 1e-10)).powi(2);
    assert!((f.one_minus_abs_sq(z) - expected).abs() <= 1e-6 * expected);
    assert!(DiskPoint::from_re_im(1.0 - DISK_MARGIN / 2.0, 0.0).is_err());
}
