#![allow(dead_code)]

use bc_core::{BlaschkeProduct, DiskPoint};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Area-uniform point of the disk `|z| < r_max`.
pub fn random_point(rng: &mut ChaCha8Rng, r_max: f64) -> DiskPoint {
    let r = rng.gen::<f64>().sqrt() * r_max;
    DiskPoint::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU).unwrap()
}

pub fn random_product(rng: &mut ChaCha8Rng, degree: usize, r_max: f64) -> BlaschkeProduct {
    let zeros = (0..degree).map(|_| random_point(rng, r_max)).collect();
    BlaschkeProduct::new(zeros, rng.gen::<f64>() * std::f64::consts::TAU).unwrap()
}

pub fn point(re: f64, im: f64) -> DiskPoint {
    DiskPoint::from_re_im(re, im).unwrap()
}

pub fn disk_point(r_max: f64) -> impl Strategy<Value = DiskPoint> {
    (0.0..r_max, -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(r, t)| DiskPoint::from_polar(r, t).unwrap())
}

pub fn product(max_degree: usize, r_max: f64) -> impl Strategy<Value = BlaschkeProduct> {
    (prop::collection::vec(disk_point(r_max), 1..=max_degree), 0.0..std::f64::consts::TAU)
        .prop_map(|(zeros, angle)| BlaschkeProduct::new(zeros, angle).unwrap())
}

/// `∏ (z - a)/(1 - ā z)` straight from the definition.
pub fn naive_evaluate(f: &BlaschkeProduct, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    f.zeros()
        .iter()
        .fold(Complex64::from_polar(1.0, f.prefactor_angle()), |acc, a| {
            let a = a.value();
            acc * (z - a) / (one - a.conj() * z)
        })
}
