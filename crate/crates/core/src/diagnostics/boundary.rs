//! Behaviour of `F` along geodesic rays and in Stolz-type regions.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::image::{refine_until_stable, ImagePoint, QuadratureSpec};
use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::geometry::{geodesic_point, BoundaryPoint, DiskPoint};
use crate::quadrature::{circle_mean, Rule};

pub const DEFAULT_C_CAP: f64 = 20.0;
pub const S_GRID_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasigeodesicFit {
    pub base: DiskPoint,
    pub endpoint: BoundaryPoint,
    pub s: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub sample_count: usize,
    pub t_max: f64,
}

/// Largest `s` on the grid `{0.01, …, 1}` for which the smallest `C` with
/// `d_h(F(w_i), F(w_j)) ≥ s d_h(w_i, w_j) - C` over all sampled pairs on the
/// ray is at most `c_cap`.
pub fn quasigeodesic_fit(
    f: &BlaschkeProduct,
    z: DiskPoint,
    xi: BoundaryPoint,
    t_max: f64,
    n_samples: usize,
) -> Result<QuasigeodesicFit> {
    quasigeodesic_fit_capped(f, z, xi, t_max, n_samples, DEFAULT_C_CAP)
}

pub fn quasigeodesic_fit_capped(
    f: &BlaschkeProduct,
    z: DiskPoint,
    xi: BoundaryPoint,
    t_max: f64,
    n_samples: usize,
    c_cap: f64,
) -> Result<QuasigeodesicFit> {
    if n_samples < 2 {
        return Err(Error::invalid("quasigeodesic fit needs at least two samples"));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::invalid(format!("t_max must be positive, got {t_max}")));
    }
    let ts: Vec<f64> = (0..n_samples).map(|i| t_max * i as f64 / (n_samples - 1) as f64).collect();
    let images = ts
        .iter()
        .map(|&t| {
            let w = geodesic_point(z, xi, t)?;
            Ok(ImagePoint::of(f, w, w.one_minus_abs_sq()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::with_capacity(n_samples * (n_samples - 1) / 2);
    for i in 0..n_samples {
        for j in i + 1..n_samples {
            pairs.push((ts[j] - ts[i], images[i].distance(&images[j])));
        }
    }
    let c_for = |s: f64| pairs.iter().map(|(dt, di)| s * dt - di).fold(0.0, f64::max);
    let steps = (1.0 / S_GRID_STEP).round() as usize;
    let mut fit = (S_GRID_STEP, c_for(S_GRID_STEP));
    for k in (1..=steps).rev() {
        let s = k as f64 * S_GRID_STEP;
        let c = c_for(s);
        if c <= c_cap {
            fit = (s, c);
            break;
        }
    }
    Ok(QuasigeodesicFit {
        base: z,
        endpoint: xi,
        s: fit.0,
        c: fit.1,
        sample_count: n_samples,
        t_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    /// Least-squares slope of `log(1 - |F(rξ)|)` against `log(1 - r)`.
    pub s: f64,
    /// `(r, 1 - |F(rξ)|)`.
    pub table: Vec<(f64, f64)>,
}

pub fn holder_exponent(f: &BlaschkeProduct, xi: BoundaryPoint, r_ladder: &[f64]) -> Result<HolderEstimate> {
    if r_ladder.len() < 2 {
        return Err(Error::invalid("radius ladder needs at least two rungs"));
    }
    if r_ladder.windows(2).any(|w| !(w[1] > w[0])) || r_ladder[0] < 0.0 {
        return Err(Error::invalid("radius ladder must be increasing and non-negative"));
    }
    let mut table = Vec::with_capacity(r_ladder.len());
    for &r in r_ladder {
        let z = DiskPoint::from_polar(r, xi.angle())?;
        table.push((r, f.one_minus_abs_with_gap(z, (1.0 - r) * (1.0 + r))));
    }
    let xs: Vec<f64> = r_ladder.iter().map(|r| (1.0 - r).ln()).collect();
    let ys: Vec<f64> = table.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(HolderEstimate { s: sxy / sxx, table })
}

/// Resolution for [`hyperbolic_area_function`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaFunctionSpec {
    /// Gauss nodes per panel of the outer (radial) variable.
    pub radial_nodes: usize,
    /// Panels per unit of `log(1/(1 - s))`.
    pub panels_per_unit: usize,
    pub angular: usize,
    pub tolerance: f64,
    pub max_doublings: u32,
}

impl Default for AreaFunctionSpec {
    fn default() -> Self {
        AreaFunctionSpec {
            radial_nodes: 12,
            panels_per_unit: 2,
            angular: 48,
            tolerance: 1e-8,
            max_doublings: 5,
        }
    }
}

/// `∫ D_hF(z)² (1 - |z|²)^{-2} dA(z)` over `{|z| ≤ r, |z - e^{iθ}| ≤ ρ(1 - |z|)}`.
///
/// In polar coordinates `z = s e^{i(θ+φ)}` the region is
/// `cos φ ≥ (s² + 1 - ρ²(1-s)²) / (2s)`: whole circles for `s ≤ (ρ-1)/(ρ+1)`
/// and a shrinking wedge beyond. The outer variable is `τ = log(1/(1-s))`,
/// with `τ = τ* + u²` past the transition to absorb its square-root edge.
pub fn hyperbolic_area_function(f: &BlaschkeProduct, theta: f64, r: f64, aperture: f64, spec: &AreaFunctionSpec) -> Result<f64> {
    if !(aperture > 1.0 && aperture.is_finite()) {
        return Err(Error::invalid(format!("aperture must exceed 1, got {aperture}")));
    }
    DiskPoint::from_re_im(r, 0.0)?;
    if r < 0.0 {
        return Err(Error::invalid("radius must be non-negative"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let s_star = (aperture - 1.0) / (aperture + 1.0);
    let tau_r = -(-r).ln_1p();
    let tau_star = -(-s_star.min(r)).ln_1p();
    let quad = QuadratureSpec {
        radial: spec.radial_nodes,
        angular: spec.angular,
        tolerance: spec.tolerance,
        max_doublings: spec.max_doublings,
    };
    let density = |s: f64, phi: f64| -> f64 {
        let z = DiskPoint::assume(Complex64::from_polar(s, theta + phi));
        let dh = f.hyperbolic_derivative(z);
        let gap = (1.0 - s) * (1.0 + s);
        dh * dh / (gap * gap)
    };
    refine_until_stable(&quad, "hyperbolic area function", |scale| {
        let rule = Rule::new(spec.radial_nodes);
        let inner = Rule::new(spec.angular * scale);
        let panels = |len: f64| ((len * (spec.panels_per_unit * scale) as f64).ceil() as usize).max(2 * scale);
        // ds = (1 - s) dτ and dA = s ds dφ
        let full = rule.composite(0.0, tau_star, panels(tau_star), |tau| {
            let s = -(-tau).exp_m1();
            let ring = TAU * circle_mean(spec.angular * scale * 2, |phi| density(s, phi));
            ring * s * (1.0 - s)
        });
        let wedge = if r > s_star {
            let u_max = (tau_r - tau_star).sqrt();
            rule.composite(0.0, u_max, panels(u_max), |u| {
                let tau = tau_star + u * u;
                let s = -(-tau).exp_m1();
                let one_minus = (-tau).exp();
                // cos φ_max = c with 1 - c and 1 + c formed without cancellation
                let above = -(-tau_star).exp() * (-u * u).exp_m1();
                let one_minus_c = (aperture * aperture - 1.0) * one_minus * one_minus / (2.0 * s);
                let one_plus_c = (1.0 + aperture) * above * (1.0 + s + aperture * one_minus) / (2.0 * s);
                let phi_max = 2.0 * one_minus_c.sqrt().atan2(one_plus_c.max(0.0).sqrt());
                let arc = inner.integrate(-phi_max, phi_max, |phi| density(s, phi));
                arc * s * one_minus * 2.0 * u
            })
        } else {
            0.0
        };
        Ok(full + wedge)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity() -> BlaschkeProduct {
        BlaschkeProduct::from_complex(&[Complex64::new(0.0, 0.0)], 0.0).unwrap()
    }

    #[test]
    fn identity_is_a_geodesic() {
        let z = DiskPoint::from_re_im(0.2, -0.4).unwrap();
        let fit = quasigeodesic_fit(&identity(), z, BoundaryPoint::new(1.0), 10.0, 40).unwrap();
        assert_eq!(fit.s, 1.0);
        assert!(fit.c <= 1e-9);
    }

    #[test]
    fn squaring_along_a_radius() {
        let f = BlaschkeProduct::power(2).unwrap();
        for angle in [0.0, 2.0] {
            let fit = quasigeodesic_fit(&f, DiskPoint::origin(), BoundaryPoint::new(angle), 10.0, 60).unwrap();
            assert!(fit.s >= 0.99, "{fit:?}");
            assert!(fit.c < 2.0);
        }
    }

    #[test]
    fn holder_examples() {
        let ladder: Vec<f64> = (1..=8).map(|k| 1.0 - 10f64.powi(-k)).collect();
        let est = holder_exponent(&identity(), BoundaryPoint::new(0.4), &ladder).unwrap();
        assert!((est.s - 1.0).abs() < 1e-9);
        // 1 - r³ = (1 - r)(1 + r + r²): slope 1 up to the slowly varying factor
        let est = holder_exponent(&BlaschkeProduct::power(3).unwrap(), BoundaryPoint::new(0.4), &ladder).unwrap();
        assert!((est.s - 1.0).abs() < 1e-2);
        let f = BlaschkeProduct::from_complex(&[Complex64::new(-0.999, 0.0)], 0.0).unwrap();
        let est = holder_exponent(&f, BoundaryPoint::new(0.0), &ladder).unwrap();
        assert!((est.s - 1.0).abs() < 1e-2);
        assert!(est.table.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(holder_exponent(&f, BoundaryPoint::new(0.0), &[0.5]).is_err());
    }

    /// Independent 1-D form for `D_hF ≡ 1`: `∫ 2 φ_max(s) s / (1 - s²)² ds` by Simpson.
    fn region_area(r: f64, rho: f64) -> f64 {
        let n = 200_000;
        let g = |s: f64| {
            let c = ((s * s + 1.0 - rho * rho * (1.0 - s).powi(2)) / (2.0 * s)).clamp(-1.0, 1.0);
            let phi = if s == 0.0 { std::f64::consts::PI } else { c.acos() };
            2.0 * phi * s / (1.0 - s * s).powi(2)
        };
        let h = r / n as f64;
        let mut acc = g(0.0) + g(r);
        for k in 1..n {
            acc += g(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn area_function_for_identity_matches_region_area() {
        let spec = AreaFunctionSpec::default();
        for (r, rho) in [(0.9, 2.0), (0.5, 1.5), (0.2, 3.0)] {
            let got = hyperbolic_area_function(&identity(), 0.7, r, rho, &spec).unwrap();
            let oracle = region_area(r, rho);
            assert!((got - oracle).abs() / oracle < 1e-4, "{got} vs {oracle}");
        }
        assert_eq!(hyperbolic_area_function(&identity(), 0.0, 0.0, 2.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn area_function_grows_logarithmically() {
        let f = BlaschkeProduct::power(2).unwrap();
        let spec = AreaFunctionSpec::default();
        let rho = 2.0f64;
        let a = hyperbolic_area_function(&f, 0.0, 1.0 - 1e-4, rho, &spec).unwrap();
        let b = hyperbolic_area_function(&f, 0.0, 1.0 - 1e-6, rho, &spec).unwrap();
        let slope = (b - a) / (1e6f64.ln() - 1e4f64.ln());
        let expected = (rho * rho - 1.0).sqrt() / 2.0;
        assert!((slope - expected).abs() / expected < 1e-2, "{slope} vs {expected}");
    }
}
