//! Gauss curvature residual, distortion away from critical points, and the
//! Jensen balance for `log |F'|`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::{BlaschkeProduct, CriticalSet};
use crate::error::{Error, Result};
use crate::geometry::DiskPoint;
use crate::grid::GridPoint;
use crate::quadrature::{circle_mean, Rule};

/// Stencil points must stay this far (hyperbolically) from critical points.
pub const CURVATURE_CRITICAL_CLEARANCE: f64 = 0.1;

/// `u = log(2|F'| / (1 - |F|²))`.
fn conformal_factor(f: &BlaschkeProduct, w: DiskPoint) -> f64 {
    (2.0 * f.derivative(w).norm()).ln() - f.one_minus_abs_sq(w).ln()
}

/// Five-point Laplacian of `u` at `z` minus `e^{2u(z)}`.
pub fn gauss_curvature_residual(f: &BlaschkeProduct, z: DiskPoint, h: f64) -> Result<f64> {
    gauss_curvature_residual_with(f, &f.critical_points()?, z, h)
}

pub fn gauss_curvature_residual_with(f: &BlaschkeProduct, crit: &CriticalSet, z: DiskPoint, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("step must be positive, got {h}")));
    }
    let offsets = [
        Complex64::new(h, 0.0),
        Complex64::new(-h, 0.0),
        Complex64::new(0.0, h),
        Complex64::new(0.0, -h),
    ];
    let mut stencil = Vec::with_capacity(4);
    for o in offsets {
        let w = DiskPoint::new(z.value() + o)
            .map_err(|_| Error::precondition("stencil leaves the disk"))?;
        stencil.push(w);
    }
    for w in std::iter::once(&z).chain(stencil.iter()) {
        if crit.distance_from(*w) <= CURVATURE_CRITICAL_CLEARANCE {
            return Err(Error::precondition("stencil touches a critical-point neighborhood"));
        }
    }
    let u0 = conformal_factor(f, z);
    let sum: f64 = stencil.iter().map(|w| conformal_factor(f, *w)).sum();
    let laplacian = (sum - 4.0 * u0) / (h * h);
    Ok(laplacian - (2.0 * u0).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionEntry {
    pub eps: f64,
    /// Smallest `D_hF` over grid points farther than `ε` from the critical
    /// set; `None` if no grid point qualifies.
    pub delta: Option<f64>,
    pub witness: Option<DiskPoint>,
    pub points: usize,
}

/// For each `ε`, the least hyperbolic derivative over grid points with
/// `|z| ≤ r_max` and `d_h(z, crit F) > ε`.
pub fn distortion_profile(
    f: &BlaschkeProduct,
    crit: &CriticalSet,
    eps_ladder: &[f64],
    grid: &[GridPoint],
    r_max: f64,
) -> Vec<DistortionEntry> {
    let samples: Vec<(DiskPoint, f64, f64)> = grid
        .iter()
        .filter(|g| g.point.abs() <= r_max)
        .map(|g| (g.point, f.hyperbolic_derivative(g.point), crit.distance_from(g.point)))
        .collect();
    eps_ladder
        .iter()
        .map(|&eps| {
            let mut entry = DistortionEntry { eps, delta: None, witness: None, points: 0 };
            for &(z, dh, dist) in &samples {
                if dist > eps {
                    entry.points += 1;
                    if entry.delta.is_none_or(|d| dh < d) {
                        entry.delta = Some(dh);
                        entry.witness = Some(z);
                    }
                }
            }
            entry
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenBalance {
    pub r: f64,
    /// `(1/2π) ∫ log |F'(re^{iθ})| dθ`.
    pub circle_mean: f64,
    pub log_derivative_at_origin: f64,
    /// `Σ_{|c|<r} log(r/|c|)`.
    pub critical_sum: f64,
    /// `circle_mean - log|F'(0)| - critical_sum`, zero by Jensen's formula.
    pub jensen_gap: f64,
    /// `Σ_{|c|<r} log(1/|c|)`.
    pub bound_lhs: f64,
    /// `(1/2π) ∫_{|z|<r} (1 - D_h²F) dA/(1 - |z|) + log(1/|F'(0)|)`.
    pub bound_rhs: f64,
    /// `bound_lhs - bound_rhs`, the additive constant the bound needs here.
    pub bound_gap: f64,
}

/// Jensen's formula for `log|F'|` on `|z| = r` and both sides of the
/// area bound for `Σ log(1/|c|)` over critical points in `|z| < r`.
pub fn jensen_balance(f: &BlaschkeProduct, r: f64, n_nodes: usize) -> Result<JensenBalance> {
    jensen_balance_with(f, &f.critical_points()?, r, n_nodes)
}

pub fn jensen_balance_with(f: &BlaschkeProduct, crit: &CriticalSet, r: f64, n_nodes: usize) -> Result<JensenBalance> {
    DiskPoint::from_re_im(r, 0.0)?;
    if !(r > 0.0) || n_nodes == 0 {
        return Err(Error::invalid("need r > 0 and at least one node"));
    }
    let d0 = f.derivative(DiskPoint::origin()).norm();
    if !(d0 > 0.0) {
        return Err(Error::precondition("F'(0) = 0"));
    }
    if crit.points.iter().any(|c| (c.abs() - r).abs() <= 1e-6) {
        return Err(Error::precondition("r is within 1e-6 of a critical modulus"));
    }
    let mean = circle_mean(n_nodes, |t| {
        f.derivative_complex(Complex64::from_polar(r, t)).norm().ln()
    });
    let inside: Vec<f64> = crit.points.iter().map(|c| c.abs()).filter(|&m| m < r).collect();
    let critical_sum: f64 = inside.iter().map(|m| (r / m).ln()).sum();
    let log0 = d0.ln();

    let bound_lhs: f64 = inside.iter().map(|m| -m.ln()).sum();
    let rule = Rule::new(16);
    let angular = n_nodes.clamp(64, 1024);
    let area = rule.composite(0.0, r, 32, |s| {
        let ring = TAU * circle_mean(angular, |t| {
            let dh = f.hyperbolic_derivative(DiskPoint::assume(Complex64::from_polar(s, t)));
            1.0 - dh * dh
        });
        ring * s / (1.0 - s)
    });
    let bound_rhs = area / TAU - log0;
    Ok(JensenBalance {
        r,
        circle_mean: mean,
        log_derivative_at_origin: log0,
        critical_sum,
        jensen_gap: mean - log0 - critical_sum,
        bound_lhs,
        bound_rhs,
        bound_gap: bound_lhs - bound_rhs,
    })
}
