//! Finite Blaschke products `F(z) = e^{iθ} ∏ (z - a_n) / (1 - ā_n z)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pseudo_hyperbolic_complex, DiskPoint, Mobius};
use crate::roots::{aberth, circle_guesses, newton_polish, AberthOptions};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Below this pseudohyperbolic distance to a zero, `F'` is computed by the
/// product rule instead of `F · F'/F`.
pub const PRODUCT_RULE_RADIUS: f64 = 1e-6;

/// `log_derivative_sum` refuses points this close (pseudohyperbolically) to a zero.
pub const LOG_DERIVATIVE_SINGULAR_RADIUS: f64 = 1e-9;

/// Critical points closer than this (pseudohyperbolic) are one point with multiplicity.
pub const CRITICAL_CLUSTER_RADIUS: f64 = 1e-7;

/// Accepted `|F'(c)|` relative to the maximum of `|F'|` on a small circle around `c`.
pub const CRITICAL_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    zeros: Vec<DiskPoint>,
    prefactor_angle: f64,
}

/// The critical points of a product, repeated according to multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub points: Vec<DiskPoint>,
}

impl CriticalSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Hyperbolic distance from `z` to the nearest critical point (`+∞` if none).
    pub fn distance_from(&self, z: DiskPoint) -> f64 {
        self.points
            .iter()
            .map(|c| crate::geometry::hyperbolic_distance(z, *c))
            .fold(f64::INFINITY, f64::min)
    }
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<DiskPoint>, prefactor_angle: f64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::invalid("a Blaschke product needs at least one zero"));
        }
        if !prefactor_angle.is_finite() {
            return Err(Error::invalid("prefactor angle must be finite"));
        }
        Ok(BlaschkeProduct {
            zeros,
            prefactor_angle,
        })
    }

    pub fn from_complex(zeros: &[Complex64], prefactor_angle: f64) -> Result<Self> {
        let zeros = zeros
            .iter()
            .map(|z| DiskPoint::new(*z))
            .collect::<Result<Vec<_>>>()?;
        Self::new(zeros, prefactor_angle)
    }

    /// `z^d`.
    pub fn power(d: usize) -> Result<Self> {
        Self::new(vec![DiskPoint::origin(); d], 0.0)
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn zeros(&self) -> &[DiskPoint] {
        &self.zeros
    }

    pub fn prefactor_angle(&self) -> f64 {
        self.prefactor_angle
    }

    fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.prefactor_angle)
    }

    #[inline]
    fn factor(a: DiskPoint, z: Complex64) -> Complex64 {
        (z - a.value()) / reflected(a, z)
    }

    /// `F(z)`.
    pub fn evaluate(&self, z: DiskPoint) -> Complex64 {
        self.evaluate_complex(z.value())
    }

    /// `F` at any complex number off the reflected zeros (circle points included).
    pub fn evaluate_complex(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(self.rotation(), |acc, a| acc * Self::factor(*a, z))
    }

    /// `F(e^{iθ})`.
    pub fn boundary_value(&self, theta: f64) -> Complex64 {
        self.evaluate_complex(Complex64::from_polar(1.0, theta))
    }

    /// `F'/F = Σ (1 - |a_n|²) / ((z - a_n)(1 - ā_n z))`.
    fn log_derivative(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .map(|a| {
                a.one_minus_abs_sq() / ((z - a.value()) * reflected(*a, z))
            })
            .sum()
    }

    /// Product rule with prefix/suffix products; finite at the zeros.
    fn derivative_product_rule(&self, z: Complex64) -> Complex64 {
        let factors: Vec<Complex64> = self.zeros.iter().map(|a| Self::factor(*a, z)).collect();
        let n = factors.len();
        let mut suffix = vec![ONE; n + 1];
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1] * factors[k];
        }
        let mut prefix = ONE;
        let mut total = Complex64::new(0.0, 0.0);
        for (k, a) in self.zeros.iter().enumerate() {
            let d = a.one_minus_abs_sq() / reflected(*a, z).powi(2);
            total += prefix * d * suffix[k + 1];
            prefix *= factors[k];
        }
        self.rotation() * total
    }

    /// Smallest pseudohyperbolic distance from `z` to a zero.
    pub fn nearest_zero_rho(&self, z: Complex64) -> f64 {
        self.zeros
            .iter()
            .map(|a| pseudo_hyperbolic_complex(z, a.value()))
            .fold(f64::INFINITY, f64::min)
    }

    /// `F'(z)`.
    pub fn derivative(&self, z: DiskPoint) -> Complex64 {
        self.derivative_complex(z.value())
    }

    pub(crate) fn derivative_complex(&self, z: Complex64) -> Complex64 {
        if z.norm() < 1.0 && self.nearest_zero_rho(z) < PRODUCT_RULE_RADIUS {
            self.derivative_product_rule(z)
        } else {
            let f = self.evaluate_complex(z);
            if f.norm() == 0.0 || !f.re.is_finite() {
                self.derivative_product_rule(z)
            } else {
                f * self.log_derivative(z)
            }
        }
    }

    /// `1 - |F(z)|²` without cancellation: each factor contributes
    /// `s_n = 1 - ρ(z, a_n)²` exactly, and `1 - ∏(1 - s_n) = -expm1(Σ log1p(-s_n))`.
    pub fn one_minus_abs_sq(&self, z: DiskPoint) -> f64 {
        self.one_minus_abs_sq_with_gap(z, z.one_minus_abs_sq())
    }

    /// [`Self::one_minus_abs_sq`] when `1 - |z|²` is known more accurately than
    /// `|z|` itself (dyadic centers, points built from a Möbius map).
    pub fn one_minus_abs_sq_with_gap(&self, z: DiskPoint, z_gap: f64) -> f64 {
        let lz = z_gap;
        let zc = z.value();
        let log_prod: f64 = self
            .zeros
            .iter()
            .map(|a| {
                let s = lz * a.one_minus_abs_sq() / reflected(*a, zc).norm_sqr();
                (-s.min(1.0)).ln_1p()
            })
            .sum();
        -log_prod.exp_m1()
    }

    /// `1 - |F(z)|`.
    pub fn one_minus_abs(&self, z: DiskPoint) -> f64 {
        one_minus_abs_from_sq(self.one_minus_abs_sq(z))
    }

    pub fn one_minus_abs_with_gap(&self, z: DiskPoint, z_gap: f64) -> f64 {
        one_minus_abs_from_sq(self.one_minus_abs_sq_with_gap(z, z_gap))
    }

    /// `D_h F(z) = (1 - |z|²) |F'(z)| / (1 - |F(z)|²)`.
    pub fn hyperbolic_derivative(&self, z: DiskPoint) -> f64 {
        let den = self.one_minus_abs_sq(z);
        if den <= 0.0 {
            return 1.0;
        }
        z.one_minus_abs_sq() * self.derivative(z).norm() / den
    }

    /// `Σ (1 - |z|²)(1 - |a_n|²) / |1 - ā_n z|²`, the zero-sum comparison for `1 - |F(z)|²`.
    pub fn zero_sum_surrogate(&self, z: DiskPoint) -> f64 {
        let lz = z.one_minus_abs_sq();
        self.zeros
            .iter()
            .map(|a| lz * a.one_minus_abs_sq() / reflected(*a, z.value()).norm_sqr())
            .sum()
    }

    /// `Σ (1-|z|²)(1-|a_n|²) / (|1 - ā_n z|² · (a_n - z)/(1 - a_n z̄))`, whose
    /// modulus is `(1 - |z|²)|F'(z)| / |F(z)|`.
    pub fn log_derivative_sum(&self, z: DiskPoint) -> Result<Complex64> {
        let rho = self.nearest_zero_rho(z.value());
        if rho < LOG_DERIVATIVE_SINGULAR_RADIUS {
            return Err(Error::Singular(format!(
                "point is within pseudohyperbolic distance {rho:e} of a zero"
            )));
        }
        let zc = z.value();
        let lz = z.one_minus_abs_sq();
        Ok(self
            .zeros
            .iter()
            .map(|a| {
                let av = a.value();
                let den = reflected(*a, zc);
                let rot = (av - zc) / den.conj();
                lz * a.one_minus_abs_sq() / (den.norm_sqr() * rot)
            })
            .sum())
    }

    /// `d/dθ arg F(e^{iθ}) = Σ (1 - |a_n|²) / |e^{iθ} - a_n|²`.
    pub fn boundary_phase_speed(&self, theta: f64) -> f64 {
        let xi = Complex64::from_polar(1.0, theta);
        self.zeros
            .iter()
            .map(|a| a.one_minus_abs_sq() / (xi - a.value()).norm_sqr())
            .sum()
    }

    /// Continuous branch of `arg F(e^{iθ})`, increasing by `2π d` over a turn.
    ///
    /// Each factor contributes `θ + 2 arg(1 - a e^{-iθ})` with the inner
    /// argument confined to `(-π/2, π/2)`, so no unwrapping is needed.
    pub fn boundary_phase(&self, theta: f64) -> f64 {
        let inv = Complex64::from_polar(1.0, -theta);
        let d = self.degree() as f64;
        self.prefactor_angle
            + d * theta
            + 2.0
                * self
                    .zeros
                    .iter()
                    .map(|a| (ONE - a.value() * inv).arg())
                    .sum::<f64>()
    }

    /// Solutions of `F(z) = b` in the disk, with multiplicity.
    pub fn preimages(&self, b: DiskPoint) -> Result<Vec<DiskPoint>> {
        let bv = b.value();
        let d = self.degree();
        // p(z) = ∏(1 - ā z) (F(z) - b), a degree-d polynomial with all roots inside
        let quotient = |z: Complex64| {
            let g = self.evaluate_complex(z) - bv;
            let dlog: Complex64 = self
                .zeros
                .iter()
                .map(|a| -a.value().conj() / reflected(*a, z))
                .sum();
            g / (dlog * g + self.derivative_complex(z))
        };
        let mut roots = circle_guesses(d, 0.5);
        aberth(quotient, &mut roots, &AberthOptions::default())?;
        roots
            .into_iter()
            .map(|z| {
                let z = newton_polish(quotient, z, 8);
                DiskPoint::new(z).map_err(|_| {
                    Error::numerical(format!("preimage {z} of {bv} fell outside the disk"))
                })
            })
            .collect()
    }

    /// Prefactor angle making `zeros` reproduce `target` at a well-conditioned point.
    fn angle_matching(zeros: &[DiskPoint], target: impl Fn(Complex64) -> Complex64) -> f64 {
        let candidates = std::iter::once(Complex64::new(0.0, 0.0))
            .chain((0..8).map(|k| Complex64::from_polar(0.5, TAU * k as f64 / 8.0)));
        let z0 = candidates
            .map(|c| {
                let rho = zeros
                    .iter()
                    .map(|a| pseudo_hyperbolic_complex(c, a.value()))
                    .fold(f64::INFINITY, f64::min);
                (c, rho)
            })
            .fold((Complex64::new(0.0, 0.0), -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0;
        let bare = zeros
            .iter()
            .fold(ONE, |acc, a| acc * Self::factor(*a, z0));
        (target(z0) / bare).arg()
    }

    /// `F ∘ m`.
    pub fn pre_compose(&self, m: &Mobius) -> Result<Self> {
        let inv = m.inverse();
        let zeros = self
            .zeros
            .iter()
            .map(|a| inv.apply(*a))
            .collect::<Result<Vec<_>>>()?;
        let angle = Self::angle_matching(&zeros, |z| self.evaluate_complex(m.apply_complex(z)));
        Self::new(zeros, angle)
    }

    /// `τ ∘ F`.
    pub fn post_compose(&self, tau: &Mobius) -> Result<Self> {
        let zeros = self.preimages(tau.pole)?;
        let angle = Self::angle_matching(&zeros, |z| tau.apply_complex(self.evaluate_complex(z)));
        Self::new(zeros, angle)
    }

    /// Critical points in the disk (`d - 1` of them, with multiplicity).
    ///
    /// The roots of `F'` are the interior roots of the degree `2d-2`
    /// numerator `Σ (1-|a_n|²) ∏_{m≠n} (z - a_m)(1 - ā_m z)`; the exterior
    /// ones are their reflections `1/c̄`. The numerator is handled in
    /// partial-fraction form after moving a non-critical base point to the
    /// origin, which keeps its degree exactly `2d - 2`.
    pub fn critical_points(&self) -> Result<CriticalSet> {
        let d = self.degree();
        if d == 1 {
            return Ok(CriticalSet { points: vec![] });
        }
        let base = self.base_point();
        let m = Mobius::to_origin(base);
        let moved: Vec<(Complex64, f64)> = self
            .zeros
            .iter()
            .map(|a| (m.apply_complex(a.value()), a.one_minus_abs_sq()))
            .collect();
        // the moved zeros have 1 - |m(a)|² = 1 - ρ(a, base)²
        let moved: Vec<(Complex64, f64)> = moved
            .into_iter()
            .zip(self.zeros.iter())
            .map(|((b, _), a)| (b, crate::geometry::one_minus_rho_sq(*a, base)))
            .collect();

        let quotient = |z: Complex64| numerator_newton_quotient(&moved, z);
        let mut roots = circle_guesses(2 * d - 2, 1.0);
        aberth(quotient, &mut roots, &AberthOptions::default())?;
        roots.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
        roots.truncate(d - 1);
        if let Some(bad) = roots.iter().find(|z| z.norm() >= 1.0) {
            return Err(Error::numerical(format!(
                "critical point extraction produced {bad} outside the disk"
            )));
        }
        let inv = m.inverse();
        let original: Vec<(Complex64, f64)> = self
            .zeros
            .iter()
            .map(|a| (a.value(), a.one_minus_abs_sq()))
            .collect();
        // the map back loses digits in 1 - |c| near the circle: polish again in place
        let direct = |z: Complex64| numerator_newton_quotient(&original, z);
        let mut points: Vec<Complex64> = roots
            .into_iter()
            .map(|z| {
                let c = inv.apply_complex(newton_polish(quotient, z, 12));
                let polished = newton_polish(direct, c, 12);
                if polished.norm() < 1.0 && pseudo_hyperbolic_complex(polished, c) < 1e-3 {
                    polished
                } else {
                    c
                }
            })
            .collect();
        merge_clusters(&mut points);

        let mut out = Vec::with_capacity(points.len());
        for c in points {
            let cp = DiskPoint::new(c).map_err(|_| {
                Error::numerical(format!("critical point {c} lost to the boundary margin"))
            })?;
            let residual = self.derivative(cp).norm();
            let scale = self.local_derivative_scale(cp);
            // very close to the circle `c` itself is only known to an ulp, so
            // a Newton correction at that level also counts as converged
            let step = numerator_newton_quotient(&original, c).norm();
            let at_floor = step <= 64.0 * f64::EPSILON;
            if !(residual <= CRITICAL_RESIDUAL_TOL * scale || at_floor) {
                return Err(Error::numerical(format!(
                    "critical point {c} has residual |F'| = {residual:e} against local scale {scale:e}"
                )));
            }
            out.push(cp);
        }
        Ok(CriticalSet { points: out })
    }

    /// Maximum of `|F'|` on a small circle around `c` (radius `(1 - |c|) / 10`).
    fn local_derivative_scale(&self, c: DiskPoint) -> f64 {
        let r = 0.1 * (1.0 - c.abs());
        (0..8)
            .map(|k| {
                let w = c.value() + Complex64::from_polar(r, TAU * k as f64 / 8.0);
                self.derivative_complex(w).norm()
            })
            .fold(0.0, f64::max)
    }

    /// A point where `D_h F` is largest among a fixed probe set.
    fn base_point(&self) -> DiskPoint {
        let mut probes = vec![DiskPoint::origin()];
        for (r, n) in [(0.3, 12), (0.6, 16)] {
            for k in 0..n {
                probes.push(DiskPoint::assume(Complex64::from_polar(
                    r,
                    TAU * (k as f64 + 0.37) / n as f64,
                )));
            }
        }
        probes
            .into_iter()
            .map(|p| (p, self.hyperbolic_derivative(p)))
            .fold((DiskPoint::origin(), -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0
    }
}

/// `1 - t` from `1 - t²` for `t ∈ [0, 1]`.
fn one_minus_abs_from_sq(g: f64) -> f64 {
    g / (1.0 + (1.0 - g).max(0.0).sqrt())
}

/// `1 - ā z` written as `(1 - |a|²) - ā (z - a)`, which is free of
/// cancellation for `|z| ≤ 1` since then `|z - a| ≤ |1 - ā z|`.
#[inline]
fn reflected(a: DiskPoint, z: Complex64) -> Complex64 {
    a.one_minus_abs_sq() - a.value().conj() * (z - a.value())
}

/// Newton quotient `N/N'` for `N = S · D` with
/// `S = Σ w_n / ((z - b_n)(1 - b̄_n z))` and `D = ∏ (z - b_m)(1 - b̄_m z)`.
fn numerator_newton_quotient(zeros: &[(Complex64, f64)], z: Complex64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    let mut dlog_d = Complex64::new(0.0, 0.0);
    for &(b, w) in zeros {
        let u = z - b;
        let v = w - b.conj() * u;
        let uv = u * v;
        s += w / uv;
        ds -= w * (v - b.conj() * u) / (uv * uv);
        dlog_d += u.inv() - b.conj() / v;
    }
    (ds / s + dlog_d).inv()
}

/// Replaces points within [`CRITICAL_CLUSTER_RADIUS`] of each other by their mean.
fn merge_clusters(points: &mut [Complex64]) {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if pseudo_hyperbolic_complex(points[i], points[j]) < CRITICAL_CLUSTER_RADIUS {
                let (li, lj) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == lj {
                        *l = li;
                    }
                }
            }
        }
    }
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| label[k] == root).collect();
        if members.len() > 1 {
            let mean = members.iter().map(|&k| points[k]).sum::<Complex64>() / members.len() as f64;
            for k in members {
                points[k] = mean;
            }
        }
    }
}
