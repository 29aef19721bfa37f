//! Hyperbolic geometry of the unit disk.
//!
//! The metric is `2|dz| / (1 - |z|^2)` (curvature -1), so that
//! `d_h(0, r) = log((1 + r) / (1 - r))`. Every radius handed around in this
//! crate uses that normalization.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points closer than this to the unit circle are rejected.
pub const DISK_MARGIN: f64 = 1e-12;

/// A point of the open unit disk, kept at least [`DISK_MARGIN`] away from the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(value: Complex64) -> Result<Self> {
        let r = value.norm();
        if !r.is_finite() || r >= 1.0 - DISK_MARGIN {
            return Err(Error::OutsideDisk {
                re: value.re,
                im: value.im,
                margin: DISK_MARGIN,
            });
        }
        Ok(DiskPoint(value))
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn from_polar(radius: f64, angle: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(radius, angle))
    }

    pub fn origin() -> Self {
        DiskPoint(Complex64::new(0.0, 0.0))
    }

    /// Wraps a value that is inside the disk by construction (Möbius images,
    /// interior quadrature nodes). Only the open-disk condition is asserted.
    pub(crate) fn assume(value: Complex64) -> Self {
        debug_assert!(value.norm() < 1.0, "assumed disk point {value} outside disk");
        DiskPoint(value)
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.0.norm()
    }

    /// Argument in `[0, 2π)`; the origin reports 0.
    pub fn angle(self) -> f64 {
        normalize_angle(self.0.arg())
    }

    /// `1 - |z|^2`, computed as `(1 - |z|)(1 + |z|)` to keep relative accuracy near the circle.
    #[inline]
    pub fn one_minus_abs_sq(self) -> f64 {
        let r = self.abs();
        (1.0 - r) * (1.0 + r)
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.0
    }
}

impl TryFrom<Complex64> for DiskPoint {
    type Error = Error;

    fn try_from(value: Complex64) -> Result<Self> {
        DiskPoint::new(value)
    }
}

/// A point of the unit circle, stored as an angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    angle: f64,
}

impl BoundaryPoint {
    pub fn new(angle: f64) -> Self {
        BoundaryPoint {
            angle: normalize_angle(angle),
        }
    }

    pub fn angle(self) -> f64 {
        self.angle
    }

    pub fn value(self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Disk automorphism `z ↦ e^{iθ} (z - a) / (1 - ā z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub pole: DiskPoint,
    pub angle: f64,
}

impl Mobius {
    pub fn new(pole: DiskPoint, angle: f64) -> Self {
        Mobius { pole, angle }
    }

    /// `m_{a→0}`: the automorphism sending `a` to the origin with no rotation.
    pub fn to_origin(a: DiskPoint) -> Self {
        Mobius::new(a, 0.0)
    }

    pub fn identity() -> Self {
        Mobius::new(DiskPoint::origin(), 0.0)
    }

    pub fn rotation(angle: f64) -> Self {
        Mobius::new(DiskPoint::origin(), angle)
    }

    /// Applies the map to an arbitrary complex number (circle points included).
    #[inline]
    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        let a = self.pole.value();
        Complex64::from_polar(1.0, self.angle) * (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
    }

    /// Applies the map to a disk point. Images that round onto the
    /// admission margin are rejected as a loss of precision.
    pub fn apply(&self, z: DiskPoint) -> Result<DiskPoint> {
        DiskPoint::new(self.apply_complex(z.value()))
    }

    pub fn inverse(&self) -> Mobius {
        let rot = Complex64::from_polar(1.0, self.angle);
        Mobius::new(DiskPoint::assume(-self.pole.value() * rot), -self.angle)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Mobius) -> Mobius {
        // the composite sends inner⁻¹(self.pole) to 0
        let pole = inner.inverse().apply_complex(self.pole.value());
        let b = pole;
        let z0 = if b.norm() > 0.5 {
            Complex64::new(0.0, 0.0)
        } else if b.norm() > 0.0 {
            -b / b.norm() * 0.75
        } else {
            Complex64::new(0.5, 0.0)
        };
        let target = self.apply_complex(inner.apply_complex(z0));
        let bare = (z0 - b) / (Complex64::new(1.0, 0.0) - b.conj() * z0);
        Mobius::new(DiskPoint::assume(pole), (target / bare).arg())
    }

    /// Modulus of the derivative at `z`: `(1 - |a|^2) / |1 - ā z|^2`.
    pub fn derivative_abs(&self, z: Complex64) -> f64 {
        let a = self.pole.value();
        self.pole.one_minus_abs_sq() / (Complex64::new(1.0, 0.0) - a.conj() * z).norm_sqr()
    }
}

/// `ρ(z, w) = |z - w| / |1 - z̄ w|`.
pub fn pseudo_hyperbolic_distance(z: DiskPoint, w: DiskPoint) -> f64 {
    pseudo_hyperbolic_complex(z.value(), w.value())
}

#[inline]
pub(crate) fn pseudo_hyperbolic_complex(z: Complex64, w: Complex64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
    if den == 0.0 {
        return 1.0;
    }
    ((z - w).norm() / den).min(1.0)
}

/// `1 - ρ(z, w)^2 = (1 - |z|^2)(1 - |w|^2) / |1 - w̄ z|^2`, free of cancellation.
pub fn one_minus_rho_sq(z: DiskPoint, w: DiskPoint) -> f64 {
    let den = reflected_den(z.value(), w.value(), w.one_minus_abs_sq());
    z.one_minus_abs_sq() * w.one_minus_abs_sq() / den.norm_sqr()
}

/// `1 - w̄ z` as `(1 - |w|²) - w̄ (z - w)`; no cancellation in the closed disk.
#[inline]
pub fn reflected_den(z: Complex64, w: Complex64, w_gap: f64) -> Complex64 {
    w_gap - w.conj() * (z - w)
}

pub fn hyperbolic_distance(z: DiskPoint, w: DiskPoint) -> f64 {
    hyperbolic_distance_parts(z.value(), z.one_minus_abs_sq(), w.value(), w.one_minus_abs_sq())
}

/// Hyperbolic distance between `p` and `q` given accurate values of
/// `1 - |p|²` and `1 - |q|²` (for points computed as images, whose gap to
/// the circle is known better than their modulus).
pub fn hyperbolic_distance_parts(p: Complex64, p_gap: f64, q: Complex64, q_gap: f64) -> f64 {
    let den = reflected_den(p, q, q_gap);
    let den_sq = den.norm_sqr();
    if den_sq == 0.0 {
        return if p == q { 0.0 } else { f64::INFINITY };
    }
    let rho = ((p - q).norm() / den_sq.sqrt()).min(1.0);
    if rho < 0.5 {
        2.0 * rho.atanh()
    } else {
        // log((1+ρ)/(1-ρ)) = 2 log(1+ρ) - log(1-ρ²)
        2.0 * rho.ln_1p() - (p_gap * q_gap / den_sq).ln()
    }
}

/// Hyperbolic distance as a function of the pseudohyperbolic distance.
#[inline]
pub fn rho_to_distance(rho: f64) -> f64 {
    2.0 * rho.atanh()
}

/// Inverse of [`rho_to_distance`]: the pseudohyperbolic radius of a hyperbolic ball.
#[inline]
pub fn distance_to_rho(distance: f64) -> f64 {
    (0.5 * distance).tanh()
}

/// `B_h(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicBall {
    pub center: DiskPoint,
    pub radius: f64,
}

impl HyperbolicBall {
    pub fn new(center: DiskPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!(
                "hyperbolic radius must be positive and finite, got {radius}"
            )));
        }
        Ok(HyperbolicBall { center, radius })
    }

    /// Euclidean center and radius of the ball.
    pub fn to_euclidean(&self) -> (Complex64, f64) {
        let t = distance_to_rho(self.radius);
        let c = self.center.value();
        let c2 = c.norm_sqr();
        let den = 1.0 - t * t * c2;
        let center = c * ((1.0 - t * t) / den);
        let radius = t * self.center.one_minus_abs_sq() / den;
        (center, radius)
    }

    /// Membership by hyperbolic distance.
    pub fn contains(&self, w: DiskPoint) -> bool {
        hyperbolic_distance(self.center, w) < self.radius
    }

    /// The automorphism taking the origin-centred ball of the same radius onto this one.
    pub fn from_origin(&self) -> Mobius {
        Mobius::to_origin(self.center).inverse()
    }

    /// Point of the boundary circle at parameter `phi`, i.e. the image of
    /// `tanh(R/2) e^{iφ}` under [`Self::from_origin`].
    pub fn boundary_point(&self, phi: f64) -> Complex64 {
        let t = distance_to_rho(self.radius);
        self.from_origin()
            .apply_complex(Complex64::from_polar(t, phi))
    }
}

pub fn ball_to_euclidean(ball: &HyperbolicBall) -> (Complex64, f64) {
    ball.to_euclidean()
}

/// Point at hyperbolic distance `t` from `z` on the geodesic ray `[z, ξ)`.
///
/// The ray is straightened by `m_{z→0}`, walked radially, and mapped back.
pub fn geodesic_point(z: DiskPoint, xi: BoundaryPoint, t: f64) -> Result<DiskPoint> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!(
            "geodesic parameter must be finite and non-negative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(z);
    }
    let m = Mobius::to_origin(z);
    let dir = m.apply_complex(xi.value());
    let dir = dir / dir.norm();
    m.inverse().apply(DiskPoint::assume(dir * distance_to_rho(t)))
}
