//! Statistics of images of hyperbolic balls: diameter, area with and without
//! multiplicity, largest hyperbolic derivative, and covering radius.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::geometry::{distance_to_rho, hyperbolic_distance_parts, DiskPoint, HyperbolicBall, Mobius};
use crate::quadrature::{circle_mean, Rule};

/// Below this Euclidean distance between `q` and the image of the boundary
/// a winding number is refused.
pub const PROXIMITY_THRESHOLD: f64 = 1e-9;

/// Image of `w` with an accurate `1 - |F(w)|²`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ImagePoint {
    pub value: Complex64,
    pub gap: f64,
}

impl ImagePoint {
    pub fn of(f: &BlaschkeProduct, w: DiskPoint, w_gap: f64) -> Self {
        ImagePoint {
            value: f.evaluate(w),
            gap: f.one_minus_abs_sq_with_gap(w, w_gap),
        }
    }

    pub fn distance(&self, other: &ImagePoint) -> f64 {
        hyperbolic_distance_parts(self.value, self.gap, other.value, other.gap)
    }
}

/// Point `m(v)` of the ball `B_h(z, R) = m(B(0, tanh(R/2)))` together with
/// `1 - |m(v)|² = (1 - |v|²)|m'(v)|`.
fn ball_point(m: &Mobius, v: Complex64) -> Result<(DiskPoint, f64)> {
    let w = DiskPoint::new(m.apply_complex(v))?;
    let gap = (1.0 - v.norm_sqr()) * m.derivative_abs(v);
    Ok((w, gap))
}

fn boundary_images(f: &BlaschkeProduct, ball: &HyperbolicBall, n: usize) -> Result<Vec<ImagePoint>> {
    let m = ball.from_origin();
    let t = distance_to_rho(ball.radius);
    (0..n)
        .map(|k| {
            let (w, gap) = ball_point(&m, Complex64::from_polar(t, TAU * k as f64 / n as f64))?;
            Ok(ImagePoint::of(f, w, gap))
        })
        .collect()
}

/// `diam_h F(B_h(z, R))` from `n_boundary` points of the boundary circle.
///
/// For fixed `w₁`, `w ↦ ρ(F(w), F(w₁))` is the modulus of an analytic
/// function, so the diameter is attained with both points on the boundary.
pub fn image_diameter(f: &BlaschkeProduct, z: DiskPoint, radius: f64, n_boundary: usize) -> Result<f64> {
    if n_boundary < 64 {
        return Err(Error::invalid(format!("need at least 64 boundary samples, got {n_boundary}")));
    }
    let ball = HyperbolicBall::new(z, radius)?;
    let images = boundary_images(f, &ball, n_boundary)?;
    let mut best = 0.0f64;
    for (i, p) in images.iter().enumerate() {
        for q in &images[i + 1..] {
            best = best.max(p.distance(q));
        }
    }
    Ok(best)
}

/// Resolution and stopping rule for the area quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial: usize,
    pub angular: usize,
    /// Accepted relative change between successive doublings.
    pub tolerance: f64,
    pub max_doublings: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial: 24,
            angular: 64,
            tolerance: 1e-6,
            max_doublings: 4,
        }
    }
}

/// Repeats `rule(level)` with doubled resolution until two successive values agree.
pub(crate) fn refine_until_stable(
    spec: &QuadratureSpec,
    what: &str,
    mut rule: impl FnMut(usize) -> Result<f64>,
) -> Result<f64> {
    let mut previous = rule(1)?;
    for k in 1..=spec.max_doublings {
        let current = rule(1 << k)?;
        if (current - previous).abs() <= spec.tolerance * current.abs().max(previous.abs()).max(1e-300) {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::numerical(format!(
        "{what}: quadrature did not settle within {} doublings",
        spec.max_doublings
    )))
}

/// `∫_{B_h(z,R)} 4|F'|² / (1 - |F|²)² dA`, the area of the image counted with multiplicity.
///
/// The ball is moved to `B(0, tanh(R/2))` first; the integrand becomes
/// `4 D_hF(m(v))² / (1 - |v|²)²` there.
pub fn image_area_with_multiplicity(
    f: &BlaschkeProduct,
    z: DiskPoint,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let ball = HyperbolicBall::new(z, radius)?;
    let m = ball.from_origin();
    let t = distance_to_rho(radius);
    refine_until_stable(spec, "image area", |scale| {
        let rule = Rule::new(spec.radial * scale);
        let n_angle = spec.angular * scale;
        let mut total = 0.0;
        for (r, wr) in rule.mapped(0.0, t) {
            let mut failure = None;
            let mean = circle_mean(n_angle, |phi| {
                let v = Complex64::from_polar(r, phi);
                match ball_point(&m, v) {
                    Ok((w, _)) => {
                        let dh = f.hyperbolic_derivative(w);
                        4.0 * dh * dh / (1.0 - r * r).powi(2)
                    }
                    Err(e) => {
                        failure = Some(e);
                        0.0
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
            total += wr * r * TAU * mean;
        }
        Ok(total)
    })
}

/// Hyperbolic area of the ball `B_h(·, R)`: `4π sinh²(R/2)`.
pub fn ball_area(radius: f64) -> f64 {
    4.0 * PI * (0.5 * radius).sinh().powi(2)
}

/// Target sampling for [`image_area_sampled`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetGrid {
    pub radial: usize,
    pub angular: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledArea {
    pub area: f64,
    pub samples: usize,
    pub covered: usize,
    /// Set when the target grid is empty and `area` is a placeholder 0.
    pub degenerate: bool,
}

/// Hyperbolic area of the set `F(B_h(z, R))`, from polar target cells
/// around `F(z)` classified by [`preimage_count`] at their centers.
///
/// Cells cover `B_h(F(z), r)` where `r` is the largest boundary image
/// distance from `F(z)`, which contains the image by the maximum principle.
pub fn image_area_sampled(f: &BlaschkeProduct, z: DiskPoint, radius: f64, grid: &TargetGrid) -> Result<SampledArea> {
    if grid.radial == 0 || grid.angular == 0 {
        return Ok(SampledArea { area: 0.0, samples: 0, covered: 0, degenerate: true });
    }
    let ball = HyperbolicBall::new(z, radius)?;
    let center = ImagePoint::of(f, z, z.one_minus_abs_sq());
    let fz = DiskPoint::new(center.value)?;
    let reach = boundary_images(f, &ball, 256)?
        .iter()
        .map(|p| p.distance(&center))
        .fold(0.0, f64::max);
    let reach = (reach * 1.02 + 1e-9).min(radius);
    let to_target = Mobius::to_origin(fz).inverse();
    let dphi = TAU / grid.angular as f64;
    let (mut area, mut covered) = (0.0, 0usize);
    for i in 0..grid.radial {
        let (s0, s1) = (reach * i as f64 / grid.radial as f64, reach * (i + 1) as f64 / grid.radial as f64);
        let (r0, r1) = (distance_to_rho(s0), distance_to_rho(s1));
        // exact hyperbolic area of the annular sector
        let cell = 2.0 * dphi * (1.0 / ((1.0 - r1) * (1.0 + r1)) - 1.0 / ((1.0 - r0) * (1.0 + r0)));
        for j in 0..grid.angular {
            let hit = [0.5, 0.25, 0.75].iter().find_map(|&shift| {
                let rho = distance_to_rho(0.5 * (s0 + s1));
                let v = Complex64::from_polar(rho, dphi * (j as f64 + shift));
                match preimage_count(f, &ball, to_target.apply_complex(v)) {
                    Ok(n) => Some(n >= 1),
                    Err(Error::BoundaryProximity { .. }) => None,
                    Err(_) => Some(false),
                }
            });
            if hit == Some(true) {
                area += cell;
                covered += 1;
            }
        }
    }
    Ok(SampledArea {
        area,
        samples: grid.radial * grid.angular,
        covered,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxDerivative {
    pub value: f64,
    pub argmax: DiskPoint,
}

/// Polar sampling of the closed ball for [`max_hyperbolic_derivative`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallGrid {
    pub radial: usize,
    pub angular: usize,
}

impl Default for BallGrid {
    fn default() -> Self {
        BallGrid { radial: 16, angular: 64 }
    }
}

/// `max D_hF` over `B_h(z, R)`: a polar grid (boundary included) in the
/// normalized ball, refined once around the best node.
pub fn max_hyperbolic_derivative(f: &BlaschkeProduct, z: DiskPoint, radius: f64, grid: &BallGrid) -> Result<MaxDerivative> {
    let ball = HyperbolicBall::new(z, radius)?;
    let m = ball.from_origin();
    let t = distance_to_rho(radius);
    let eval = |r: f64, phi: f64| -> Result<(f64, DiskPoint)> {
        let (w, _) = ball_point(&m, Complex64::from_polar(r, phi))?;
        Ok((f.hyperbolic_derivative(w), w))
    };
    let (nr, na) = (grid.radial.max(1), grid.angular.max(1));
    let dr = t / nr as f64;
    let da = TAU / na as f64;
    let mut best = (eval(0.0, 0.0)?, 0.0, 0.0);
    for i in 1..=nr {
        for j in 0..na {
            let (r, phi) = (dr * i as f64, da * j as f64);
            let v = eval(r, phi)?;
            if v.0 > best.0 .0 {
                best = (v, r, phi);
            }
        }
    }
    let (_, r0, a0) = best;
    for i in -8i32..=8 {
        for j in -8i32..=8 {
            let r = (r0 + dr * i as f64 / 8.0).clamp(0.0, t);
            let v = eval(r, a0 + da * j as f64 / 8.0)?;
            if v.0 > best.0 .0 {
                best.0 = v;
            }
        }
    }
    Ok(MaxDerivative { value: best.0 .0, argmax: best.0 .1 })
}

/// Number of solutions of `F(w) = q` inside the ball, by the winding number
/// of `F - q` along the ball's Euclidean boundary circle.
pub fn preimage_count(f: &BlaschkeProduct, ball: &HyperbolicBall, q: Complex64) -> Result<usize> {
    if !(q.norm() < 1.0) {
        return Err(Error::invalid(format!("target {q} is not inside the disk")));
    }
    let (c, r) = ball.to_euclidean();
    let g = |phi: f64| -> Result<Complex64> {
        let v = f.evaluate_complex(c + Complex64::from_polar(r, phi)) - q;
        if v.norm() < PROXIMITY_THRESHOLD {
            return Err(Error::BoundaryProximity { distance: v.norm() });
        }
        Ok(v)
    };
    let n = 64;
    let mut total = 0.0;
    let mut prev = g(0.0)?;
    for k in 0..n {
        let (a, b) = (TAU * k as f64 / n as f64, TAU * (k + 1) as f64 / n as f64);
        let next = if k + 1 == n { g(0.0)? } else { g(b)? };
        total += winding_increment(&g, a, b, prev, next, 0)?;
        prev = next;
    }
    let turns = total / TAU;
    let count = turns.round();
    if (turns - count).abs() > 1e-3 || count < 0.0 {
        return Err(Error::numerical(format!("winding number {turns} is not a non-negative integer")));
    }
    Ok(count as usize)
}

/// Argument increment of `g` over `[a, b]`, subdividing while a step exceeds π/4.
fn winding_increment(
    g: &impl Fn(f64) -> Result<Complex64>,
    a: f64,
    b: f64,
    ga: Complex64,
    gb: Complex64,
    depth: u32,
) -> Result<f64> {
    let step = (gb / ga).arg();
    if step.abs() <= PI / 4.0 {
        return Ok(step);
    }
    if depth >= 48 {
        return Err(Error::numerical("argument increments failed to resolve"));
    }
    let mid = 0.5 * (a + b);
    let gm = g(mid)?;
    Ok(winding_increment(g, a, mid, ga, gm, depth + 1)? + winding_increment(g, mid, b, gm, gb, depth + 1)?)
}

/// Resolution of [`ball_containment_radius`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContainmentResolution {
    /// Target points tested on each candidate circle.
    pub targets: usize,
    pub bisection_steps: u32,
}

impl Default for ContainmentResolution {
    fn default() -> Self {
        ContainmentResolution { targets: 64, bisection_steps: 12 }
    }
}

/// Largest `c` (by bisection on `[0, R]`) such that every sampled point of
/// `∂B_h(F(z), c)` has a preimage in `B_h(z, R)`.
pub fn ball_containment_radius(
    f: &BlaschkeProduct,
    z: DiskPoint,
    radius: f64,
    resolution: &ContainmentResolution,
) -> Result<f64> {
    let ball = HyperbolicBall::new(z, radius)?;
    let fz = DiskPoint::new(f.evaluate(z))?;
    let back = Mobius::to_origin(fz).inverse();
    let covered = |c: f64| {
        let rho = distance_to_rho(c);
        (0..resolution.targets).all(|k| {
            let v = Complex64::from_polar(rho, TAU * (k as f64 + 0.5) / resolution.targets as f64);
            matches!(preimage_count(f, &ball, back.apply_complex(v)), Ok(n) if n >= 1)
        })
    };
    if covered(radius) {
        return Ok(radius);
    }
    let (mut lo, mut hi) = (0.0, radius);
    for _ in 0..resolution.bisection_steps {
        let mid = 0.5 * (lo + hi);
        if covered(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
