//! Aleksandrov–Clark measures of finite Blaschke products, their Poisson
//! extensions, and heavy-arc tests.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::carleson::HeavyTest;
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, BoundaryPoint, DiskPoint};

/// Pre-scan points per unit of degree when bracketing solutions of `F = α`.
pub const PHASE_SCAN_PER_DEGREE: usize = 1024;
pub const PHASE_BISECTION_STEPS: usize = 60;

/// Atomic measure on the circle together with the Herglotz constant `C_α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMeasure {
    /// `(angle, mass)` with angles in `[0, 2π)`, sorted.
    pub atoms: Vec<(f64, f64)>,
    pub herglotz_constant: f64,
}

impl CircleMeasure {
    pub fn new(mut atoms: Vec<(f64, f64)>, herglotz_constant: f64) -> Result<Self> {
        if let Some((_, m)) = atoms.iter().find(|(_, m)| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::invalid(format!("atom mass must be positive and finite, got {m}")));
        }
        for a in atoms.iter_mut() {
            a.0 = normalize_angle(a.0);
        }
        atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(CircleMeasure { atoms, herglotz_constant })
    }

    /// Unit point mass at `e^{iθ}`.
    pub fn dirac(angle: f64) -> Self {
        CircleMeasure {
            atoms: vec![(normalize_angle(angle), 1.0)],
            herglotz_constant: 0.0,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Boundary arc given by its midpoint angle and normalized length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    center_angle: f64,
    length: f64,
}

impl Arc {
    pub fn new(center_angle: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= 1.0) {
            return Err(Error::invalid(format!("arc length must lie in (0, 1], got {length}")));
        }
        if !center_angle.is_finite() {
            return Err(Error::invalid("arc center must be finite"));
        }
        Ok(Arc {
            center_angle: normalize_angle(center_angle),
            length,
        })
    }

    /// The arc `I(z)` whose point `z_I` is `z`: centered at `z/|z|`, length `2(1 - |z|)`.
    pub fn for_point(z: DiskPoint) -> Result<Self> {
        Arc::new(z.angle(), 2.0 * (1.0 - z.abs()))
    }

    pub fn center_angle(&self) -> f64 {
        self.center_angle
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Start of the arc in normalized position, in `[0, 1)`.
    fn start(&self) -> f64 {
        (self.center_angle / TAU - 0.5 * self.length).rem_euclid(1.0)
    }

    /// Membership in the half-open arc `[start, start + length)`.
    pub fn contains(&self, angle: f64) -> bool {
        let offset = (normalize_angle(angle) / TAU - self.start()).rem_euclid(1.0);
        offset < self.length
    }

    /// `z_I = (1 - |I|/2) e^{i·center}`.
    pub fn point(&self) -> DiskPoint {
        DiskPoint::assume(Complex64::from_polar(1.0 - 0.5 * self.length, self.center_angle))
    }

    /// Sub-arcs of relative length `2^{-depth}`, in order from the start.
    pub fn dyadic_subarcs(&self, depth: u32) -> Vec<Arc> {
        let n = 1u64 << depth;
        let len = self.length / n as f64;
        (0..n)
            .map(|k| Arc {
                center_angle: normalize_angle(TAU * (self.start() + (k as f64 + 0.5) * len)),
                length: len,
            })
            .collect()
    }
}

/// Solutions of `F(e^{iθ}) = α` with masses `1/φ'(θ)` and `C_α`.
pub fn clark_measure(f: &BlaschkeProduct, alpha: BoundaryPoint) -> Result<CircleMeasure> {
    let d = f.degree();
    let n = PHASE_SCAN_PER_DEGREE * d;
    let phi0 = f.boundary_phase(0.0);
    let total = TAU * d as f64;
    let mut scan: Vec<f64> = (0..n).map(|k| f.boundary_phase(TAU * k as f64 / n as f64)).collect();
    scan.push(phi0 + total);
    if let Some(k) = scan.windows(2).position(|w| !(w[1] >= w[0])) {
        return Err(Error::numerical(format!(
            "boundary phase decreases between scan nodes {k} and {}",
            k + 1
        )));
    }
    // targets arg α + 2πj inside [φ(0), φ(0) + 2πd)
    let mut target = alpha.angle() + TAU * ((phi0 - alpha.angle()) / TAU).ceil();
    if target < phi0 {
        target += TAU;
    }
    let mut atoms = Vec::with_capacity(d);
    let mut k = 0usize;
    while target < phi0 + total && atoms.len() < d {
        while k + 1 < scan.len() && scan[k + 1] <= target {
            k += 1;
        }
        if k + 1 >= scan.len() {
            return Err(Error::numerical("failed to bracket a solution of F = α"));
        }
        let (mut lo, mut hi) = (TAU * k as f64 / n as f64, TAU * (k + 1) as f64 / n as f64);
        for _ in 0..PHASE_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f.boundary_phase(mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta = 0.5 * (lo + hi);
        atoms.push((theta, 1.0 / f.boundary_phase_speed(theta)));
        target += TAU;
    }
    if atoms.len() != d {
        return Err(Error::numerical(format!(
            "found {} solutions of F = α, expected {d}",
            atoms.len()
        )));
    }
    let f0 = f.evaluate(DiskPoint::origin());
    let a = alpha.value();
    let herglotz_constant = ((a + f0) / (a - f0)).im;
    CircleMeasure::new(atoms, herglotz_constant)
}

/// `u(z) = Σ m_k (1 - |z|²) / |e^{iθ_k} - z|²`.
pub fn poisson_extension(mu: &CircleMeasure, z: DiskPoint) -> f64 {
    let gap = z.one_minus_abs_sq();
    mu.atoms
        .iter()
        .map(|&(t, m)| m * gap / (Complex64::from_polar(1.0, t) - z.value()).norm_sqr())
        .sum()
}

/// `Re (α + F(z)) / (α - F(z)) = (1 - |F(z)|²) / |α - F(z)|²`.
pub fn herglotz_real_part(f: &BlaschkeProduct, alpha: BoundaryPoint, z: DiskPoint) -> f64 {
    f.one_minus_abs_sq(z) / (alpha.value() - f.evaluate(z)).norm_sqr()
}

/// `μ(I) / |I|`.
pub fn arc_mean(mu: &CircleMeasure, arc: &Arc) -> f64 {
    mu.atoms
        .iter()
        .filter(|(t, _)| arc.contains(*t))
        .map(|(_, m)| m)
        .sum::<f64>()
        / arc.length()
}

pub fn is_heavy_arc(mu: &CircleMeasure, arc: &Arc) -> HeavyTest {
    HeavyTest::from_parts(arc_mean(mu, arc), poisson_extension(mu, arc.point()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightSubarc {
    pub arc: Arc,
    /// `|J| / |I|`.
    pub delta: f64,
    /// `(μ(J)/|J|) / (μ(I)/|I|)`.
    pub ratio: f64,
}

/// Largest dyadic sub-arc `J` of a heavy `I` (relative length ≥ `δ_min`) with
/// `μ(J)/|J| ≤ ε μ(I)/|I|`; within one length the lightest, then first.
pub fn light_subarc_search(mu: &CircleMeasure, arc: &Arc, eps: f64, delta_min: f64) -> Result<Option<LightSubarc>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("ε must be positive, got {eps}")));
    }
    if !(delta_min > 0.0 && delta_min <= 1.0) {
        return Err(Error::invalid(format!("δ_min must lie in (0, 1], got {delta_min}")));
    }
    if !is_heavy_arc(mu, arc).heavy {
        return Err(Error::precondition("arc is not heavy"));
    }
    let parent = arc_mean(mu, arc);
    let mut depth = 0u32;
    while (-(depth as f64)).exp2() >= delta_min && depth < 40 {
        let best = arc
            .dyadic_subarcs(depth)
            .into_iter()
            .map(|j| (arc_mean(mu, &j) / parent, j))
            .fold(None::<(f64, Arc)>, |best, cur| match best {
                Some(b) if b.0 <= cur.0 => Some(b),
                _ => Some(cur),
            });
        if let Some((ratio, j)) = best {
            if ratio <= eps {
                return Ok(Some(LightSubarc {
                    arc: j,
                    delta: (-(depth as f64)).exp2(),
                    ratio,
                }));
            }
        }
        depth += 1;
    }
    Ok(None)
}

/// Both sides of `2 D_h F(z) = (1 - |z|²) |∇u(z)| / u(z)` for the Poisson
/// extension `u` of the Clark measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

pub fn gradient_identity_check(f: &BlaschkeProduct, alpha: BoundaryPoint, z: DiskPoint) -> Result<GradientIdentity> {
    let mu = clark_measure(f, alpha)?;
    Ok(gradient_identity_with(f, &mu, z))
}

/// [`gradient_identity_check`] with a precomputed Clark measure.
pub fn gradient_identity_with(f: &BlaschkeProduct, mu: &CircleMeasure, z: DiskPoint) -> GradientIdentity {
    let lhs = 2.0 * f.hyperbolic_derivative(z);
    let zc = z.value();
    let gap = z.one_minus_abs_sq();
    let one = Complex64::new(1.0, 0.0);
    let grad: Complex64 = mu
        .atoms
        .iter()
        .map(|&(t, m)| {
            let xi = Complex64::from_polar(1.0, t);
            let rot = (xi - zc) / (one - zc.conj() * xi);
            m * gap / ((xi - zc).norm_sqr() * rot)
        })
        .sum();
    let rhs = 2.0 * grad.norm() / poisson_extension(mu, z);
    GradientIdentity {
        lhs,
        rhs,
        gap: crate::relative_gap(lhs, rhs),
    }
}
