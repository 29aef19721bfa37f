//! Dyadic Carleson squares and discrete measures on the disk.
//!
//! Arcs are measured in normalized circle length (total mass 1), so the
//! square over `I` is `{z : z/|z| ∈ I, 1 - |I| < |z| < 1}`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::geometry::{reflected_den, BoundaryPoint, DiskPoint};

/// Constant in the heavy square and heavy arc tests.
pub const HEAVY_CONSTANT: f64 = 0.01;

pub const DEFAULT_BASE_LEVEL: u32 = 3;

/// Deepest level whose center `z_Q` still passes the disk admission margin.
pub const MAX_LEVEL: u32 = 38;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicSquare {
    pub level: u32,
    pub index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareGeometry {
    /// Base arc `[start, end)` in normalized length.
    pub arc_start: f64,
    pub arc_end: f64,
    pub side: f64,
    pub midpoint: BoundaryPoint,
    pub center: DiskPoint,
}

/// Normalized position `θ / 2π ∈ [0, 1)` of a point of the disk.
fn turn_fraction(z: Complex64) -> f64 {
    let t = z.arg() / TAU;
    let t = if t < 0.0 { t + 1.0 } else { t };
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

impl DyadicSquare {
    pub fn new(level: u32, index: u64) -> Result<Self> {
        if !(2..=MAX_LEVEL).contains(&level) {
            return Err(Error::invalid(format!(
                "square level {level} outside [2, {MAX_LEVEL}]"
            )));
        }
        if index >= 1u64 << level {
            return Err(Error::invalid(format!(
                "square index {index} out of range for level {level}"
            )));
        }
        Ok(DyadicSquare { level, index })
    }

    /// `ℓ(Q) = 2^{-level}`.
    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn midpoint(&self) -> BoundaryPoint {
        BoundaryPoint::new(TAU * (self.index as f64 + 0.5) * self.side())
    }

    /// `z_Q = (1 - ℓ/2) ξ_I`.
    pub fn center(&self) -> DiskPoint {
        let r = 1.0 - 0.5 * self.side();
        DiskPoint::assume(Complex64::from_polar(r, self.midpoint().angle()))
    }

    /// `1 - |z_Q|² = (ℓ/2)(2 - ℓ/2)`, exact in floating point.
    pub fn center_gap(&self) -> f64 {
        let h = 0.5 * self.side();
        h * (2.0 - h)
    }

    pub fn geometry(&self) -> SquareGeometry {
        let side = self.side();
        SquareGeometry {
            arc_start: self.index as f64 * side,
            arc_end: (self.index + 1) as f64 * side,
            side,
            midpoint: self.midpoint(),
            center: self.center(),
        }
    }

    /// The square at `level` whose base arc contains the direction of `z`
    /// (regardless of the radial condition).
    pub fn above(z: Complex64, level: u32) -> Self {
        let scaled = turn_fraction(z) * (1u64 << level) as f64;
        let index = (scaled.floor() as u64).min((1u64 << level) - 1);
        DyadicSquare { level, index }
    }

    pub fn contains(&self, z: DiskPoint) -> bool {
        Self::above(z.value(), self.level).index == self.index && z.abs() > 1.0 - self.side()
    }

    pub fn children(&self) -> [DyadicSquare; 2] {
        let level = self.level + 1;
        [
            DyadicSquare { level, index: 2 * self.index },
            DyadicSquare { level, index: 2 * self.index + 1 },
        ]
    }

    pub fn parent(&self) -> Option<DyadicSquare> {
        (self.level > 2).then(|| DyadicSquare {
            level: self.level - 1,
            index: self.index / 2,
        })
    }

    /// Descendants at relative depth `depth`, in index order.
    pub fn descendants(&self, depth: u32) -> impl Iterator<Item = DyadicSquare> {
        let level = self.level + depth;
        let first = self.index << depth;
        (first..first + (1u64 << depth)).map(move |index| DyadicSquare { level, index })
    }

    pub fn is_ancestor_of(&self, other: &DyadicSquare) -> bool {
        other.level >= self.level && other.index >> (other.level - self.level) == self.index
    }

    /// All squares at `level`, in index order.
    pub fn level_squares(level: u32) -> impl Iterator<Item = DyadicSquare> {
        (0..1u64 << level).map(move |index| DyadicSquare { level, index })
    }

    /// `L{level}:{index}`, the key used in grid files.
    pub fn key(&self) -> String {
        format!("L{}:{}", self.level, self.index)
    }
}

pub fn square_geometry(q: DyadicSquare) -> SquareGeometry {
    q.geometry()
}

/// Finite positive measure `Σ m_k δ_{z_k}` on the disk.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiskMeasure {
    atoms: Vec<(DiskPoint, f64)>,
}

impl DiskMeasure {
    pub fn new(atoms: Vec<(DiskPoint, f64)>) -> Result<Self> {
        if let Some((_, m)) = atoms.iter().find(|(_, m)| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::invalid(format!("atom mass must be positive and finite, got {m}")));
        }
        Ok(DiskMeasure { atoms })
    }

    pub fn empty() -> Self {
        DiskMeasure { atoms: vec![] }
    }

    pub fn atoms(&self) -> &[(DiskPoint, f64)] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    /// The measure pushed forward by the rotation `z ↦ e^{iθ} z`.
    pub fn rotated(&self, angle: f64) -> Self {
        let r = Complex64::from_polar(1.0, angle);
        DiskMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|(z, m)| (DiskPoint::assume(z.value() * r), *m))
                .collect(),
        }
    }
}

/// `σ = Σ (1 - |a_n|²) δ_{a_n}`, one atom per zero (multiplicity kept).
pub fn zero_measure(f: &BlaschkeProduct) -> DiskMeasure {
    DiskMeasure {
        atoms: f.zeros().iter().map(|a| (*a, a.one_minus_abs_sq())).collect(),
    }
}

pub fn measure_of_square(sigma: &DiskMeasure, q: DyadicSquare) -> f64 {
    sigma
        .atoms
        .iter()
        .filter(|(z, _)| q.contains(*z))
        .map(|(_, m)| m)
        .sum()
}

/// Masses `σ(Q)` of every square with `base_level ≤ level ≤ max_level`
/// containing at least one atom.
pub fn occupied_squares(sigma: &DiskMeasure, base_level: u32, max_level: u32) -> BTreeMap<DyadicSquare, f64> {
    let mut out = BTreeMap::new();
    for (z, m) in &sigma.atoms {
        for level in base_level..=max_level {
            let q = DyadicSquare::above(z.value(), level);
            if z.abs() <= 1.0 - q.side() {
                // deeper squares are thinner still
                break;
            }
            *out.entry(q).or_insert(0.0) += m;
        }
    }
    out
}

/// Largest `σ(Q)/ℓ(Q)` and a square attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonConstant {
    pub value: f64,
    pub witness: Option<DyadicSquare>,
}

pub fn carleson_constant_with_witness(sigma: &DiskMeasure, base_level: u32, max_level: u32) -> CarlesonConstant {
    let mut best = CarlesonConstant { value: 0.0, witness: None };
    for (q, mass) in occupied_squares(sigma, base_level, max_level) {
        let ratio = mass / q.side();
        if ratio > best.value {
            best = CarlesonConstant { value: ratio, witness: Some(q) };
        }
    }
    best
}

/// `max σ(Q)/ℓ(Q)` over dyadic squares with `base_level ≤ level ≤ max_level`.
pub fn carleson_constant(sigma: &DiskMeasure, base_level: u32, max_level: u32) -> f64 {
    carleson_constant_with_witness(sigma, base_level, max_level).value
}

/// `Σ m_k (1 - |z|²) / |1 - z̄ w_k|²`.
pub fn balayage(sigma: &DiskMeasure, z: DiskPoint) -> f64 {
    let gap = z.one_minus_abs_sq();
    sigma
        .atoms
        .iter()
        .map(|(w, m)| m * gap / reflected_den(w.value(), z.value(), gap).norm_sqr())
        .sum()
}

/// Outcome of a heavy square or heavy arc test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeavyTest {
    pub heavy: bool,
    /// `average - HEAVY_CONSTANT * extension`.
    pub margin: f64,
    pub average: f64,
    pub extension: f64,
}

impl HeavyTest {
    pub(crate) fn from_parts(average: f64, extension: f64) -> Self {
        let margin = average - HEAVY_CONSTANT * extension;
        HeavyTest {
            heavy: average > 0.0 && margin >= 0.0,
            margin,
            average,
            extension,
        }
    }
}

pub fn is_heavy_square(sigma: &DiskMeasure, q: DyadicSquare) -> HeavyTest {
    HeavyTest::from_parts(measure_of_square(sigma, q) / q.side(), balayage(sigma, q.center()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightSubsquare {
    pub square: DyadicSquare,
    /// `ℓ(Q')/ℓ(Q)`.
    pub delta: f64,
    /// `(σ(Q')/ℓ(Q')) / (σ(Q)/ℓ(Q))`.
    pub ratio: f64,
}

/// Shallowest descendant `Q'` of a heavy `q` with
/// `σ(Q')/ℓ(Q') ≤ ε σ(Q)/ℓ(Q)`; within a level the lightest (then first) one.
pub fn light_subsquare_search(
    sigma: &DiskMeasure,
    q: DyadicSquare,
    eps: f64,
    max_depth: u32,
) -> Result<Option<LightSubsquare>> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("ε must lie in (0, 1], got {eps}")));
    }
    if !is_heavy_square(sigma, q).heavy {
        return Err(Error::precondition(format!("square {} is not heavy", q.key())));
    }
    let inside: Vec<(DiskPoint, f64)> = sigma.atoms.iter().copied().filter(|(z, _)| q.contains(*z)).collect();
    let parent_avg = inside.iter().map(|(_, m)| m).sum::<f64>() / q.side();
    let max_depth = max_depth.min(MAX_LEVEL - q.level);
    for depth in 0..=max_depth {
        let mut masses: BTreeMap<u64, f64> = BTreeMap::new();
        for (z, m) in &inside {
            let sub = DyadicSquare::above(z.value(), q.level + depth);
            if z.abs() > 1.0 - sub.side() {
                *masses.entry(sub.index).or_insert(0.0) += m;
            }
        }
        let delta = (-(depth as f64)).exp2();
        let count = 1u64 << depth;
        if (masses.len() as u64) < count {
            // first empty descendant
            let first = q.index << depth;
            let mut expected = first;
            for idx in masses.keys() {
                if *idx != expected {
                    break;
                }
                expected += 1;
            }
            return Ok(Some(LightSubsquare {
                square: DyadicSquare { level: q.level + depth, index: expected },
                delta,
                ratio: 0.0,
            }));
        }
        let side = q.side() * delta;
        let (idx, mass) = masses
            .iter()
            .fold((0u64, f64::INFINITY), |best, (i, m)| if *m < best.1 { (*i, *m) } else { best });
        let ratio = (mass / side) / parent_avg;
        if ratio <= eps {
            return Ok(Some(LightSubsquare {
                square: DyadicSquare { level: q.level + depth, index: idx },
                delta,
                ratio,
            }));
        }
    }
    Ok(None)
}
