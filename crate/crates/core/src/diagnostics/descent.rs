//! Dyadic descent: sub-squares on which `1 - |F|` drops by a factor `ε`.

use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::carleson::{DyadicSquare, DEFAULT_BASE_LEVEL, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, DiskPoint};

/// Relative slack when comparing a ratio with `ε`; the centers `z_Q` carry
/// rounding from the polar-to-Cartesian conversion.
pub const RATIO_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentWitness {
    pub parent: DyadicSquare,
    pub child: DyadicSquare,
    pub depth: u32,
    /// `(1 - |F(z_child)|) / (1 - |F(z_parent)|)`.
    pub ratio: f64,
}

/// `1 - |F(z_Q)|` using the exact `1 - |z_Q|²`.
pub fn center_defect(f: &BlaschkeProduct, q: DyadicSquare) -> f64 {
    f.one_minus_abs_with_gap(q.center(), q.center_gap())
}

/// First descendant (smallest relative depth, then smallest index) with
/// `1 - |F(z_{Q'})| ≤ ε (1 - |F(z_Q)|)`.
pub fn descent_search(f: &BlaschkeProduct, q: DyadicSquare, eps: f64, max_depth: u32) -> Result<Option<DescentWitness>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("ε must lie in (0, 1), got {eps}")));
    }
    let parent = center_defect(f, q);
    let max_depth = max_depth.min(MAX_LEVEL - q.level);
    for depth in 1..=max_depth {
        for child in q.descendants(depth) {
            let ratio = center_defect(f, child) / parent;
            if ratio <= eps * (1.0 + RATIO_TIE_TOLERANCE) {
                return Ok(Some(DescentWitness { parent: q, child, depth, ratio }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentChain {
    /// Midpoint direction of the last square reached.
    pub xi: BoundaryPoint,
    /// Starting square followed by each witness child.
    pub squares: Vec<DyadicSquare>,
    pub witnesses: Vec<DescentWitness>,
    /// False when a search failed before `chain_length` steps.
    pub complete: bool,
}

/// The square above `z` with `1 - |z| < ℓ(Q) ≤ 2(1 - |z|)` (so it contains
/// `z` and `1 - |z| ≥ ℓ(Q)/2`), or the base-level square for points nearer 0.
pub fn starting_square(z: DiskPoint) -> DyadicSquare {
    let mut level = DEFAULT_BASE_LEVEL;
    while level < MAX_LEVEL && (-((level + 1) as f64)).exp2() > 1.0 - z.abs() {
        level += 1;
    }
    DyadicSquare::above(z.value(), level)
}

/// Iterates [`descent_search`] from [`starting_square`]; the chain's squares
/// are nested and their centers converge to `xi`.
pub fn descent_chain(f: &BlaschkeProduct, z: DiskPoint, eps: f64, chain_length: usize, max_depth: u32) -> Result<DescentChain> {
    let mut q = starting_square(z);
    let mut squares = vec![q];
    let mut witnesses = Vec::new();
    for _ in 0..chain_length {
        match descent_search(f, q, eps, max_depth)? {
            Some(w) => {
                q = w.child;
                squares.push(q);
                witnesses.push(w);
            }
            None => {
                return Ok(DescentChain { xi: q.midpoint(), squares, witnesses, complete: false });
            }
        }
    }
    Ok(DescentChain { xi: q.midpoint(), squares, witnesses, complete: true })
}
