//! Numerical diagnostics for analytic self-maps of the unit disk given as
//! finite Blaschke products: hyperbolic geometry, Carleson squares, Clark
//! measures, image statistics of hyperbolic balls and critical-set density.

pub mod blaschke;
pub mod carleson;
pub mod clark;
pub mod density;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod report;
mod quadrature;
mod roots;

pub use blaschke::{BlaschkeProduct, CriticalSet};
pub use error::{Error, Result};
pub use geometry::{BoundaryPoint, DiskPoint, HyperbolicBall, Mobius};

/// `|a - b| / max(1, |a|, |b|)`: relative gap that stays meaningful near zero.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}
