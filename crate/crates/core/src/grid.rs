//! Point grids on which the "for all z" conditions are sampled.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::carleson::{DyadicSquare, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::geometry::{distance_to_rho, rho_to_distance, DiskPoint, Mobius};

/// A grid point with the key used in grid CSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub key: String,
    pub point: DiskPoint,
    /// `1 - |point|²`, exact for dyadic centers.
    pub gap: f64,
}

impl GridPoint {
    pub fn new(key: String, point: DiskPoint) -> Self {
        GridPoint { key, gap: point.one_minus_abs_sq(), point }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// Centers `z_Q` of all dyadic squares with `min_level ≤ level ≤ max_level`.
    Dyadic {
        min_level: u32,
        max_level: u32,
        include_origin: bool,
    },
    /// Circles equally spaced in hyperbolic radius up to `r_max`.
    Polar { r_max: f64, radial: usize, angular: usize },
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        match *self {
            GridSpec::Dyadic { min_level, max_level, include_origin } => {
                dyadic_centers(min_level, max_level, include_origin)
            }
            GridSpec::Polar { r_max, radial, angular } => polar_grid(r_max, radial, angular),
        }
    }
}

/// Origin (keyed `origin`) followed by the dyadic centers, level by level.
pub fn dyadic_centers(min_level: u32, max_level: u32, include_origin: bool) -> Result<Vec<GridPoint>> {
    if min_level < 2 || max_level > MAX_LEVEL || min_level > max_level {
        return Err(Error::invalid(format!(
            "dyadic grid levels [{min_level}, {max_level}] outside [2, {MAX_LEVEL}]"
        )));
    }
    let mut out = Vec::new();
    if include_origin {
        out.push(GridPoint::new("origin".into(), DiskPoint::origin()));
    }
    for level in min_level..=max_level {
        for q in DyadicSquare::level_squares(level) {
            out.push(GridPoint {
                key: q.key(),
                point: q.center(),
                gap: q.center_gap(),
            });
        }
    }
    Ok(out)
}

/// The origin plus `radial` circles of `angular` points, radii equally spaced
/// in hyperbolic distance from 0 up to `r_max`.
pub fn polar_grid(r_max: f64, radial: usize, angular: usize) -> Result<Vec<GridPoint>> {
    DiskPoint::from_re_im(r_max, 0.0)?;
    if radial == 0 || angular == 0 {
        return Err(Error::invalid("polar grid needs at least one circle and one angle"));
    }
    let top = rho_to_distance(r_max);
    let mut out = vec![GridPoint::new("origin".into(), DiskPoint::origin())];
    for i in 1..=radial {
        let r = distance_to_rho(top * i as f64 / radial as f64).min(r_max);
        for j in 0..angular {
            let z = Complex64::from_polar(r, TAU * j as f64 / angular as f64);
            out.push(GridPoint::new(format!("r{i}:a{j}"), DiskPoint::new(z)?));
        }
    }
    Ok(out)
}

/// Image of a grid under an automorphism, keys kept. Used to compare a
/// statistic of a set with that of its image on matched grids.
pub fn transport_grid(grid: &[GridPoint], m: &Mobius) -> Result<Vec<GridPoint>> {
    grid.iter()
        .map(|g| {
            let point = m.apply(g.point)?;
            let gap = g.gap * m.derivative_abs(g.point.value());
            Ok(GridPoint { key: g.key.clone(), point, gap })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_grid_counts_and_keys() {
        let g = dyadic_centers(3, 5, true).unwrap();
        assert_eq!(g.len(), 1 + 8 + 16 + 32);
        assert_eq!(g[0].key, "origin");
        assert_eq!(g[1].key, "L3:0");
        assert!((g[1].gap - (1.0 - 0.9375f64.powi(2))).abs() < 1e-16);
        assert!(dyadic_centers(1, 5, false).is_err());
    }

    #[test]
    fn polar_grid_reaches_r_max() {
        let g = polar_grid(0.99, 10, 8).unwrap();
        assert_eq!(g.len(), 81);
        let max = g.iter().map(|p| p.point.abs()).fold(0.0, f64::max);
        assert!((max - 0.99).abs() < 1e-12);
    }

    #[test]
    fn transported_gaps_stay_exact() {
        let g = dyadic_centers(8, 8, false).unwrap();
        let m = Mobius::new(DiskPoint::from_re_im(0.3, -0.4).unwrap(), 1.0);
        for t in transport_grid(&g, &m).unwrap() {
            assert!((t.gap - t.point.one_minus_abs_sq()).abs() <= 1e-12);
        }
    }
}
