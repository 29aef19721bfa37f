//! Separation, quasi-separation and the uniform upper density `D⁺` of finite
//! point sets in the disk.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance_to_rho, hyperbolic_distance, one_minus_rho_sq, pseudo_hyperbolic_distance, DiskPoint};
use crate::grid::GridPoint;

/// Smallest pairwise hyperbolic distance; `+∞` for fewer than two points.
pub fn separation_constant(points: &[DiskPoint]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.min(hyperbolic_distance(*p, *q));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiSeparation {
    /// Largest count in a ball of radius `2·radius` centered at a point of the
    /// set. Bounds the count of every ball of radius `radius`.
    pub bound: usize,
    /// Largest count in a ball of radius `radius` centered at a point of the set.
    pub point_centered: usize,
}

/// Counts of points in hyperbolic balls centered at the points themselves.
///
/// A ball of radius `R` holding `k` points lies inside the ball of radius
/// `2R` around any of them, so `bound` is an upper bound over all balls.
pub fn quasi_separation_count(points: &[DiskPoint], radius: f64) -> Result<QuasiSeparation> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    let (inner, outer) = (distance_to_rho(radius), distance_to_rho(2.0 * radius));
    let counts: Vec<(usize, usize)> = points
        .par_iter()
        .map(|p| {
            let mut c = (0, 0);
            for q in points {
                let rho = pseudo_hyperbolic_distance(*p, *q);
                c.0 += usize::from(rho < outer);
                c.1 += usize::from(rho < inner);
            }
            c
        })
        .collect();
    Ok(QuasiSeparation {
        bound: counts.iter().map(|c| c.0).max().unwrap_or(0),
        point_centered: counts.iter().map(|c| c.1).max().unwrap_or(0),
    })
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.5 && r < 1.0 - 1e-12) {
        return Err(Error::invalid(format!("density radius must lie in (1/2, 1 - 1e-12), got {r}")));
    }
    Ok(())
}

/// Sum of `1 - |c|` over `1/2 < |c| < r` divided by `log(1/(1-r))`, from
/// `(|c|, 1 - |c|)` pairs.
fn quotient(moduli: &[(f64, f64)], r: f64) -> f64 {
    let sum = moduli.iter().filter(|(m, _)| *m > 0.5 && *m < r).fold(0.0, |acc, (_, g)| acc + g);
    sum / -(-r).ln_1p()
}

/// `D(C, r) = Σ_{1/2<|c|<r} (1 - |c|) / log(1/(1 - r))`.
pub fn partial_density(points: &[DiskPoint], r: f64) -> Result<f64> {
    check_radius(r)?;
    let moduli: Vec<(f64, f64)> = points
        .iter()
        .map(|c| (c.abs(), c.one_minus_abs_sq() / (1.0 + c.abs())))
        .collect();
    Ok(quotient(&moduli, r))
}

/// `(|m_{a→0}(c)|, 1 - |m_{a→0}(c)|)` without forming the image.
fn shifted_moduli(points: &[DiskPoint], a: DiskPoint) -> Vec<(f64, f64)> {
    points
        .iter()
        .map(|c| {
            let m = pseudo_hyperbolic_distance(*c, a);
            (m, one_minus_rho_sq(*c, a) / (1.0 + m))
        })
        .collect()
}

/// `1 - r` log-spaced from `1/10` down to `1 - r_max`.
pub fn default_r_ladder(r_max: f64, rungs: usize) -> Result<Vec<f64>> {
    check_radius(r_max)?;
    if rungs == 0 {
        return Err(Error::invalid("need at least one rung"));
    }
    let (top, bottom) = ((0.1f64).ln(), (1.0 - r_max).ln());
    if rungs == 1 || bottom >= top {
        return Ok(vec![r_max]);
    }
    Ok((0..rungs)
        .map(|k| {
            if k + 1 == rungs {
                r_max
            } else {
                1.0 - (top + (bottom - top) * k as f64 / (rungs - 1) as f64).exp()
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub r_ladder: Vec<f64>,
    pub a_grid: Vec<DiskPoint>,
    /// `values[i][j] = D(m_{a_j→0}(C), r_i)`.
    pub values: Vec<Vec<f64>>,
    /// Largest entry of the top row.
    pub d_plus: f64,
    /// Grid point realizing `d_plus`; `None` for an empty grid.
    pub witness: Option<DiskPoint>,
}

/// `D(m_{a→0}(C), r)` over the product of `a_grid` and `r_ladder`.
///
/// `d_plus` is read off the top rung rather than extrapolated.
pub fn uniform_upper_density(points: &[DiskPoint], a_grid: &[GridPoint], r_ladder: &[f64]) -> Result<DensityEstimate> {
    if r_ladder.is_empty() {
        return Err(Error::invalid("empty r ladder"));
    }
    for r in r_ladder {
        check_radius(*r)?;
    }
    if r_ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("r ladder must be increasing"));
    }
    // columns per a, transposed afterwards
    let columns: Vec<Vec<f64>> = a_grid
        .par_iter()
        .map(|a| {
            let moduli = shifted_moduli(points, a.point);
            r_ladder.iter().map(|&r| quotient(&moduli, r)).collect()
        })
        .collect();
    let values: Vec<Vec<f64>> = (0..r_ladder.len())
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    let mut d_plus = 0.0;
    let mut witness = None;
    if let Some(top) = values.last() {
        for (j, v) in top.iter().enumerate() {
            if witness.is_none() || *v > d_plus {
                d_plus = *v;
                witness = Some(a_grid[j].point);
            }
        }
    }
    Ok(DensityEstimate {
        r_ladder: r_ladder.to_vec(),
        a_grid: a_grid.iter().map(|g| g.point).collect(),
        values,
        d_plus,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::dyadic_centers;

    fn pts(xs: &[f64]) -> Vec<DiskPoint> {
        xs.iter().map(|&x| DiskPoint::from_re_im(x, 0.0).unwrap()).collect()
    }

    #[test]
    fn separation_examples() {
        assert!((separation_constant(&pts(&[0.0, 0.5])) - 3f64.ln()).abs() < 1e-14);
        assert_eq!(separation_constant(&pts(&[0.0])), f64::INFINITY);
        let seq: Vec<f64> = (1..=10).map(|n| 1.0 - (-(n as f64)).exp2()).collect();
        let got = separation_constant(&pts(&seq));
        // consecutive points are the closest: ρ = (1/2)·2^{-n}/(1 - (1-2^{-n})(1-2^{-n-1}))
        let oracle = seq
            .windows(2)
            .map(|w| {
                let rho = (w[1] - w[0]) / (1.0 - w[0] * w[1]);
                2.0 * rho.atanh()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((got - oracle).abs() < 1e-12);
    }

    #[test]
    fn quasi_separation_examples() {
        let one = quasi_separation_count(&pts(&[0.3]), 1.0).unwrap();
        assert_eq!((one.bound, one.point_centered), (1, 1));
        let five = quasi_separation_count(&pts(&[0.4; 5]), 1.0).unwrap();
        assert_eq!((five.bound, five.point_centered), (5, 5));
        let seq: Vec<f64> = (1..=30).map(|n| 1.0 - (-(n as f64)).exp2()).collect();
        let q = quasi_separation_count(&pts(&seq), 1.0).unwrap();
        // k-th neighbors sit about k·log 2 apart
        let c = pts(&seq);
        let count = |p: &DiskPoint, r: f64| c.iter().filter(|q| hyperbolic_distance(*p, **q) < r).count();
        let oracle_inner = c.iter().map(|p| count(p, 1.0)).max().unwrap();
        let oracle_outer = c.iter().map(|p| count(p, 2.0)).max().unwrap();
        assert_eq!((q.point_centered, q.bound), (oracle_inner, oracle_outer));
        assert_eq!((q.point_centered, q.bound), (3, 5));
    }

    #[test]
    fn partial_density_examples() {
        assert_eq!(partial_density(&[], 0.9).unwrap(), 0.0);
        let d = partial_density(&pts(&[0.9]), 1.0 - 1e-3).unwrap();
        assert!((d - 0.1 / 1000f64.ln()).abs() < 1e-12);
        assert_eq!(partial_density(&pts(&[0.3]), 0.99).unwrap(), 0.0);
        assert!(partial_density(&pts(&[0.9]), 0.4).is_err());
    }

    #[test]
    fn empty_set_has_zero_density() {
        let grid = dyadic_centers(3, 5, true).unwrap();
        let est = uniform_upper_density(&[], &grid, &default_r_ladder(0.9999, 4).unwrap()).unwrap();
        assert_eq!(est.d_plus, 0.0);
        assert_eq!(est.values.len(), 4);
        assert_eq!(est.values[0].len(), grid.len());
    }

    #[test]
    fn origin_column_matches_partial_density() {
        let seq: Vec<f64> = (1..=30).map(|n| 1.0 - (-(n as f64)).exp2()).collect();
        let c = pts(&seq);
        let ladder = default_r_ladder(1.0 - 1e-4, 4).unwrap();
        let grid = dyadic_centers(3, 3, true).unwrap();
        let est = uniform_upper_density(&c, &grid, &ladder).unwrap();
        for (i, r) in ladder.iter().enumerate() {
            assert!((est.values[i][0] - partial_density(&c, *r).unwrap()).abs() < 1e-14);
        }
        assert!(est.d_plus >= est.values[3][0]);
    }

    #[test]
    fn ladder_shape() {
        let l = default_r_ladder(1.0 - 1e-4, 4).unwrap();
        assert_eq!(l.len(), 4);
        assert!((l[0] - 0.9).abs() < 1e-12 && l[3] == 1.0 - 1e-4);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
        assert!(uniform_upper_density(&[], &[], &[0.9, 0.8]).is_err());
    }
}
