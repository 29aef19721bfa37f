//! Simultaneous polynomial root extraction (Aberth–Ehrlich).
//!
//! The polynomial is never expanded into coefficients: callers supply the
//! Newton quotient `p(z) / p'(z)` evaluated in whatever factored or
//! partial-fraction form keeps it accurate.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) struct AberthOptions {
    pub max_iter: usize,
    /// Stop once every correction is below `tol * max(1, |z|)`.
    pub tol: f64,
}

impl Default for AberthOptions {
    fn default() -> Self {
        AberthOptions {
            max_iter: 4000,
            tol: 1e-15,
        }
    }
}

/// Initial guesses spread on a circle, rotated off the axes.
pub(crate) fn circle_guesses(count: usize, radius: f64) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / count as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect()
}

/// Runs Aberth iterations (Gauss–Seidel ordering) from `roots` in place.
///
/// Returns the number of sweeps performed. Failing to meet `tol` within
/// `max_iter` is not an error here: multiple roots converge only linearly and
/// callers validate the result by residual instead.
pub(crate) fn aberth<F>(newton: F, roots: &mut [Complex64], opts: &AberthOptions) -> Result<usize>
where
    F: Fn(Complex64) -> Complex64,
{
    let n = roots.len();
    if n == 0 {
        return Ok(0);
    }
    for sweep in 0..opts.max_iter {
        let mut converged = true;
        for k in 0..n {
            let zk = roots[k];
            let ratio = newton(zk);
            if !(ratio.re.is_finite() && ratio.im.is_finite()) {
                // partial-fraction quotients are singular exactly at a root;
                // probe nearby to tell that apart from a genuine pole
                let eta = Complex64::new(1e-9, 1e-9) * (1.0 + zk.norm());
                let probe = newton(zk + eta);
                if !(probe.norm() < 1e-6 * (1.0 + zk.norm())) {
                    roots[k] = zk + 100.0 * eta;
                    converged = false;
                }
                continue;
            }
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if j != k {
                    let diff = zk - zj;
                    if diff.norm_sqr() > 0.0 {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() > 0.0 { ratio / denom } else { ratio };
            roots[k] = zk - step;
            if step.norm() > opts.tol * zk.norm().max(1.0) {
                converged = false;
            }
        }
        if converged {
            return Ok(sweep + 1);
        }
    }
    if roots.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::numerical("Aberth iteration diverged"));
    }
    Ok(opts.max_iter)
}

/// Plain Newton polishing of a single root.
pub(crate) fn newton_polish<F>(newton: F, mut z: Complex64, steps: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    for _ in 0..steps {
        let step = newton(z);
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        let next = z - step;
        let done = step.norm() <= 1e-16 * z.norm().max(1.0);
        z = next;
        if done {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Newton quotient of a monic polynomial given by its roots.
    fn quotient(roots: Vec<Complex64>) -> impl Fn(Complex64) -> Complex64 {
        move |z| {
            let s: Complex64 = roots.iter().map(|r| (z - r).inv()).sum();
            s.inv()
        }
    }

    #[test]
    fn recovers_simple_roots() {
        let truth = vec![
            Complex64::new(0.5, 0.1),
            Complex64::new(-0.3, 0.7),
            Complex64::new(2.0, -1.0),
            Complex64::new(-4.0, 0.0),
        ];
        let mut roots = circle_guesses(4, 1.0);
        aberth(quotient(truth.clone()), &mut roots, &AberthOptions::default()).unwrap();
        for t in &truth {
            let best = roots.iter().map(|r| (r - t).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "missing root {t}: {roots:?}");
        }
    }

    #[test]
    fn double_root_converges_to_cluster() {
        let truth = vec![Complex64::new(0.2, 0.0), Complex64::new(0.2, 0.0), Complex64::new(-0.5, 0.5)];
        let mut roots = circle_guesses(3, 1.0);
        aberth(quotient(truth), &mut roots, &AberthOptions::default()).unwrap();
        let near = roots.iter().filter(|r| (*r - Complex64::new(0.2, 0.0)).norm() < 1e-6).count();
        assert_eq!(near, 2);
    }
}
