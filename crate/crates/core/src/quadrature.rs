//! Quadrature helpers on top of Gauss–Legendre rules.

use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Gauss–Legendre rule with `n` nodes, stored as `(node, weight)` on `[-1, 1]`.
#[derive(Debug, Clone)]
pub(crate) struct Rule {
    pairs: Vec<(f64, f64)>,
}

impl Rule {
    pub fn new(n: usize) -> Self {
        let n = NonZeroUsize::new(n.max(1)).expect("nonzero");
        let pairs = GaussLegendre::new(n)
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (x, w))
            .collect();
        Rule { pairs }
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.pairs.iter().map(move |&(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn composite(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

/// Mean of a `2π`-periodic function by the `n`-point trapezoid rule.
pub(crate) fn circle_mean(n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    (0..n).map(|k| f(TAU * k as f64 / n as f64)).sum::<f64>() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_low_degree_polynomials() {
        let rule = Rule::new(5);
        let v = rule.integrate(0.0, 2.0, |x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-10);
    }

    #[test]
    fn composite_matches_closed_form() {
        let v = Rule::new(8).composite(0.0, 3.0, 4, f64::exp);
        assert!((v - (3f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_is_spectral_for_trig_polynomials() {
        let m = circle_mean(16, |t| (3.0 * t).cos().powi(2) + t.sin());
        assert!((m - 0.5).abs() < 1e-15);
    }
}
