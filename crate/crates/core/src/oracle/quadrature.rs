use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::weights::MatrixWeight;

/// Gauss–Legendre points per panel.
pub const PANEL_ORDER: usize = 24;
const MAX_DOUBLINGS: usize = 12;
const MOMENT_TOL: f64 = 1e-13;

/// Composite Gauss–Legendre rule on `[−R, R]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cutoff: f64,
}

impl QuadratureRule {
    /// `panels` equal panels of [`PANEL_ORDER`] points each.
    pub fn composite(cutoff: f64, panels: usize) -> Self {
        let (ref_nodes, ref_weights) = gauss_legendre(PANEL_ORDER);
        let width = 2.0 * cutoff / panels as f64;
        let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
        let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
        for p in 0..panels {
            let mid = -cutoff + (p as f64 + 0.5) * width;
            for (t, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(mid + 0.5 * width * t);
                weights.push(0.5 * width * w);
            }
        }
        Self { nodes, weights, cutoff }
    }

    /// Doubles the panel count until the zeroth and `2n_max`-th matrix moments settle.
    pub fn build<W: MatrixWeight + ?Sized>(w: &W, n_max: usize) -> Result<Self> {
        let cutoff = w.cutoff(n_max);
        let mut panels = (libm::ceil(cutoff) as usize).max(4);
        let mut rule = Self::composite(cutoff, panels);
        let mut moments = rule.moments(w, n_max);
        for _ in 0..MAX_DOUBLINGS {
            panels *= 2;
            let next = Self::composite(cutoff, panels);
            let next_moments = next.moments(w, n_max);
            let change = moments
                .iter()
                .zip(&next_moments)
                .map(|(a, b)| (a - b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            rule = next;
            moments = next_moments;
            if change < MOMENT_TOL {
                return Ok(rule);
            }
        }
        Err(Error::QuadratureNotConverged {
            doublings: MAX_DOUBLINGS,
        })
    }

    fn moments<W: MatrixWeight + ?Sized>(&self, w: &W, n_max: usize) -> [CMatrix; 2] {
        let mut m0 = CMatrix::zeros(w.dim());
        let mut m2 = CMatrix::zeros(w.dim());
        for (&x, &q) in self.nodes.iter().zip(&self.weights) {
            let wx = w.eval(x).scale(q);
            m2 += &wx.scale(libm::pow(x, (2 * n_max) as f64));
            m0 += &wx;
        }
        [m0, m2]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `q_i · W(x_i)` at every node.
    pub fn weighted_values<W: MatrixWeight + ?Sized>(&self, w: &W) -> Vec<CMatrix> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &q)| w.eval(x).scale(q))
            .collect()
    }
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[−1, 1]`,
/// by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::CMatrix;
    use crate::poly::ScalarPoly;
    use crate::weights::ExponentialWeight;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(PANEL_ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in 0..(2 * PANEL_ORDER) {
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((approx - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn gaussian_moments() {
        let w = ExponentialWeight::new(ScalarPoly::monomial(2), CMatrix::zeros(1), None).unwrap();
        let rule = QuadratureRule::build(&w, 10).unwrap();
        let m0 = rule.integrate(|x| (-x * x).exp());
        let m1 = rule.integrate(|x| x * (-x * x).exp());
        let m2 = rule.integrate(|x| x * x * (-x * x).exp());
        assert!((m0 - SQRT_PI).abs() < 1e-13 * SQRT_PI);
        assert!(m1.abs() < 1e-15);
        assert!((m2 - SQRT_PI / 2.0).abs() < 1e-13 * SQRT_PI);
    }
}
