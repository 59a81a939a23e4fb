//! Matrix differential operators acting on matrix polynomials from the right.
//!
//! `F·D = Σ_j ∂^j(F) · D_j(x)`; products compose left to right, so
//! `F·(D E) = (F·D)·E`.

use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::{relative_residual, CMatrix};
use crate::poly::{MatrixPoly, ScalarPoly};

#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialOperator {
    dim: usize,
    // coeffs[j] multiplies the j-th derivative
    coeffs: Vec<MatrixPoly>,
}

impl DifferentialOperator {
    pub fn new(dim: usize, coeffs: Vec<MatrixPoly>) -> Self {
        assert!(coeffs.iter().all(|c| c.dim() == dim), "coefficient dimension mismatch");
        let mut op = Self { dim, coeffs };
        while op.coeffs.last().is_some_and(MatrixPoly::is_zero) {
            op.coeffs.pop();
        }
        op
    }

    /// Multiplication by `M(x)` on the right.
    pub fn multiplication(m: MatrixPoly) -> Self {
        Self::new(m.dim(), vec![m])
    }

    /// Multiplication by the scalar `q(x)`.
    pub fn scalar(dim: usize, q: &ScalarPoly) -> Self {
        Self::multiplication(MatrixPoly::from_scalar(dim, q))
    }

    /// `∂ + A`.
    pub fn lowering(a: &CMatrix) -> Self {
        let dim = a.dim();
        Self::new(dim, vec![MatrixPoly::constant(a.clone()), MatrixPoly::identity(dim)])
    }

    /// `−∂ − A + v'(x)`.
    pub fn raising(a: &CMatrix, v: &ScalarPoly) -> Self {
        let dim = a.dim();
        let zeroth = MatrixPoly::from_scalar(dim, &v.derivative()).sub(&MatrixPoly::constant(a.clone()));
        Self::new(dim, vec![zeroth, MatrixPoly::identity(dim).scale(-1.0)])
    }

    /// `−½∂² + ∂(x − A) + J`.
    pub fn oscillator(a: &CMatrix, j: &CMatrix) -> Self {
        let dim = a.dim();
        let first = MatrixPoly::new(dim, vec![a.scale(-1.0), CMatrix::identity(dim)]);
        Self::new(
            dim,
            vec![
                MatrixPoly::constant(j.clone()),
                first,
                MatrixPoly::identity(dim).scale(-0.5),
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[MatrixPoly] {
        &self.coeffs
    }

    fn coeff(&self, j: usize) -> MatrixPoly {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| MatrixPoly::zero(self.dim))
    }

    /// `F·D`.
    pub fn apply(&self, f: &MatrixPoly) -> MatrixPoly {
        let mut out = MatrixPoly::zero(self.dim);
        let mut deriv = f.clone();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                deriv = deriv.derivative();
            }
            out = out.add(&deriv.mul(c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.dim, (0..len).map(|j| self.coeff(j).add(&other.coeff(j))).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.dim, self.coeffs.iter().map(|c| c.scale(s)).collect())
    }

    /// `D E` with `F·(D E) = (F·D)·E`.
    ///
    /// `(Σ_j ∂^j D_j)·E = Σ_k ∂^k(Σ_j F^{(j)} D_j) E_k`, expanded by Leibniz.
    pub fn compose(&self, other: &Self) -> Self {
        let len = self.coeffs.len() + other.coeffs.len();
        let mut out = vec![MatrixPoly::zero(self.dim); len.max(1)];
        for (k, e) in other.coeffs.iter().enumerate() {
            for (j, d) in self.coeffs.iter().enumerate() {
                let mut d_deriv = d.clone();
                // i derivatives land on F, k − i on D_j
                let mut derivs = Vec::with_capacity(k + 1);
                for _ in 0..=k {
                    derivs.push(d_deriv.clone());
                    d_deriv = d_deriv.derivative();
                }
                for i in 0..=k {
                    let term = derivs[k - i].mul(e).scale(binomial(k, i));
                    out[j + i] = out[j + i].add(&term);
                }
            }
        }
        Self::new(self.dim, out)
    }

    /// `D E − E D`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    /// Largest coefficient norm; zero exactly for the zero operator.
    pub fn size(&self) -> f64 {
        self.coeffs.iter().map(MatrixPoly::coeff_norm).fold(0.0, f64::max)
    }

    /// Residual of `F·D − F·E` at `x`, relative to the two sides.
    pub fn action_residual(&self, other: &Self, f: &MatrixPoly, x: f64) -> f64 {
        let lhs = self.apply(f).eval(x);
        let rhs = other.apply(f).eval(x);
        relative_residual(&(&lhs - &rhs), &[&lhs, &rhs])
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{alpha_ladder_matrix, number_matrix};
    use crate::Complex64;

    fn sample_poly(dim: usize, deg: usize) -> MatrixPoly {
        MatrixPoly::new(
            dim,
            (0..=deg)
                .map(|k| {
                    CMatrix::from_fn(dim, |i, j| {
                        Complex64::new(0.3 * (i + 2 * j + k) as f64 - 0.7, 0.1 * (k + i) as f64)
                    })
                })
                .collect(),
        )
    }

    #[test]
    fn composition_is_sequential_application() {
        let a = CMatrix::from_real(&[0.0, 0.0, 1.3, 0.0]);
        let v = ScalarPoly::new(vec![0.0, 0.2, 1.0, 0.0, 0.5]);
        let d = DifferentialOperator::lowering(&a);
        let dd = DifferentialOperator::raising(&a, &v);
        let osc = DifferentialOperator::oscillator(&a, &number_matrix(2));
        let f = sample_poly(2, 4);
        for (s, t) in [(&d, &dd), (&dd, &osc), (&osc, &d)] {
            let seq = t.apply(&s.apply(&f));
            let composed = s.compose(t).apply(&f);
            assert!(seq.sub(&composed).coeff_norm() < 1e-12);
        }
    }

    #[test]
    fn raising_plus_lowering_is_potential_derivative() {
        let a = CMatrix::from_real(&[0.0, 0.0, 2.0, 0.0]);
        let v = ScalarPoly::new(vec![0.0, 0.0, 1.0, 0.0, 1.0]);
        let sum = DifferentialOperator::lowering(&a).add(&DifferentialOperator::raising(&a, &v));
        assert_eq!(sum, DifferentialOperator::scalar(2, &v.derivative()));
    }

    #[test]
    fn oscillator_brackets() {
        for n in 1..=4 {
            let alpha: Vec<f64> = (0..n).map(|k| 1.0 + 0.3 * k as f64).collect();
            let a = alpha_ladder_matrix(&alpha);
            let d = DifferentialOperator::lowering(&a);
            let dd = DifferentialOperator::raising(&a, &ScalarPoly::monomial(2));
            let osc = DifferentialOperator::oscillator(&a, &number_matrix(n));
            assert!(osc.commutator(&d).sub(&d).size() < 1e-12);
            assert!(osc.commutator(&dd).add(&dd).size() < 1e-12);
            assert!(
                d.commutator(&dd)
                    .add(&DifferentialOperator::scalar(n, &ScalarPoly::constant(2.0)))
                    .size()
                    < 1e-12
            );
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(5, 5), 1.0);
    }
}
