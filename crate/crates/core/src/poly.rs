//! Scalar and matrix polynomials in one real variable.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::numerics::CMatrix;

/// Real polynomial, constant term first.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarPoly {
    coeffs: Vec<f64>,
}

impl ScalarPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self { coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }
}

/// Polynomial with `CMatrix` coefficients, constant term first.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoly {
    dim: usize,
    coeffs: Vec<CMatrix>,
}

impl MatrixPoly {
    /// Trailing zero coefficients are dropped; an empty list is the zero polynomial.
    pub fn new(dim: usize, coeffs: Vec<CMatrix>) -> Self {
        assert!(coeffs.iter().all(|c| c.dim() == dim), "coefficient dimension mismatch");
        let mut p = Self { dim, coeffs };
        while p.coeffs.last().is_some_and(|c| c.max_abs() == 0.0) {
            p.coeffs.pop();
        }
        p
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: CMatrix) -> Self {
        Self::new(c.dim(), vec![c])
    }

    pub fn identity(dim: usize) -> Self {
        Self::constant(CMatrix::identity(dim))
    }

    /// `x^k · I`.
    pub fn monic_monomial(dim: usize, k: usize) -> Self {
        let mut coeffs = vec![CMatrix::zeros(dim); k + 1];
        coeffs[k] = CMatrix::identity(dim);
        Self { dim, coeffs }
    }

    /// `q(x) · I`.
    pub fn from_scalar(dim: usize, q: &ScalarPoly) -> Self {
        Self::new(dim, q.coeffs().iter().map(|&c| CMatrix::real_scalar(dim, c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> CMatrix {
        self.coeffs.get(k).cloned().unwrap_or_else(|| CMatrix::zeros(self.dim))
    }

    pub fn leading(&self) -> CMatrix {
        self.coeff(self.degree())
    }

    pub fn eval(&self, x: f64) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(x);
            acc += c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.dim,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(k as f64))
                .collect(),
        )
    }

    /// Coefficientwise adjoint: `F*(x) = F(x)*` for real `x`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.dim, self.coeffs.iter().map(CMatrix::adjoint).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.dim, (0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.dim, (0..len).map(|k| &self.coeff(k) - &other.coeff(k)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.dim, self.coeffs.iter().map(|c| c.scale(s)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.dim);
        }
        let mut out = vec![CMatrix::zeros(self.dim); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self::new(self.dim, out)
    }

    /// `M · F(x)`.
    pub fn left_mul(&self, m: &CMatrix) -> Self {
        Self::new(self.dim, self.coeffs.iter().map(|c| m * c).collect())
    }

    /// `F(x) · M`.
    pub fn right_mul(&self, m: &CMatrix) -> Self {
        Self::new(self.dim, self.coeffs.iter().map(|c| c * m).collect())
    }

    /// `x · F(x)`.
    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(CMatrix::zeros(self.dim));
        coeffs.extend(self.coeffs.iter().cloned());
        Self { dim: self.dim, coeffs }
    }

    /// `q(x) · F(x)` for a scalar polynomial `q`.
    pub fn mul_scalar_poly(&self, q: &ScalarPoly) -> Self {
        self.mul(&Self::from_scalar(self.dim, q))
    }

    /// Largest coefficient Frobenius norm.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(CMatrix::frobenius_norm).fold(0.0, f64::max)
    }

    pub fn is_monic(&self, tol: f64) -> bool {
        (&self.leading() - &CMatrix::identity(self.dim)).frobenius_norm() <= tol
    }
}

/// Physicists' Hermite polynomial `H_n(x)`, by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_0(x), …, H_n(x)`.
pub fn hermite_values(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(2.0 * x);
    }
    for k in 1..n {
        out.push(2.0 * x * out[k] - 2.0 * k as f64 * out[k - 1]);
    }
    out
}

/// Coefficients of `H_n` as a [`ScalarPoly`].
pub fn hermite_poly(n: usize) -> ScalarPoly {
    let two_x = ScalarPoly::new(vec![0.0, 2.0]);
    let (mut prev, mut cur) = (ScalarPoly::zero(), ScalarPoly::constant(1.0));
    for k in 0..n {
        let next = two_x.mul(&cur).add(&prev.scale(-2.0 * k as f64));
        prev = cur;
        cur = next;
    }
    cur
}

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hermite_low_orders() {
        let x = 0.37;
        assert_eq!(hermite(0, x), 1.0);
        assert_eq!(hermite(1, x), 2.0 * x);
        assert!((hermite(2, x) - (4.0 * x * x - 2.0)).abs() < 1e-15);
        assert!((hermite(3, x) - (8.0 * x * x * x - 12.0 * x)).abs() < 1e-14);
        let vals = hermite_values(6, x);
        for (n, v) in vals.iter().enumerate() {
            assert!((v - hermite(n, x)).abs() < 1e-12);
            assert!((v - hermite_poly(n).eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_derivative_lowers_degree() {
        for n in 1..8 {
            let lhs = hermite_poly(n).derivative();
            let rhs = hermite_poly(n - 1).scale(2.0 * n as f64);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn scalar_poly_calculus() {
        let v = ScalarPoly::new(vec![0.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(v.degree(), 4);
        assert_eq!(v.derivative(), ScalarPoly::new(vec![0.0, 2.0, 0.0, 4.0]));
        assert_eq!(v.eval(2.0), 20.0);
        assert!(ScalarPoly::new(vec![0.0, 0.0]).is_zero());
    }

    #[test]
    fn matrix_poly_products_evaluate_pointwise() {
        let a = MatrixPoly::new(
            2,
            vec![
                CMatrix::from_real(&[1.0, 2.0, 0.0, 1.0]),
                CMatrix::from_real(&[0.0, 1.0, 1.0, 0.0]),
            ],
        );
        let b = MatrixPoly::new(
            2,
            vec![CMatrix::from_real(&[0.5, 0.0, -1.0, 2.0]), CMatrix::identity(2)],
        );
        let prod = a.mul(&b);
        for x in [-1.0, 0.3, 2.0] {
            let err = (&prod.eval(x) - &(&a.eval(x) * &b.eval(x))).frobenius_norm();
            assert!(err < 1e-13);
        }
        assert_eq!(prod.degree(), 2);
    }

    proptest! {
        #[test]
        fn adjoint_commutes_with_evaluation(entries in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 12), x in -2.0f64..2.0) {
            let coeffs = entries
                .chunks(4)
                .map(|ch| CMatrix::from_complex(ch.iter().map(|&(a, b)| Complex64::new(a, b)).collect()))
                .collect();
            let p = MatrixPoly::new(2, coeffs);
            let err = (&p.adjoint().eval(x) - &p.eval(x).adjoint()).frobenius_norm();
            prop_assert!(err < 1e-14);
        }
    }
}
