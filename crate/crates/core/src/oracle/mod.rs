//! Ground truth: monic matrix orthogonal polynomials by quadrature and Gram–Schmidt.

mod quadrature;

use alloc::vec::Vec;

pub use quadrature::{gauss_legendre, QuadratureRule, PANEL_ORDER};

use crate::error::{Error, Result};
use crate::numerics::{cholesky, relative_residual, CMatrix};
use crate::poly::MatrixPoly;
use crate::weights::MatrixWeight;

/// Largest `n_max` accepted by [`gram_schmidt_family`].
///
/// Double precision keeps the Gram–Schmidt family accurate well past the
/// desk-scale range used by the identity checks; beyond this the quadrature
/// window and the norm growth make the results untrustworthy.
pub const DEGREE_BUDGET: usize = 30;

/// `⟨F, G⟩ = ∫ F(y) W(y) G(y)* dy`.
pub fn inner_product<W: MatrixWeight + ?Sized>(
    f: &MatrixPoly,
    g: &MatrixPoly,
    w: &W,
    rule: &QuadratureRule,
) -> CMatrix {
    let mut acc = CMatrix::zeros(w.dim());
    for (&x, &q) in rule.nodes().iter().zip(rule.weights()) {
        acc += &(&(&f.eval(x) * &w.eval(x)) * &g.eval(x).adjoint()).scale(q);
    }
    acc
}

/// Monic family `P(x,0..=n_max+1)` with norms and recurrence coefficients.
#[derive(Clone, Debug)]
pub struct MvopFamily {
    dim: usize,
    n_max: usize,
    rule: QuadratureRule,
    weighted: Vec<CMatrix>,
    p: Vec<MatrixPoly>,
    h: Vec<CMatrix>,
    b: Vec<CMatrix>,
    c: Vec<CMatrix>,
}

/// Degree-by-degree orthogonalization.
///
/// Each new polynomial starts from `x·P(x,n−1)` rather than `x^n I`: the two span
/// the same space modulo lower degrees, and the former keeps the projections small.
/// Two projection sweeps are made against every earlier polynomial.
pub fn gram_schmidt_family<W: MatrixWeight + ?Sized>(w: &W, n_max: usize) -> Result<MvopFamily> {
    if n_max > DEGREE_BUDGET {
        return Err(Error::DegreeBudget {
            requested: n_max,
            budget: DEGREE_BUDGET,
        });
    }
    let dim = w.dim();
    let rule = QuadratureRule::build(w, n_max + 1)?;
    let weighted = rule.weighted_values(w);
    let nodes = rule.nodes().to_vec();

    let top = n_max + 1;
    let mut p: Vec<MatrixPoly> = Vec::with_capacity(top + 1);
    let mut vals: Vec<Vec<CMatrix>> = Vec::with_capacity(top + 1);
    let mut h: Vec<CMatrix> = Vec::with_capacity(top + 1);
    let mut h_inv: Vec<CMatrix> = Vec::with_capacity(top + 1);

    let ip = |a: &[CMatrix], b: &[CMatrix]| -> CMatrix {
        let mut acc = CMatrix::zeros(dim);
        for ((fa, wq), fb) in a.iter().zip(&weighted).zip(b) {
            acc += &(&(fa * wq) * &fb.adjoint());
        }
        acc
    };

    for n in 0..=top {
        let mut poly = if n == 0 {
            MatrixPoly::identity(dim)
        } else {
            p[n - 1].mul_x()
        };
        let mut pv: Vec<CMatrix> = nodes.iter().map(|&x| poly.eval(x)).collect();
        for _sweep in 0..2 {
            for m in 0..n {
                let coef = &ip(&pv, &vals[m]) * &h_inv[m];
                poly = poly.sub(&p[m].left_mul(&coef));
                for (v, vm) in pv.iter_mut().zip(&vals[m]) {
                    *v -= &(&coef * vm);
                }
            }
        }
        // Re-evaluate from coefficients so stored values and polynomial agree exactly.
        let pv: Vec<CMatrix> = nodes.iter().map(|&x| poly.eval(x)).collect();
        let raw = ip(&pv, &pv);
        let hn = (&raw + &raw.adjoint()).scale(0.5);
        if cholesky(&hn).is_err() || !hn.is_finite() {
            return Err(Error::ConditioningExhausted { degree: n });
        }
        h_inv.push(hn.inverse().map_err(|_| Error::ConditioningExhausted { degree: n })?);
        h.push(hn);
        p.push(poly);
        vals.push(pv);
    }

    let x_coeff = |n: usize| -> CMatrix {
        if n == 0 {
            CMatrix::zeros(dim)
        } else {
            p[n].coeff(n - 1)
        }
    };
    let b: Vec<CMatrix> = (0..=n_max).map(|n| &x_coeff(n) - &x_coeff(n + 1)).collect();
    let c: Vec<CMatrix> = (0..=n_max)
        .map(|n| {
            if n == 0 {
                CMatrix::zeros(dim)
            } else {
                &h[n] * &h_inv[n - 1]
            }
        })
        .collect();

    Ok(MvopFamily {
        dim,
        n_max,
        rule,
        weighted,
        p,
        h,
        b,
        c,
    })
}

impl MvopFamily {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest `n` with `B(n)`, `C(n)` tabulated. `P` and `H` go one further.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    fn check(&self, n: usize, top: usize) -> Result<()> {
        if n > top {
            return Err(Error::OutOfRange { index: n, n_max: top });
        }
        Ok(())
    }

    pub fn p(&self, n: usize) -> Result<&MatrixPoly> {
        self.check(n, self.n_max + 1)?;
        Ok(&self.p[n])
    }

    pub fn h(&self, n: usize) -> Result<&CMatrix> {
        self.check(n, self.n_max + 1)?;
        Ok(&self.h[n])
    }

    pub fn b(&self, n: usize) -> Result<&CMatrix> {
        self.check(n, self.n_max)?;
        Ok(&self.b[n])
    }

    pub fn c(&self, n: usize) -> Result<&CMatrix> {
        self.check(n, self.n_max)?;
        Ok(&self.c[n])
    }

    /// One-but-leading coefficient `X(n)` of `P(x,n)`.
    pub fn x_coeff(&self, n: usize) -> Result<CMatrix> {
        let p = self.p(n)?;
        Ok(if n == 0 {
            CMatrix::zeros(self.dim)
        } else {
            p.coeff(n - 1)
        })
    }

    pub fn norms(&self) -> &[CMatrix] {
        &self.h
    }

    pub fn b_seq(&self) -> &[CMatrix] {
        &self.b
    }

    pub fn c_seq(&self) -> &[CMatrix] {
        &self.c
    }

    pub fn polys(&self) -> &[MatrixPoly] {
        &self.p
    }

    /// `P(x,n)`, with `P(x,n) = 0` for negative `n`.
    pub fn eval(&self, x: f64, n: i64) -> Result<CMatrix> {
        if n < 0 {
            return Ok(CMatrix::zeros(self.dim));
        }
        Ok(self.p(n as usize)?.eval(x))
    }

    /// `P'(x,n)`, zero for negative `n`.
    pub fn eval_derivative(&self, x: f64, n: i64) -> Result<CMatrix> {
        if n < 0 {
            return Ok(CMatrix::zeros(self.dim));
        }
        Ok(self.p(n as usize)?.derivative().eval(x))
    }

    /// `⟨F, G⟩` with the cached weight values; exact for `deg F + deg G ≤ 2n_max + 2`.
    pub fn inner(&self, f: &MatrixPoly, g: &MatrixPoly) -> CMatrix {
        self.inner_with(|x| f.eval(x), |x| g.eval(x))
    }

    /// `∫ f(y) W(y) g(y)* dy` for arbitrary matrix functions `f`, `g`.
    pub fn inner_with(&self, f: impl Fn(f64) -> CMatrix, g: impl Fn(f64) -> CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim);
        for (&x, wq) in self.rule.nodes().iter().zip(&self.weighted) {
            acc += &(&(&f(x) * wq) * &g(x).adjoint());
        }
        acc
    }

    /// `max_{m<n≤n_max} ‖⟨P_n,P_m⟩‖ / ‖H(n)‖`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 1..=self.n_max {
            for m in 0..n {
                let g = self.inner(&self.p[n], &self.p[m]);
                worst = worst.max(g.frobenius_norm() / self.h[n].frobenius_norm());
            }
        }
        worst
    }

    /// Relative residual of `xP_n − P_{n+1} − B(n)P_n − C(n)P_{n−1}` at `x`.
    pub fn recurrence_residual(&self, x: f64, n: usize) -> Result<f64> {
        let pn = self.eval(x, n as i64)?;
        let xp = pn.scale(x);
        let next = self.eval(x, n as i64 + 1)?;
        let bp = self.b(n)? * &pn;
        let cp = self.c(n)? * &self.eval(x, n as i64 - 1)?;
        let r = &(&(&xp - &next) - &bp) - &cp;
        Ok(relative_residual(&r, &[&xp, &next, &bp, &cp]))
    }

    /// Christoffel–Darboux at `(x, y)` and degree `n ≥ 1`:
    /// `(x−y) Σ_{k<n} P(y,k)* H(k)⁻¹ P(x,k)` against
    /// `P(y,n−1)* H(n−1)⁻¹ P(x,n) − P(y,n)* H(n−1)⁻¹ P(x,n−1)`.
    pub fn christoffel_darboux_residual(&self, x: f64, y: f64, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "Christoffel–Darboux needs n ≥ 1",
            });
        }
        let mut kernel = CMatrix::zeros(self.dim);
        for k in 0..n {
            let hk = self.h(k)?.inverse()?;
            kernel += &(&(&self.eval(y, k as i64)?.adjoint() * &hk) * &self.eval(x, k as i64)?);
        }
        let lhs = kernel.scale(x - y);
        let h_prev = self.h(n - 1)?.inverse()?;
        let t1 = &(&self.eval(y, n as i64 - 1)?.adjoint() * &h_prev) * &self.eval(x, n as i64)?;
        let t2 = &(&self.eval(y, n as i64)?.adjoint() * &h_prev) * &self.eval(x, n as i64 - 1)?;
        let rhs = &t1 - &t2;
        Ok(relative_residual(&(&lhs - &rhs), &[&lhs, &t1, &t2]))
    }

    /// Restrict to a smaller `n_max` (keeps the same quadrature).
    pub fn truncate(&self, n_max: usize) -> Result<Self> {
        self.check(n_max, self.n_max)?;
        let mut out = self.clone();
        out.n_max = n_max;
        out.p.truncate(n_max + 2);
        out.h.truncate(n_max + 2);
        out.b.truncate(n_max + 1);
        out.c.truncate(n_max + 1);
        Ok(out)
    }

    /// `B(n)` and `C(n)` as real numbers for scalar families.
    pub fn scalar_recurrence(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.dim != 1 {
            return None;
        }
        Some((
            self.b.iter().map(|m| m[(0, 0)].re).collect(),
            self.c.iter().map(|m| m[(0, 0)].re).collect(),
        ))
    }
}
