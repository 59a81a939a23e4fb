//! Fast path for the Hermite-type weights `e^{−x²} L(x) L(x)*` with
//! `L(x)_{jk} = H_{j−k}(x)/(j−k)! · α_j/α_k`.
//!
//! The norms come from a closed form for `H(0)` and a one-step recursion, the
//! polynomials from the fact that every entry of `Q(x,n) = e^{−x²/2} P(x,n) L(x)` is a
//! multiple `ξ(n,j,k)` of the Hermite function of order `n + j − k`. No quadrature
//! is involved except for the optional cross-check of `H(0)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::differential::DifferentialOperator;
use crate::error::{Error, Result};
use crate::numerics::{cholesky, relative_residual, unit_lower_inverse, CMatrix, Residual};
use crate::op_algebra::DiffOp;
use crate::oracle::{MvopFamily, QuadratureRule};
use crate::poly::{c, factorial, hermite_poly, hermite_values, MatrixPoly};
use crate::weights::{alpha_ladder_matrix, check_alpha, hermite_alpha_weight, number_matrix};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const H0_TOL: f64 = 1e-10;

/// `H(0)_{jj} = √π 2^j α_j² Σ_{ℓ≤j} 2^{−ℓ}/((j−ℓ)! α_ℓ²)` (1-based `j`, `ℓ`).
///
/// With a rule, the value is compared against `∫ W` and a relative mismatch
/// above `1e−10` is an error.
pub fn h0_closed_form(alpha: &[f64], rule: Option<&QuadratureRule>) -> Result<CMatrix> {
    check_alpha(alpha)?;
    let n = alpha.len();
    let diag: Vec<f64> = (1..=n)
        .map(|j| {
            let sum: f64 = (1..=j)
                .map(|l| libm::ldexp(1.0, -(l as i32)) / (factorial(j - l) * alpha[l - 1] * alpha[l - 1]))
                .sum();
            SQRT_PI * libm::ldexp(1.0, j as i32) * alpha[j - 1] * alpha[j - 1] * sum
        })
        .collect();
    let h0 = CMatrix::diag(&diag);
    if let Some(rule) = rule {
        let w = hermite_alpha_weight(alpha)?;
        let mut integral = CMatrix::zeros(n);
        for v in rule.weighted_values(&w) {
            integral += &v;
        }
        let error = relative_residual(&(&integral - &h0), &[&h0]);
        if error > H0_TOL {
            return Err(Error::ClosedFormMismatch { error });
        }
    }
    Ok(h0)
}

/// `H(0..=n_max)` from
/// `H(n+1) = ½H + H H(n−1)⁻¹ H − ¼ H A* H⁻¹ A H + ¼ A H A*`, `H = H(n)`,
/// where the middle term is absent for `n = 0`.
pub fn norm_recursion(h0: &CMatrix, a: &CMatrix, n_max: usize) -> Result<Vec<CMatrix>> {
    cholesky(h0)?;
    let a_star = a.adjoint();
    let mut h = Vec::with_capacity(n_max + 1);
    h.push(h0.clone());
    for n in 0..n_max {
        let cur = &h[n];
        let cur_inv = cur.inverse()?;
        let mut next = cur.scale(0.5);
        if n > 0 {
            next += &(&(cur * &h[n - 1].inverse()?) * cur);
        }
        next -= &(&(&(&(cur * &a_star) * &cur_inv) * a) * cur).scale(0.25);
        next += &(&(a * cur) * &a_star).scale(0.25);
        // exact arithmetic keeps it Hermitian; rounding does not
        let next = (&next + &next.adjoint()).scale(0.5);
        cholesky(&next)?;
        h.push(next);
    }
    Ok(h)
}

/// `B(n) = ½(A + H(n)A*H(n)⁻¹ − t)` and `C(n) = H(n)H(n−1)⁻¹`, `C(0) = 0`.
pub fn recurrence_from_norms(h: &[CMatrix], a: &CMatrix, t: f64) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    let dim = a.dim();
    let a_star = a.adjoint();
    let shift = CMatrix::real_scalar(dim, t);
    let mut b = Vec::with_capacity(h.len());
    let mut cs = Vec::with_capacity(h.len());
    for (n, hn) in h.iter().enumerate() {
        let inv = hn.inverse()?;
        b.push((&(a + &(&(hn * &a_star) * &inv)) - &shift).scale(0.5));
        cs.push(if n == 0 {
            CMatrix::zeros(dim)
        } else {
            hn * &h[n - 1].inverse()?
        });
    }
    Ok((b, cs))
}

/// The constants `ξ(n,j,k)` of one degree (0-based `j`, `k` here).
#[derive(Clone, Debug, PartialEq)]
pub struct XiTable {
    n: usize,
    dim: usize,
    values: Vec<f64>,
}

impl XiTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.dim + k]
    }

    /// Order `n + j − k` of the Hermite function in entry `(j, k)`, if any.
    pub fn order(&self, j: usize, k: usize) -> Option<usize> {
        (self.n + j).checked_sub(k)
    }

    fn set(&mut self, j: usize, k: usize, v: f64) {
        self.values[j * self.dim + k] = v;
    }
}

/// `ξ(n,·,·)` from the last-row boundary values, run downward in `j`.
///
/// Only the diagonals of `h[n]`, `h[n−1]` are read. For `n = 0` the table is
/// `ξ(0,j,k) = α_j/((j−k)! α_k)`.
pub fn xi_table(alpha: &[f64], h: &[CMatrix], n: usize) -> Result<XiTable> {
    let dim = alpha.len();
    let mut xi = XiTable {
        n,
        dim,
        values: vec![0.0; dim * dim],
    };
    if n == 0 {
        for j in 0..dim {
            for k in 0..=j {
                xi.set(j, k, alpha[j] / (factorial(j - k) * alpha[k]));
            }
        }
        return Ok(xi);
    }
    if n >= h.len() {
        return Err(Error::OutOfRange {
            index: n,
            n_max: h.len().saturating_sub(1),
        });
    }
    let last = dim - 1;
    for k in 0..dim {
        xi.set(
            last,
            k,
            libm::ldexp(1.0, -(n as i32)) * alpha[last] / (factorial(last - k) * alpha[k]),
        );
    }
    let hn = |j: usize| h[n][(j, j)].re;
    let hp = |j: usize| h[n - 1][(j, j)].re;
    for j in (1..dim).rev() {
        let ratio = alpha[j - 1] / alpha[j];
        for k in 0..dim {
            // entry (j−1, k) carries order m − 1; nothing to fill when that is negative
            let m = n as i64 + j as i64 - k as i64;
            if m <= 0 {
                continue;
            }
            let mf = m as f64;
            let mut coeff = ratio * mf - 2.0 * ratio * hn(j) / hp(j);
            let mut v = 0.0;
            if j < last {
                let up = alpha[j + 1] / alpha[j];
                coeff += 2.0 * ratio * up * up * hn(j) / hn(j + 1);
                v -= 2.0 * (mf + 1.0) * ratio * up * hn(j) / hn(j + 1) * xi.get(j + 1, k);
            }
            v += coeff * xi.get(j, k);
            xi.set(j - 1, k, v);
        }
    }
    Ok(xi)
}

/// `e^{x²/2} Q(x,n)`, entry `(j,k)` being `ξ(n,j,k) H_{n+j−k}(x)`.
fn scaled_q(xi: &XiTable, x: f64) -> CMatrix {
    let dim = xi.dim();
    let hv = hermite_values(xi.n() + dim, x);
    CMatrix::from_fn(dim, |j, k| match xi.order(j, k) {
        Some(m) => c(xi.get(j, k) * hv[m]),
        None => c(0.0),
    })
}

/// `P(x,n) = Q(x,n) L(x)⁻¹ e^{x²/2}`.
pub fn assemble_p(xi: &XiTable, alpha: &[f64], x: f64) -> Result<CMatrix> {
    let l_inv = unit_lower_inverse(&crate::weights::alpha_lower_factor(alpha, x))?;
    Ok(&scaled_q(xi, x) * &l_inv)
}

/// `L(x)` as a matrix polynomial.
pub fn lower_factor_poly(alpha: &[f64]) -> MatrixPoly {
    let dim = alpha.len();
    let hp: Vec<_> = (0..dim).map(hermite_poly).collect();
    let coeffs = (0..dim)
        .map(|d| {
            CMatrix::from_fn(dim, |j, k| {
                if j >= k {
                    c(hp[j - k].coeff(d) / factorial(j - k) * alpha[j] / alpha[k])
                } else {
                    c(0.0)
                }
            })
        })
        .collect();
    MatrixPoly::new(dim, coeffs)
}

/// Everything the fast path produces for one `α`.
#[derive(Clone, Debug)]
pub struct FastHermite {
    alpha: Vec<f64>,
    a: CMatrix,
    h: Vec<CMatrix>,
    xi: Vec<XiTable>,
}

impl FastHermite {
    pub fn new(alpha: &[f64], n_max: usize) -> Result<Self> {
        check_alpha(alpha)?;
        let a = alpha_ladder_matrix(alpha);
        let h = norm_recursion(&h0_closed_form(alpha, None)?, &a, n_max)?;
        let xi = (0..=n_max).map(|n| xi_table(alpha, &h, n)).collect::<Result<_>>()?;
        Ok(Self {
            alpha: alpha.to_vec(),
            a,
            h,
            xi,
        })
    }

    pub fn n_max(&self) -> usize {
        self.h.len() - 1
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn ladder_matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn norms(&self) -> &[CMatrix] {
        &self.h
    }

    pub fn xi(&self, n: usize) -> Result<&XiTable> {
        self.xi.get(n).ok_or(Error::OutOfRange {
            index: n,
            n_max: self.n_max(),
        })
    }

    pub fn recurrence(&self) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
        recurrence_from_norms(&self.h, &self.a, 0.0)
    }

    pub fn eval(&self, x: f64, n: usize) -> Result<CMatrix> {
        assemble_p(self.xi(n)?, &self.alpha, x)
    }
}

/// `−½P'' + P'(x − A) + PJ − (nI + J)P` at `(x, n)`.
pub fn second_order_d_check(fam: &MvopFamily, alpha: &[f64], x: f64, n: usize) -> Result<Residual> {
    let dim = alpha.len();
    let a = alpha_ladder_matrix(alpha);
    let j = number_matrix(dim);
    let d = DifferentialOperator::oscillator(&a, &j);
    let lhs = d.apply(fam.p(n)?).eval(x);
    let rhs = &(&CMatrix::real_scalar(dim, n as f64) + &j) * &fam.eval(x, n as i64)?;
    Ok(Residual::new(&lhs - &rhs, &[&lhs, &rhs]))
}

/// The difference side of `𝓒 = J − xA + ½A²`:
/// `−Aδ + (nI + J − 2C(n) − AB(n) + ½A²) + (C(n)A − 2C(n)B(n−1))δ⁻¹`.
pub fn casimir_operator(fam: &MvopFamily, a: &CMatrix) -> DiffOp {
    let dim = a.dim();
    let j = number_matrix(dim);
    let a2 = (a * a).scale(0.5);
    let b = fam.b_seq();
    let cs = fam.c_seq();
    DiffOp::from_fn(dim, -1, 1, fam.n_max(), |shift, n| match shift {
        1 => a.scale(-1.0),
        0 => {
            let mut m = &CMatrix::real_scalar(dim, n as f64) + &j;
            m -= &cs[n].scale(2.0);
            m -= &(a * &b[n]);
            &m + &a2
        }
        _ if n == 0 => CMatrix::zeros(dim),
        _ => &(&cs[n] * a) - &(&cs[n] * &b[n - 1]).scale(2.0),
    })
}

/// `P(x,n)(J − xA + ½A²)` against the difference side applied to the family.
pub fn casimir_check(fam: &MvopFamily, alpha: &[f64], x: f64, n: usize) -> Result<Residual> {
    let dim = alpha.len();
    let a = alpha_ladder_matrix(alpha);
    let j = number_matrix(dim);
    let cas = &(&j - &a.scale(x)) + &(&a * &a).scale(0.5);
    let lhs = &fam.eval(x, n as i64)? * &cas;
    let rhs = casimir_operator(fam, &a).apply(fam, x, n)?;
    Ok(Residual::new(&lhs - &rhs, &[&lhs, &rhs]))
}

/// `[φ⁻¹(𝓒), nI + J]`: its largest coefficient and its action on the family at `(x, n)`.
pub fn casimir_commutation(fam: &MvopFamily, alpha: &[f64], x: f64, n: usize) -> Result<(f64, f64)> {
    let dim = alpha.len();
    let a = alpha_ladder_matrix(alpha);
    let j = number_matrix(dim);
    let gamma = DiffOp::diagonal(dim, fam.n_max(), |m| &CMatrix::real_scalar(dim, m as f64) + &j);
    let cas = casimir_operator(fam, &a);
    let comm = cas.commutator(&gamma)?;
    let zero = DiffOp::zero(dim, comm.n_max());
    let applied = comm.apply(fam, x, n)?;
    let scale = fam.eval(x, n as i64)?.frobenius_norm().max(1.0);
    Ok((comm.max_difference(&zero)?, applied.frobenius_norm() / scale))
}

/// Residuals of the statements about `Q(x,n) = e^{−x²/2} P(x,n) L(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugationReport {
    /// `Q' + xQ` from the `ξ` table against `e^{−x²/2}(P' + PA)L` from the family
    pub lowering: f64,
    /// `−½Q_{jk}'' + ½x²Q_{jk} − (n+j−k+½)Q_{jk}`, worst entry
    pub schrodinger: f64,
    /// the first-order equation for `Q` with coefficients from the norms
    pub first_order: f64,
}

impl ConjugationReport {
    pub fn max(&self) -> f64 {
        self.lowering.max(self.schrodinger).max(self.first_order)
    }
}

/// All three checks at `(x, n)`, with `Q` built from the family. Everything is
/// computed with the common factor `e^{−x²/2}` removed.
pub fn conjugation_checks(fam: &MvopFamily, alpha: &[f64], x: f64, n: usize) -> Result<ConjugationReport> {
    let dim = alpha.len();
    let a = alpha_ladder_matrix(alpha);
    let j = number_matrix(dim);

    // R = e^{x²/2} Q = P L
    let r = fam.p(n)?.mul(&lower_factor_poly(alpha));
    let r1 = r.derivative();
    let r2 = r1.derivative();
    let (rv, r1v, r2v) = (r.eval(x), r1.eval(x), r2.eval(x));

    // (i): e^{x²/2}(Q' + xQ) = R'; the ξ table gives it through H_m' = 2mH_{m−1}
    let xi = xi_table(alpha, fam.norms(), n)?;
    let hv = hermite_values(n + dim, x);
    let from_xi = CMatrix::from_fn(dim, |jj, k| match xi.order(jj, k) {
        Some(m) if m > 0 => c(xi.get(jj, k) * 2.0 * m as f64 * hv[m - 1]),
        _ => c(0.0),
    });
    let p = fam.eval(x, n as i64)?;
    let dp = fam.eval_derivative(x, n as i64)?;
    let conj = &(&dp + &(&p * &a)) * &crate::weights::alpha_lower_factor(alpha, x);
    let lowering = relative_residual(&(&from_xi - &conj), &[&from_xi, &conj]);

    // (ii): e^{x²/2}(−½Q'' + ½x²Q) = −½R'' + xR' + ½R
    let mut schrodinger: f64 = 0.0;
    for jj in 0..dim {
        for k in 0..dim {
            let lhs = -0.5 * r2v[(jj, k)] + r1v[(jj, k)] * x + rv[(jj, k)] * 0.5;
            let energy = n as f64 + jj as f64 - k as f64 + 0.5;
            let rhs = rv[(jj, k)] * energy;
            let scale = lhs.norm().max(rhs.norm()).max(1.0);
            schrodinger = schrodinger.max((lhs - rhs).norm() / scale);
        }
    }

    // (iii): QJ = (nI + J − ½xA − ½K(x − A) − 2C)Q + ½(A − K)Q', K = H A* H⁻¹
    let h = fam.h(n)?;
    let k = &(h * &a.adjoint()) * &h.inverse()?;
    let cn = fam.c(n)?;
    let id = CMatrix::identity(dim);
    let mut coeff = &CMatrix::real_scalar(dim, n as f64) + &j;
    coeff -= &a.scale(0.5 * x);
    coeff -= &(&k * &(&id.scale(x) - &a)).scale(0.5);
    coeff -= &cn.scale(2.0);
    let dq = &r1v - &rv.scale(x);
    let lhs = &rv * &j;
    let t1 = &coeff * &rv;
    let t2 = &(&a - &k).scale(0.5) * &dq;
    let first_order = relative_residual(&(&(&lhs - &t1) - &t2), &[&lhs, &t1, &t2]);

    Ok(ConjugationReport {
        lowering,
        schrodinger,
        first_order,
    })
}

/// `[D,𝓓] − 𝓓`, `[D,𝓓†] + 𝓓†`, `[𝓓,𝓓†] + 2` applied to `samples` on `grid`, worst case.
pub fn oscillator_brackets(alpha: &[f64], samples: &[MatrixPoly], grid: &[f64]) -> f64 {
    let dim = alpha.len();
    let a = alpha_ladder_matrix(alpha);
    let d = DifferentialOperator::lowering(&a);
    let dd = DifferentialOperator::raising(&a, &crate::poly::ScalarPoly::monomial(2));
    let osc = DifferentialOperator::oscillator(&a, &number_matrix(dim));
    let minus_two = DifferentialOperator::scalar(dim, &crate::poly::ScalarPoly::constant(-2.0));
    let pairs = [
        (osc.commutator(&d), d.clone()),
        (osc.commutator(&dd), dd.scale(-1.0)),
        (d.commutator(&dd), minus_two),
    ];
    let mut worst: f64 = 0.0;
    for (lhs, rhs) in &pairs {
        for s in samples {
            for &x in grid {
                worst = worst.max(lhs.action_residual(rhs, s, x));
            }
        }
    }
    worst
}
