//! The other classical form of the ladder relation, `P'(x,n) = F(x,n)P(x,n) − E(x,n)P(x,n−1)`,
//! with `E`, `F` given as integrals against the divided difference of the Pearson
//! polynomial `V` (where `W' = −WV`), and its comparison with the difference-operator form.

use crate::error::Result;
use crate::numerics::{CMatrix, Residual};
use crate::oracle::MvopFamily;
use crate::poly::MatrixPoly;
use crate::weights::ExponentialWeight;

/// `ρ(x) = W(x)⁻¹ Ã W(x)`, computed without the scalar factor `e^{−v}`.
pub fn rho(w: &ExponentialWeight, x: f64) -> Result<CMatrix> {
    let wt = w.eval_unscaled(x);
    (w.ladder_matrix() * &wt).left_div(&wt)
}

/// `(V(x) − V(y))/(x − y)` as a polynomial in `y`: the coefficient of `y^j` is
/// `Σ_{m>j} V_m x^{m−1−j}`.
pub fn divided_difference(v: &MatrixPoly, x: f64) -> MatrixPoly {
    let dim = v.dim();
    let deg = v.degree();
    let coeffs = (0..deg)
        .map(|j| {
            // Horner in x over m = deg, …, j+1
            let mut acc = CMatrix::zeros(dim);
            for m in (j + 1..=deg).rev() {
                acc = &acc.scale(x) + &v.coeff(m);
            }
            acc
        })
        .collect();
    MatrixPoly::new(dim, coeffs)
}

/// `E(x,n)`, `F(x,n)` from
/// `E·H(n−1) = −∫P(y,n)W(y)D(x,y)P(y,n)* dy`, `F·H(n−1) = −∫P(y,n)W(y)D(x,y)P(y,n−1)* dy`,
/// `D = (V(x) − V(y))/(x − y)`, on the family's quadrature. Needs `n ≥ 1`.
pub fn ef_coefficients(fam: &MvopFamily, v: &MatrixPoly, x: f64, n: usize) -> Result<(CMatrix, CMatrix)> {
    let d_adj = divided_difference(v, x).adjoint();
    let pn = fam.p(n)?;
    let prev = fam.p(n - 1)?;
    let h_inv = fam.h(n - 1)?.inverse()?;
    // ∫ P W D Q* = ⟨P, Q D*⟩
    let e = &fam.inner(pn, &pn.mul(&d_adj)).scale(-1.0) * &h_inv;
    let f = &fam.inner(pn, &prev.mul(&d_adj)).scale(-1.0) * &h_inv;
    Ok((e, f))
}

/// `P'(x,n) − F(x,n)P(x,n) + E(x,n)P(x,n−1)`.
pub fn ef_ladder_residual(fam: &MvopFamily, e: &CMatrix, f: &CMatrix, x: f64, n: usize) -> Result<Residual> {
    let dp = fam.eval_derivative(x, n as i64)?;
    let fp = f * &fam.eval(x, n as i64)?;
    let ep = e * &fam.eval(x, n as i64 - 1)?;
    Ok(Residual::new(&(&dp - &fp) + &ep, &[&dp, &fp, &ep]))
}

/// Closed forms for the Hermite-type weights with quadratic `V`:
/// `F = −K`, `E = −xK − nI + ½KA + ½H(n)A*²H(n−1)⁻¹`, `K = H(n)A*H(n−1)⁻¹`.
pub fn hermite_pearson_ef_closed(h: &[CMatrix], a: &CMatrix, x: f64, n: usize) -> Result<(CMatrix, CMatrix)> {
    let a_star = a.adjoint();
    let h_inv = h[n - 1].inverse()?;
    let k = &(&h[n] * &a_star) * &h_inv;
    let mut e = k.scale(-x);
    e -= &CMatrix::real_scalar(a.dim(), n as f64);
    e += &(&k * a).scale(0.5);
    e += &(&(&h[n] * &(&a_star * &a_star)) * &h_inv).scale(0.5);
    Ok((e, k.scale(-1.0)))
}

fn potential_kernel_integral(fam: &MvopFamily, w: &ExponentialWeight, x: f64, n: usize) -> Result<CMatrix> {
    let dim = fam.dim();
    let vp = MatrixPoly::from_scalar(dim, &w.potential().derivative());
    let d_adj = divided_difference(&vp, x).adjoint();
    let pn = fam.p(n)?;
    let both = fam.p(n - 1)?.add(pn);
    Ok(fam.inner(pn, &both.mul(&d_adj)))
}

/// `(F + E)H(n−1) − [P(x,n)A − AP(x,n) − ∫P_n W S_v (P_{n−1} + P_n)*]`,
/// `S_v = (v'(x) − v'(y))/(x − y)`, in the form it is usually stated.
///
/// This holds for scalar weights but not in general: the commutator `PA − AP`
/// is not a constant-coefficient combination of `P(x,n)` and `P(x,n−1)`, see
/// [`commutator_expansion_residual`] for the statement that does hold.
pub fn ef_sum_relation(
    fam: &MvopFamily,
    w: &ExponentialWeight,
    e: &CMatrix,
    f: &CMatrix,
    x: f64,
    n: usize,
) -> Result<Residual> {
    let a = w.ladder_matrix();
    let lhs = &(f + e) * fam.h(n - 1)?;
    let p = fam.eval(x, n as i64)?;
    let comm = &(&p * a) - &(a * &p);
    let kernel = potential_kernel_integral(fam, w, x, n)?;
    let rhs = &comm - &kernel;
    Ok(Residual::new(&lhs - &rhs, &[&lhs, &comm, &kernel]))
}

/// `(ρ(x) − ρ(y))/(x − y)`, with a central difference when the points nearly coincide.
fn rho_quotient(w: &ExponentialWeight, rx: &CMatrix, x: f64, y: f64) -> CMatrix {
    // W̃ = GG* is positive definite, so the solves cannot fail
    let r = |s: f64| rho(w, s).expect("W̃ is invertible");
    let d = x - y;
    if d.abs() < 1e-6 {
        let h = 1e-5;
        return (&r(y + h) - &r(y - h)).scale(0.5 / h);
    }
    (rx - &r(y)).scale(1.0 / d)
}

/// `P(x,n)A − AP(x,n) + G_F H(n−1)⁻¹P(x,n) − G_E H(n−1)⁻¹P(x,n−1)` with
/// `G_F = ∫P_n W S_ρ P_{n−1}*`, `G_E = ∫P_n W S_ρ P_n*`, `S_ρ = (ρ(x) − ρ(y))/(x − y)`.
///
/// This is the expansion of the commutator through Christoffel–Darboux.
pub fn commutator_expansion_residual(fam: &MvopFamily, w: &ExponentialWeight, x: f64, n: usize) -> Result<Residual> {
    let a = w.ladder_matrix();
    let rx = rho(w, x)?;
    let pn = fam.p(n)?;
    let prev = fam.p(n - 1)?;
    // ∫ P W S Q* = ∫ P W (Q S*)*
    let integral =
        |q: &MatrixPoly| fam.inner_with(|y| pn.eval(y), |y| &q.eval(y) * &rho_quotient(w, &rx, x, y).adjoint());
    let h_inv = fam.h(n - 1)?.inverse()?;
    let p = fam.eval(x, n as i64)?;
    let comm = &(&p * a) - &(a * &p);
    let tf = &(&integral(prev) * &h_inv) * &p;
    let te = &(&integral(pn) * &h_inv) * &fam.eval(x, n as i64 - 1)?;
    Ok(Residual::new(&(&comm + &tf) - &te, &[&comm, &tf, &te]))
}
