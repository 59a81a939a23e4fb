//! Consequences of a Pearson equation `W' = −W V` with `V` a matrix polynomial:
//! `P'` has a finite expansion in lower degrees, and `∂` has the adjoint `−∂ + V*`.
//!
//! The closed forms here are for the Hermite-type weights whose `α` make `V`
//! quadratic (see [`crate::weights::pearson_alpha_parameters`]).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, Residual};
use crate::op_algebra::DiffOp;
use crate::oracle::MvopFamily;
use crate::poly::MatrixPoly;
use crate::weights::ExponentialWeight;

const TAIL_TOL: f64 = 1e-8;

/// `‖W'(x) + W(x)V(x)‖ / max(‖W'(x)‖, ‖W(x)V(x)‖)`.
pub fn pearson_residual(w: &ExponentialWeight, v: &MatrixPoly, x: f64) -> f64 {
    use crate::weights::MatrixWeight;
    let dw = w.derivative(x);
    let wv = &w.eval(x) * &v.eval(x);
    let scale = dw.frobenius_norm().max(wv.frobenius_norm()).max(f64::MIN_POSITIVE);
    (&dw + &wv).frobenius_norm() / scale
}

/// `P'(x,n) = Σ_{j=1..k} M_{−j}(n) P(x,n−j)`, coefficients by projection.
#[derive(Clone, Debug)]
pub struct DerivativeExpansion {
    pub n: usize,
    /// `coeffs[j−1] = M_{−j}(n)`
    pub coeffs: Vec<CMatrix>,
    /// Largest `‖M_{−j}(n)‖/max(1,n)` over `k < j ≤ n`.
    pub tail: f64,
}

impl DerivativeExpansion {
    pub fn coeff(&self, j: usize) -> Option<&CMatrix> {
        j.checked_sub(1).and_then(|i| self.coeffs.get(i))
    }
}

/// `M_{−j}(n) = ⟨P'_n, P_{n−j}⟩ H(n−j)⁻¹` for `1 ≤ j ≤ min(k, n)`; every further
/// projection must vanish, otherwise [`Error::NonVanishingTail`].
pub fn derivative_expansion(fam: &MvopFamily, k: usize, n: usize) -> Result<DerivativeExpansion> {
    let pn = fam.p(n)?.derivative();
    let project = |j: usize| -> Result<CMatrix> {
        let m = n - j;
        Ok(&fam.inner(&pn, fam.p(m)?) * &fam.h(m)?.inverse()?)
    };
    let coeffs = (1..=k.min(n)).map(project).collect::<Result<Vec<_>>>()?;
    let scale = (n as f64).max(1.0);
    let mut tail: f64 = 0.0;
    for j in k + 1..=n {
        let r = project(j)?.frobenius_norm() / scale;
        if r > TAIL_TOL {
            return Err(Error::NonVanishingTail { shift: j, residual: r });
        }
        tail = tail.max(r);
    }
    Ok(DerivativeExpansion { n, coeffs, tail })
}

/// `M_{−2}(n) = H(n) A* H(n−2)⁻¹`; entries `0` and `1` are zero.
pub fn m2_closed_form(h: &[CMatrix], a: &CMatrix) -> Result<Vec<CMatrix>> {
    let a_star = a.adjoint();
    (0..h.len())
        .map(|n| {
            if n < 2 {
                Ok(CMatrix::zeros(a.dim()))
            } else {
                Ok(&(&h[n] * &a_star) * &h[n - 2].inverse()?)
            }
        })
        .collect()
}

/// `2(n+1)H(n+1)⁻¹ − 2(n+2)H(n+2)⁻¹H(n+1)H(n)⁻¹ + H(n+2)⁻¹AH(n+2)A*H(n)⁻¹ − A*H(n)⁻¹A`.
pub fn hrec2_residual(h: &[CMatrix], a: &CMatrix, n: usize) -> Result<Residual> {
    if n + 2 >= h.len() {
        return Err(Error::OutOfRange {
            index: n + 2,
            n_max: h.len().saturating_sub(1),
        });
    }
    let a_star = a.adjoint();
    let h0 = h[n].inverse()?;
    let h1 = h[n + 1].inverse()?;
    let h2 = h[n + 2].inverse()?;
    let t1 = h1.scale(2.0 * (n + 1) as f64);
    let t2 = (&(&h2 * &h[n + 1]) * &h0).scale(2.0 * (n + 2) as f64);
    let t3 = &(&(&(&h2 * a) * &h[n + 2]) * &a_star) * &h0;
    let t4 = &(&a_star * &h0) * a;
    let r = &(&(&t1 - &t2) + &t3) - &t4;
    Ok(Residual::new(r, &[&t1, &t2, &t3, &t4]))
}

/// `[M_{−2}(n), A] − 2((n−1)C(n) − nC(n−1))` with `M_{−2}` from the norms.
pub fn m2_commutator_residual(h: &[CMatrix], a: &CMatrix, n: usize) -> Result<Residual> {
    if n < 2 || n >= h.len() {
        return Err(Error::OutOfRange {
            index: n,
            n_max: h.len().saturating_sub(1),
        });
    }
    let m2 = &(&h[n] * &a.adjoint()) * &h[n - 2].inverse()?;
    let lhs = m2.commutator(a);
    let c_n = &h[n] * &h[n - 1].inverse()?;
    let c_prev = &h[n - 1] * &h[n - 2].inverse()?;
    let rhs = (&c_n.scale((n - 1) as f64) - &c_prev.scale(n as f64)).scale(2.0);
    Ok(Residual::new(&lhs - &rhs, &[&lhs, &rhs]))
}

/// `⟨P'_n, P_m⟩ − ⟨P_n, −P'_m + P_m V*⟩`.
pub fn dx_adjoint_check(fam: &MvopFamily, v: &MatrixPoly, n: usize, m: usize) -> Result<Residual> {
    let pn = fam.p(n)?;
    let pm = fam.p(m)?;
    let lhs = fam.inner(&pn.derivative(), pm);
    let partner = pm.mul(&v.adjoint()).sub(&pm.derivative());
    let rhs = fam.inner(pn, &partner);
    Ok(Residual::new(&lhs - &rhs, &[&lhs, &rhs]))
}

/// `φ⁻¹(∂) = nδ⁻¹ + M_{−2}(n)δ⁻²` with the closed-form `M_{−2}`.
pub fn derivative_operator(fam: &MvopFamily, a: &CMatrix) -> Result<DiffOp> {
    let m2 = m2_closed_form(fam.norms(), a)?;
    let dim = a.dim();
    Ok(DiffOp::from_fn(dim, -2, -1, fam.n_max(), |j, n| {
        if j == -1 {
            CMatrix::real_scalar(dim, n as f64)
        } else {
            m2[n].clone()
        }
    }))
}

/// `[A + 2C(n)δ⁻¹, nδ⁻¹ + M_{−2}(n)δ⁻²]`, which must vanish since `𝓓` and `∂` commute.
pub fn lowering_derivative_commutator(fam: &MvopFamily, a: &CMatrix) -> Result<DiffOp> {
    let dim = a.dim();
    let cs = fam.c_seq();
    let m = DiffOp::from_fn(dim, -1, 0, fam.n_max(), |j, n| {
        if j == 0 {
            a.clone()
        } else {
            cs[n].scale(2.0)
        }
    });
    m.commutator(&derivative_operator(fam, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite_fast::FastHermite;
    use crate::oracle::gram_schmidt_family;
    use crate::poly::ScalarPoly;
    use crate::weights::{
        freud_weight, hermite_alpha_weight, pearson_alpha_parameters, pearson_v_hermite, pearson_v_numeric,
    };
    use crate::DEFAULT_GRID;
    use alloc::vec;

    #[test]
    fn scalar_hermite_expansion() {
        let fam = gram_schmidt_family(&hermite_alpha_weight(&[1.0]).unwrap(), 8).unwrap();
        for n in 1..=8 {
            let e = derivative_expansion(&fam, 1, n).unwrap();
            assert!((e.coeffs[0][(0, 0)].re - n as f64).abs() < 1e-10);
            assert!(e.tail < 1e-10);
        }
        let v = MatrixPoly::from_scalar(1, &ScalarPoly::new(vec![0.0, 2.0]));
        let r = dx_adjoint_check(&fam, &v, 1, 0).unwrap();
        assert!(r.matrix.max_abs() < 1e-12);
    }

    #[test]
    fn quadratic_pearson_weight() {
        let alpha = pearson_alpha_parameters(2);
        let w = hermite_alpha_weight(&alpha).unwrap();
        let v = pearson_v_hermite(&alpha).unwrap();
        for x in DEFAULT_GRID {
            assert!(pearson_residual(&w, &v, x) < 1e-10);
        }
        let fam = gram_schmidt_family(&w, 10).unwrap();
        let m2 = m2_closed_form(fam.norms(), w.matrix()).unwrap();
        for (n, m2n) in m2.iter().enumerate().take(9).skip(1) {
            let e = derivative_expansion(&fam, 2, n).unwrap();
            assert!((&e.coeffs[0] - &CMatrix::real_scalar(2, n as f64)).frobenius_norm() < 1e-8);
            assert!(e.tail < 1e-9);
            if n >= 2 {
                let got = e.coeff(2).unwrap();
                assert!(got.frobenius_norm() > 1e-3);
                assert!((got - m2n).frobenius_norm() / got.frobenius_norm() < 1e-8, "n={n}");
                assert!(m2_commutator_residual(fam.norms(), w.matrix(), n).unwrap().relative() < 1e-7);
            }
        }
        for n in 0..=6 {
            assert!(hrec2_residual(fam.norms(), w.matrix(), n).unwrap().relative() < 1e-7);
            for m in 0..=6 {
                assert!(
                    dx_adjoint_check(&fam, &v, n, m).unwrap().relative() < 1e-8,
                    "n={n} m={m}"
                );
            }
        }
        let comm = lowering_derivative_commutator(&fam, w.matrix()).unwrap();
        assert!(comm.max_difference(&DiffOp::zero(2, comm.n_max())).unwrap() < 1e-8);
        for n in 0..=6 {
            for x in DEFAULT_GRID {
                assert!(comm.apply(&fam, x, n).unwrap().frobenius_norm() < 1e-8);
            }
        }
    }

    #[test]
    fn hrec2_on_fast_norms() {
        for n_dim in 2..=4 {
            let fast = FastHermite::new(&pearson_alpha_parameters(n_dim), 12).unwrap();
            for n in 0..=10 {
                let r = hrec2_residual(fast.norms(), fast.ladder_matrix(), n).unwrap();
                assert!(r.relative() < 1e-7, "N={n_dim} n={n}");
            }
        }
        let scalar = FastHermite::new(&[1.0], 8).unwrap();
        for n in 0..=6 {
            assert!(
                hrec2_residual(scalar.norms(), &CMatrix::zeros(1), n)
                    .unwrap()
                    .relative()
                    < 1e-14
            );
        }
    }

    #[test]
    fn freud_expansion_has_three_terms() {
        let w = freud_weight(2, 1.0, 1.0, 0.0).unwrap();
        let v = pearson_v_numeric(&w, 3).unwrap();
        assert_eq!(v.degree(), 3);
        let fam = gram_schmidt_family(&w, 10).unwrap();
        for n in 3..=8 {
            let e = derivative_expansion(&fam, 3, n).unwrap();
            assert!(e.coeff(2).unwrap().frobenius_norm() > 1e-3);
            assert!(e.coeff(3).unwrap().frobenius_norm() > 1e-3);
            assert!(e.tail < 1e-8);
        }
        assert!(matches!(
            derivative_expansion(&fam, 2, 6),
            Err(Error::NonVanishingTail { shift: 3, .. })
        ));
    }
}
