//! Lowering and raising relations `M·P = P·𝓓`, `M†·P = P·𝓓†` for exponential
//! weights, the string relations they force on `B(n)`, `C(n)`, and the quartic
//! recurrence for scalar Freud weights.
//!
//! Throughout, `A` is the matrix appearing in `𝓓 = ∂ + A`. For a weight with a
//! left factor `L₀` this is `L₀AL₀⁻¹` (see [`ExponentialWeight::ladder_matrix`]).
//!
//! [`ExponentialWeight::ladder_matrix`]: crate::weights::ExponentialWeight::ladder_matrix

use alloc::vec::Vec;

use crate::differential::DifferentialOperator;
use crate::error::{Error, Result};
use crate::numerics::{relative_residual, CMatrix};
use crate::op_algebra::DiffOp;
use crate::oracle::MvopFamily;
use crate::poly::{MatrixPoly, ScalarPoly};

/// `(v'(L))`, the difference operator realizing multiplication by `v'(x)`.
pub fn potential_derivative_operator(fam: &MvopFamily, v: &ScalarPoly) -> Result<DiffOp> {
    DiffOp::recurrence_operator(fam).op_poly(&v.derivative())
}

/// `M = A + Σ_{j<0} (v'(L))_j(n) δ^j`, band `[−deg v + 1, 0]`.
pub fn lowering_operator(fam: &MvopFamily, v: &ScalarPoly, a: &CMatrix) -> Result<DiffOp> {
    let vl = potential_derivative_operator(fam, v)?;
    let depth = v.degree() as i64 - 1;
    Ok(DiffOp::from_fn(fam.dim(), -depth, 0, vl.n_max(), |j, n| {
        if j == 0 {
            a.clone()
        } else {
            vl.coeff(j, n).expect("within tabulation")
        }
    }))
}

/// `M†`, the raising partner of `M`.
pub fn raising_operator(fam: &MvopFamily, m: &DiffOp) -> Result<DiffOp> {
    m.dagger(fam.norms())
}

/// `M† = 2δ + 2B(n) − A + tI` for `v = x² + tx`.
pub fn hermite_raising_closed(fam: &MvopFamily, a: &CMatrix, t: f64) -> DiffOp {
    let dim = fam.dim();
    let b = fam.b_seq();
    DiffOp::from_fn(dim, 0, 1, fam.n_max(), |j, n| {
        if j == 1 {
            CMatrix::real_scalar(dim, 2.0)
        } else {
            &(&b[n].scale(2.0) - a) + &CMatrix::real_scalar(dim, t)
        }
    })
}

/// Lowering operator, its raising partner and the data they were built from.
#[derive(Clone, Debug)]
pub struct LadderPair {
    pub m: DiffOp,
    pub mdag: DiffOp,
    pub a: CMatrix,
    pub v: ScalarPoly,
}

impl LadderPair {
    pub fn new(fam: &MvopFamily, v: &ScalarPoly, a: &CMatrix) -> Result<Self> {
        let m = lowering_operator(fam, v, a)?;
        let mdag = raising_operator(fam, &m)?;
        Ok(Self {
            m,
            mdag,
            a: a.clone(),
            v: v.clone(),
        })
    }

    /// Largest `n` at which both relations can be checked.
    pub fn n_max(&self) -> usize {
        self.m.n_max().min(self.mdag.n_max())
    }
}

/// `(P·𝓓)(x,n) = P'(x,n) + P(x,n)A`.
pub fn apply_d(fam: &MvopFamily, x: f64, n: usize, a: &CMatrix) -> Result<CMatrix> {
    let p = fam.eval(x, n as i64)?;
    Ok(&fam.eval_derivative(x, n as i64)? + &(&p * a))
}

/// `(P·𝓓†)(x,n) = −P'(x,n) − P(x,n)A + v'(x)P(x,n)`.
pub fn apply_d_dagger(fam: &MvopFamily, x: f64, n: usize, a: &CMatrix, v: &ScalarPoly) -> Result<CMatrix> {
    let p = fam.eval(x, n as i64)?;
    Ok(&p.scale(v.derivative().eval(x)) - &apply_d(fam, x, n, a)?)
}

/// `(P·𝓓 − M·P, P·𝓓† − M†·P)` at `(x, n)`.
pub fn ladder_residual(fam: &MvopFamily, pair: &LadderPair, x: f64, n: usize) -> Result<(CMatrix, CMatrix)> {
    let down = &apply_d(fam, x, n, &pair.a)? - &pair.m.apply(fam, x, n)?;
    let up = &apply_d_dagger(fam, x, n, &pair.a, &pair.v)? - &pair.mdag.apply(fam, x, n)?;
    Ok((down, up))
}

/// Relative versions of [`ladder_residual`], scaled by the sides of each relation.
pub fn ladder_relative_residual(fam: &MvopFamily, pair: &LadderPair, x: f64, n: usize) -> Result<(f64, f64)> {
    let d = apply_d(fam, x, n, &pair.a)?;
    let mp = pair.m.apply(fam, x, n)?;
    let dd = apply_d_dagger(fam, x, n, &pair.a, &pair.v)?;
    let mdp = pair.mdag.apply(fam, x, n)?;
    Ok((
        relative_residual(&(&d - &mp), &[&d, &mp]),
        relative_residual(&(&dd - &mdp), &[&dd, &mdp]),
    ))
}

/// `M_j(n) = ⟨P_n·𝓓, P_{n+j}⟩ H(n+j)⁻¹` for `−depth ≤ j ≤ 0`: the lowering operator
/// recovered from inner products alone.
pub fn lowering_by_projection(fam: &MvopFamily, a: &CMatrix, depth: usize, n_max: usize) -> Result<DiffOp> {
    if n_max > fam.n_max() {
        return Err(Error::OutOfRange {
            index: n_max,
            n_max: fam.n_max(),
        });
    }
    let d = DifferentialOperator::lowering(a);
    let images: Vec<MatrixPoly> = (0..=n_max).map(|n| d.apply(&fam.polys()[n])).collect();
    let h_inv = fam.norms()[..=n_max]
        .iter()
        .map(CMatrix::inverse)
        .collect::<Result<Vec<_>>>()?;
    Ok(DiffOp::from_fn(fam.dim(), -(depth as i64), 0, n_max, |j, n| {
        let m = (n as i64 + j) as usize;
        &fam.inner(&images[n], &fam.polys()[m]) * &h_inv[m]
    }))
}

/// One entry of [`string_residuals`] together with the scale of its terms.
#[derive(Clone, Debug)]
pub struct StringResidual {
    pub n: usize,
    /// `[B(n),A] − I − (v'(L))₋₁(n) + (v'(L))₋₁(n+1)`
    pub first: CMatrix,
    /// `[C(n),A] − C(n)(v'(L))₀(n−1) + (v'(L))₀(n)C(n)`, zero at `n = 0`
    pub second: CMatrix,
    pub first_scale: f64,
    pub second_scale: f64,
}

impl StringResidual {
    pub fn relative(&self) -> (f64, f64) {
        (
            self.first.frobenius_norm() / self.first_scale,
            self.second.frobenius_norm() / self.second_scale,
        )
    }
}

/// The two string relations for every `n` the tabulation supports.
pub fn string_residuals(fam: &MvopFamily, a: &CMatrix, v: &ScalarPoly) -> Result<Vec<StringResidual>> {
    let vl = potential_derivative_operator(fam, v)?;
    let dim = fam.dim();
    let id = CMatrix::identity(dim);
    let top = vl.n_max().saturating_sub(1).min(fam.n_max());
    let mut out = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let b = fam.b(n)?;
        let c = fam.c(n)?;
        let ba = b.commutator(a);
        let low_n = vl.coeff(-1, n)?;
        let low_next = vl.coeff(-1, n + 1)?;
        let first = &(&(&ba - &id) - &low_n) + &low_next;
        let first_scale = [&ba, &id, &low_n, &low_next]
            .iter()
            .map(|m| m.frobenius_norm())
            .fold(1.0, f64::max);

        let (second, second_scale) = if n == 0 {
            (CMatrix::zeros(dim), 1.0)
        } else {
            let ca = c.commutator(a);
            let t1 = c * &vl.coeff(0, n - 1)?;
            let t2 = &vl.coeff(0, n)? * c;
            let r = &(&ca - &t1) + &t2;
            let s = [&ca, &t1, &t2].iter().map(|m| m.frobenius_norm()).fold(1.0, f64::max);
            (r, s)
        };
        out.push(StringResidual {
            n,
            first,
            second,
            first_scale,
            second_scale,
        });
    }
    Ok(out)
}

/// `(v'(L))₀(n) − A − H(n)A*H(n)⁻¹`, relative.
pub fn zero_coefficient_residual(fam: &MvopFamily, a: &CMatrix, v: &ScalarPoly, n: usize) -> Result<f64> {
    let vl = potential_derivative_operator(fam, v)?;
    let lhs = vl.coeff(0, n)?;
    let h = fam.h(n)?;
    let conj = &(h * &a.adjoint()) * &h.inverse()?;
    let rhs = a + &conj;
    Ok(relative_residual(&(&lhs - &rhs), &[&lhs, a, &conj]))
}

/// `Σ_{k<n} [B(k),A] − (n − (v'(L))₋₁(n))`, relative. For `v = x² + tx` the
/// right side is `n − 2C(n)`.
pub fn telescoped_sum_residual(fam: &MvopFamily, a: &CMatrix, v: &ScalarPoly, n: usize) -> Result<f64> {
    let vl = potential_derivative_operator(fam, v)?;
    let dim = fam.dim();
    let mut sum = CMatrix::zeros(dim);
    for k in 0..n {
        sum += &fam.b(k)?.commutator(a);
    }
    let low = vl.coeff(-1, n)?;
    let rhs = &CMatrix::real_scalar(dim, n as f64) - &low;
    Ok(relative_residual(&(&sum - &rhs), &[&sum, &rhs, &low]))
}

/// `|n − 4C(n)(C(n−1) + C(n) + C(n+1) + 2t)|`, the quartic recurrence in the
/// form it is usually quoted, with `C(0) = 0`.
pub fn dpainleve1_residual(c: &[f64], t: f64, n: usize) -> Result<f64> {
    let (prev, cur, next) = neighbours(c, n)?;
    Ok((n as f64 - 4.0 * cur * (prev + cur + next + 2.0 * t)).abs())
}

/// `|n − 4C(n)(C(n−1) + C(n) + C(n+1)) − 2tC(n)|`: the recurrence that the string
/// relation actually forces for `v = x⁴ + tx²` (equivalently `+ t/2` inside the
/// bracket). Agrees with [`dpainleve1_residual`] only at `t = 0`.
pub fn quartic_string_residual(c: &[f64], t: f64, n: usize) -> Result<f64> {
    let (prev, cur, next) = neighbours(c, n)?;
    Ok((n as f64 - 4.0 * cur * (prev + cur + next) - 2.0 * t * cur).abs())
}

fn neighbours(c: &[f64], n: usize) -> Result<(f64, f64, f64)> {
    if n == 0 || n + 1 >= c.len() {
        return Err(Error::OutOfRange {
            index: n,
            n_max: c.len().saturating_sub(2),
        });
    }
    Ok((c[n - 1], c[n], c[n + 1]))
}

/// Residuals of the operator identities among `𝓓 = ∂ + A` and `𝓓† = −∂ − A + v'`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorReport {
    /// `𝓓 + 𝓓† = v'(x)`
    pub sum: f64,
    /// `[𝓓†,𝓓] = v''`, `[[𝓓†,𝓓],𝓓] = v'''`, … down to the constant derivative
    pub brackets: Vec<f64>,
}

impl CommutatorReport {
    pub fn max(&self) -> f64 {
        self.brackets.iter().copied().fold(self.sum, f64::max)
    }
}

/// Applies both sides of every identity to `samples` and evaluates on `grid`.
pub fn commutator_checks(a: &CMatrix, v: &ScalarPoly, samples: &[MatrixPoly], grid: &[f64]) -> CommutatorReport {
    let dim = a.dim();
    let d = DifferentialOperator::lowering(a);
    let dd = DifferentialOperator::raising(a, v);
    let worst = |lhs: &DifferentialOperator, rhs: &DifferentialOperator| -> f64 {
        let mut w: f64 = 0.0;
        for s in samples {
            for &x in grid {
                w = w.max(lhs.action_residual(rhs, s, x));
            }
        }
        w
    };

    let sum = worst(&d.add(&dd), &DifferentialOperator::scalar(dim, &v.derivative()));
    let mut brackets = Vec::new();
    let mut bracket = dd.commutator(&d);
    let mut deriv = v.derivative().derivative();
    for _ in 2..=v.degree() {
        brackets.push(worst(&bracket, &DifferentialOperator::scalar(dim, &deriv)));
        bracket = bracket.commutator(&d);
        deriv = deriv.derivative();
    }
    CommutatorReport { sum, brackets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::gram_schmidt_family;
    use crate::weights::{freud_weight, hermite_alpha_weight, ExponentialWeight};
    use crate::DEFAULT_GRID;
    use alloc::vec;

    fn hermite_v(t: f64) -> ScalarPoly {
        ScalarPoly::new(vec![0.0, t, 1.0])
    }

    fn check_ladder(w: &ExponentialWeight, n_fam: usize, n_check: usize, tol: f64) {
        let fam = gram_schmidt_family(w, n_fam).unwrap();
        let pair = LadderPair::new(&fam, w.potential(), w.ladder_matrix()).unwrap();
        assert!(pair.n_max() >= n_check, "tabulation {} < {n_check}", pair.n_max());
        for n in 0..=n_check {
            for x in DEFAULT_GRID {
                let (down, up) = ladder_relative_residual(&fam, &pair, x, n).unwrap();
                assert!(down < tol && up < tol, "n={n} x={x} down={down:e} up={up:e}");
            }
        }
        let (lo, hi) = pair.m.effective_band(1e-9).unwrap();
        assert!(hi <= 0 && lo >= -(w.potential().degree() as i64 - 1));
        let (lo, _) = pair.mdag.effective_band(1e-9).unwrap();
        assert!(lo >= 0);
    }

    #[test]
    fn hermite_lowering_operator() {
        let w = hermite_alpha_weight(&[1.0, 1.0]).unwrap();
        let fam = gram_schmidt_family(&w, 10).unwrap();
        let m = lowering_operator(&fam, &ScalarPoly::monomial(2), w.matrix()).unwrap();
        assert_eq!(m.band(), (-1, 0));
        for n in 0..=m.n_max() {
            let expected = fam.c(n).unwrap().scale(2.0);
            assert!((&m.coeff(-1, n).unwrap() - &expected).frobenius_norm() < 1e-12);
            assert_eq!(&m.coeff(0, n).unwrap(), w.matrix());
        }
    }

    #[test]
    fn scalar_hermite_lowering_is_n_delta_inverse() {
        let w = hermite_alpha_weight(&[1.0]).unwrap();
        let fam = gram_schmidt_family(&w, 10).unwrap();
        let m = lowering_operator(&fam, &ScalarPoly::monomial(2), w.matrix()).unwrap();
        for n in 0..=m.n_max() {
            assert!((m.coeff(-1, n).unwrap()[(0, 0)].re - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn freud_lowering_lowest_coefficient() {
        let w = freud_weight(2, 1.0, 1.0, -0.5).unwrap();
        let fam = gram_schmidt_family(&w, 12).unwrap();
        let m = lowering_operator(&fam, w.potential(), w.ladder_matrix()).unwrap();
        for n in 3..=m.n_max() {
            let c = fam.c_seq();
            let expected = (&(&c[n] * &c[n - 1]) * &c[n - 2]).scale(4.0);
            let got = m.coeff(-3, n).unwrap();
            assert!(relative_residual(&(&got - &expected), &[&expected]) < 1e-12);
        }
    }

    #[test]
    fn apply_d_basics() {
        let a = CMatrix::from_real(&[0.0, 0.0, 2.0, 0.0]);
        let w = hermite_alpha_weight(&[1.0, 1.0]).unwrap();
        let fam = gram_schmidt_family(&w, 4).unwrap();
        assert_eq!(apply_d(&fam, 0.7, 0, &a).unwrap(), a);
        let v = ScalarPoly::monomial(2);
        let expected = &CMatrix::real_scalar(2, 1.4) - &a;
        assert_eq!(apply_d_dagger(&fam, 0.7, 0, &a, &v).unwrap(), expected);

        let scalar = gram_schmidt_family(&hermite_alpha_weight(&[1.0]).unwrap(), 4).unwrap();
        let got = apply_d(&scalar, 0.3, 2, &CMatrix::zeros(1)).unwrap();
        assert!((got[(0, 0)].re - 0.6).abs() < 1e-12);

        // P_n·𝓓† has degree n+1 and leading coefficient 2 for the Gaussian
        let raised = DifferentialOperator::raising(&CMatrix::zeros(1), &v).apply(scalar.p(3).unwrap());
        assert_eq!(raised.degree(), 4);
        assert!((raised.leading()[(0, 0)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ladder_relations_hold() {
        check_ladder(&hermite_alpha_weight(&[1.0]).unwrap(), 10, 8, 1e-9);
        check_ladder(&hermite_alpha_weight(&[1.0, 1.0]).unwrap(), 10, 8, 1e-8);
        check_ladder(&freud_weight(1, 1.0, 1.0, 0.0).unwrap(), 14, 8, 1e-8);
        check_ladder(&freud_weight(2, 1.0, 1.0, 0.0).unwrap(), 14, 8, 1e-8);
    }

    #[test]
    fn adjoint_pairing_of_differential_operators() {
        let w = hermite_alpha_weight(&[1.0, 0.8]).unwrap();
        let fam = gram_schmidt_family(&w, 10).unwrap();
        let a = w.ladder_matrix();
        let d = DifferentialOperator::lowering(a);
        let dd = DifferentialOperator::raising(a, w.potential());
        for n in 0..=8 {
            for m in 0..=8 {
                let lhs = fam.inner(&d.apply(&fam.polys()[n]), &fam.polys()[m]);
                let rhs = fam.inner(&fam.polys()[n], &dd.apply(&fam.polys()[m]));
                let scale = fam
                    .h(n)
                    .unwrap()
                    .frobenius_norm()
                    .max(fam.h(m).unwrap().frobenius_norm());
                assert!((&lhs - &rhs).frobenius_norm() / scale < 1e-9, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn hermite_raising_closed_form() {
        for t in [0.0, 0.7] {
            let w = ExponentialWeight::new(hermite_v(t), CMatrix::from_real(&[0.0, 0.0, 1.5, 0.0]), None).unwrap();
            let fam = gram_schmidt_family(&w, 10).unwrap();
            let pair = LadderPair::new(&fam, &hermite_v(t), w.matrix()).unwrap();
            let closed = hermite_raising_closed(&fam, w.matrix(), t);
            assert!(pair.mdag.max_difference(&closed).unwrap() < 1e-10);
        }
    }

    #[test]
    fn projection_recovers_lowering_operator() {
        let w = freud_weight(2, 1.0, 1.0, 0.0).unwrap();
        let fam = gram_schmidt_family(&w, 12).unwrap();
        let m = lowering_operator(&fam, w.potential(), w.ladder_matrix()).unwrap();
        let proj = lowering_by_projection(&fam, w.ladder_matrix(), 6, m.n_max()).unwrap();
        assert!(proj.max_difference(&m).unwrap() < 1e-8);
        for n in 4..=m.n_max() {
            for j in 4..=6.min(n) {
                assert!(proj.coeff(-(j as i64), n).unwrap().frobenius_norm() < 1e-8);
            }
        }
    }

    #[test]
    fn string_relations_and_identities() {
        let cases = [
            (hermite_alpha_weight(&[1.0]).unwrap(), 12),
            (hermite_alpha_weight(&[1.0, 1.0]).unwrap(), 12),
            (freud_weight(1, 1.0, 1.0, 0.0).unwrap(), 14),
            (freud_weight(2, 1.0, 1.0, 0.0).unwrap(), 14),
        ];
        for (w, n_fam) in &cases {
            let fam = gram_schmidt_family(w, *n_fam).unwrap();
            let a = w.ladder_matrix();
            let res = string_residuals(&fam, a, w.potential()).unwrap();
            assert!(res.len() >= 9);
            for r in &res {
                let (first, second) = r.relative();
                assert!(first < 1e-8 && second < 1e-8, "n={} {first:e} {second:e}", r.n);
            }
            for n in 0..=8 {
                assert!(zero_coefficient_residual(&fam, a, w.potential(), n).unwrap() < 1e-8);
                assert!(telescoped_sum_residual(&fam, a, w.potential(), n).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn scalar_hermite_string_relation_forces_half_steps() {
        let fam = gram_schmidt_family(&hermite_alpha_weight(&[1.0]).unwrap(), 10).unwrap();
        for r in string_residuals(&fam, &CMatrix::zeros(1), &ScalarPoly::monomial(2)).unwrap() {
            assert!(r.first.frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn quartic_recurrence() {
        for t in [0.0, 1.0] {
            // v = x⁴ + t x²
            let w = freud_weight(1, 1.0, 1.0, -t).unwrap();
            let fam = gram_schmidt_family(&w, 10).unwrap();
            let (_, c) = fam.scalar_recurrence().unwrap();
            for n in 1..=6 {
                assert!(quartic_string_residual(&c, t, n).unwrap() < 1e-9, "t={t} n={n}");
            }
            let quoted = dpainleve1_residual(&c, t, 1).unwrap();
            if t == 0.0 {
                assert!(quoted < 1e-9);
            } else {
                // the quoted form is off by 6tC(n)
                assert!((quoted - 6.0 * t * c[1]).abs() < 1e-9);
            }
        }
        assert!(dpainleve1_residual(&[0.0, 1.0], 0.0, 1).is_err());
    }

    #[test]
    fn operator_brackets() {
        let samples: Vec<MatrixPoly> = (0..4)
            .map(|k| {
                MatrixPoly::monic_monomial(2, k).add(&MatrixPoly::constant(CMatrix::from_real(&[0.5, 1.0, -1.0, 0.2])))
            })
            .collect();
        let a = CMatrix::from_real(&[0.0, 0.0, 2.0, 0.0]);
        let herm = commutator_checks(&a, &ScalarPoly::monomial(2), &samples, &DEFAULT_GRID);
        assert_eq!(herm.brackets.len(), 1);
        assert!(herm.max() < 1e-12);
        let freud = commutator_checks(
            &a,
            &ScalarPoly::new(vec![0.0, 0.0, 0.5, 0.0, 1.0]),
            &samples,
            &DEFAULT_GRID,
        );
        assert_eq!(freud.brackets.len(), 3);
        assert!(freud.max() < 1e-12);
    }
}
