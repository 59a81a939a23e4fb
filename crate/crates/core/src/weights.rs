//! Exponential-type matrix weights `W(x) = e^{-v(x)} L₀ e^{xA} e^{xA*} L₀*`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{cholesky, mat_exp, relative_residual, CMatrix};
use crate::poly::{c, factorial, hermite, MatrixPoly, ScalarPoly};

/// Anything the quadrature oracle can orthogonalize against.
pub trait MatrixWeight: Sync {
    fn dim(&self) -> usize;

    /// `W(x)`, Hermitian positive definite.
    fn eval(&self, x: f64) -> CMatrix;

    /// Half-width `R` of the integration window for polynomials up to degree `n_max`.
    fn cutoff(&self, n_max: usize) -> f64;
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentialWeight {
    v: ScalarPoly,
    a: CMatrix,
    left: Option<CMatrix>,
    ladder: CMatrix,
}

impl ExponentialWeight {
    pub fn new(v: ScalarPoly, a: CMatrix, left: Option<CMatrix>) -> Result<Self> {
        check_potential(&v)?;
        if !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "A",
                reason: "entries must be finite",
            });
        }
        let ladder = match &left {
            Some(l) => {
                if l.dim() != a.dim() {
                    return Err(Error::DimensionMismatch {
                        left: l.dim(),
                        right: a.dim(),
                    });
                }
                &(l * &a) * &l.inverse()?
            }
            None => a.clone(),
        };
        Ok(Self { v, a, left, ladder })
    }

    pub fn potential(&self) -> &ScalarPoly {
        &self.v
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn left(&self) -> Option<&CMatrix> {
        self.left.as_ref()
    }

    /// `L₀ A L₀⁻¹`, the constant term of the lowering operator and of `𝓓 = ∂ + Ã`.
    ///
    /// Equal to `A` when there is no left factor or it commutes with `A`.
    pub fn ladder_matrix(&self) -> &CMatrix {
        &self.ladder
    }

    /// `L₀ e^{xA}`.
    pub fn factor(&self, x: f64) -> CMatrix {
        let e = mat_exp(&self.a, x);
        match &self.left {
            Some(l) => l * &e,
            None => e,
        }
    }

    /// `W(x) e^{v(x)}`: the matrix part without the scalar decay.
    pub fn eval_unscaled(&self, x: f64) -> CMatrix {
        let g = self.factor(x);
        &g * &g.adjoint()
    }

    /// `W'(x) = −v'W + ÃW + WÃ*`.
    pub fn derivative(&self, x: f64) -> CMatrix {
        let w = self.eval(x);
        let aw = &self.ladder * &w;
        let lin = &aw + &aw.adjoint();
        &lin - &w.scale(self.v.derivative().eval(x))
    }

    /// `W'(x) W(x)⁻¹ = −v'(x) + Ã + G A* G⁻¹` with `G = L₀e^{xA}`.
    pub fn log_derivative(&self, x: f64) -> Result<CMatrix> {
        let g = self.factor(x);
        let conj = &(&g * &self.a.adjoint()) * &g.inverse()?;
        let mut out = &self.ladder + &conj;
        out -= &CMatrix::real_scalar(self.dim(), self.v.derivative().eval(x));
        Ok(out)
    }

    /// `−W(x)⁻¹W'(x) = v'(x) − Ã* − W̃⁻¹ÃW̃` with `W̃ = e^{v}W`, free of the decay factor.
    pub fn pearson_value(&self, x: f64) -> Result<CMatrix> {
        let wt = self.eval_unscaled(x);
        let inner = (&self.ladder * &wt).left_div(&wt)?;
        let mut out = CMatrix::real_scalar(self.dim(), self.v.derivative().eval(x));
        out -= &self.ladder.adjoint();
        out -= &inner;
        Ok(out)
    }

    /// `‖L₀‖₂`, or 1 without a left factor.
    fn left_norm(&self) -> f64 {
        self.left.as_ref().map_or(1.0, |l| l.spectral_norm().max(1.0))
    }
}

impl MatrixWeight for ExponentialWeight {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn eval(&self, x: f64) -> CMatrix {
        self.eval_unscaled(x).scale(libm::exp(-self.v.eval(x)))
    }

    fn cutoff(&self, n_max: usize) -> f64 {
        tail_cutoff(&self.v, self.a.spectral_norm(), self.left_norm(), n_max)
    }
}

/// `e^{-v(x)} L e^{xA} T e^{xA*} L*`, the general form that reduces to an
/// [`ExponentialWeight`] through a Cholesky factor of `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredWeight {
    pub v: ScalarPoly,
    pub a: CMatrix,
    pub t: CMatrix,
    pub l: CMatrix,
}

impl FactoredWeight {
    pub fn new(v: ScalarPoly, a: CMatrix, t: CMatrix, l: CMatrix) -> Result<Self> {
        check_potential(&v)?;
        for m in [&t, &l] {
            if m.dim() != a.dim() {
                return Err(Error::DimensionMismatch {
                    left: m.dim(),
                    right: a.dim(),
                });
            }
        }
        Ok(Self { v, a, t, l })
    }

    /// See [`normalize_weight`].
    pub fn normalize(&self) -> Result<(ExponentialWeight, CMatrix)> {
        normalize_weight(&self.v, &self.a, &self.t, &self.l)
    }
}

impl MatrixWeight for FactoredWeight {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn eval(&self, x: f64) -> CMatrix {
        let g = &self.l * &mat_exp(&self.a, x);
        (&(&g * &self.t) * &g.adjoint()).scale(libm::exp(-self.v.eval(x)))
    }

    fn cutoff(&self, n_max: usize) -> f64 {
        let left = (self.l.spectral_norm() * libm::sqrt(self.t.spectral_norm())).max(1.0);
        tail_cutoff(&self.v, self.a.spectral_norm(), left, n_max)
    }
}

fn check_potential(v: &ScalarPoly) -> Result<()> {
    if v.degree() < 2 || !v.degree().is_multiple_of(2) || v.leading() <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "v",
            reason: "potential must have even degree ≥ 2 and positive leading coefficient",
        });
    }
    Ok(())
}

/// Smallest `R` (on a 1/8 grid, at least 1) with
/// `min_± v(±R) − 2‖A‖R − (2n_max+4) ln R − 2 ln ‖L₀‖ > 160`.
fn tail_cutoff(v: &ScalarPoly, a_norm: f64, left_norm: f64, n_max: usize) -> f64 {
    let power = (2 * n_max + 4) as f64;
    let margin =
        |r: f64| v.eval(r).min(v.eval(-r)) - 2.0 * a_norm * r - power * libm::log(r) - 2.0 * libm::log(left_norm);
    let mut r = 1.0;
    while margin(r) <= 160.0 {
        r += 0.125;
    }
    r
}

/// Reduce `W_{(A,T,L)}` with `T = KK*`: returns the weight with matrix `K⁻¹AK`
/// (no left factor) and the similarity factor `LK`, so that
/// `W_{(A,T,L)}(x) = (LK) W_red(x) (LK)*`.
pub fn normalize_weight(v: &ScalarPoly, a: &CMatrix, t: &CMatrix, l: &CMatrix) -> Result<(ExponentialWeight, CMatrix)> {
    let k = cholesky(t)?;
    let reduced = &(&k.inverse()? * a) * &k;
    let factor = l * &k;
    Ok((ExponentialWeight::new(v.clone(), reduced, None)?, factor))
}

pub(crate) fn check_alpha(alpha: &[f64]) -> Result<()> {
    if alpha.is_empty() || alpha.iter().any(|&a| a.is_nan() || a <= 0.0 || a.is_infinite()) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "all entries must be positive and finite",
        });
    }
    Ok(())
}

/// Subdiagonal `A` with `A_{j,j−1} = 2α_j/α_{j−1}`.
pub fn alpha_ladder_matrix(alpha: &[f64]) -> CMatrix {
    let n = alpha.len();
    let mut a = CMatrix::zeros(n);
    for j in 1..n {
        a[(j, j - 1)] = c(2.0 * alpha[j] / alpha[j - 1]);
    }
    a
}

/// `L(x)_{jk} = H_{j−k}(x)/(j−k)! · α_j/α_k` for `j ≥ k`, zero above the diagonal.
pub fn alpha_lower_factor(alpha: &[f64], x: f64) -> CMatrix {
    let n = alpha.len();
    let h: Vec<f64> = (0..n).map(|m| hermite(m, x) / factorial(m)).collect();
    CMatrix::from_fn(n, |j, k| {
        if j >= k {
            c(h[j - k] * alpha[j] / alpha[k])
        } else {
            c(0.0)
        }
    })
}

/// `e^{−x²} L(x) L(x)*`, written as an exponential weight with `v = x²`,
/// `A_{j,j−1} = 2α_j/α_{j−1}` and left factor `L(0)`.
pub fn hermite_alpha_weight(alpha: &[f64]) -> Result<ExponentialWeight> {
    check_alpha(alpha)?;
    let left = alpha_lower_factor(alpha, 0.0);
    let left = if left == CMatrix::identity(alpha.len()) {
        None
    } else {
        Some(left)
    };
    ExponentialWeight::new(ScalarPoly::monomial(2), alpha_ladder_matrix(alpha), left)
}

/// `α` with `α₁ = 1` and `2α_j/α_{j−1} = √((j−1)(N−j+1))`.
pub fn pearson_alpha_parameters(n: usize) -> Vec<f64> {
    let mut alpha = vec![1.0];
    for j in 2..=n {
        let ratio = libm::sqrt(((j - 1) * (n - j + 1)) as f64) / 2.0;
        alpha.push(alpha[j - 2] * ratio);
    }
    alpha
}

/// `μ_i = (i−1)(N−i+1)(2Nα + 2αi + 3β + α)/6`, 1-based, so `μ₁ = 0`.
pub fn freud_mu(n: usize, alpha: f64, beta: f64) -> Vec<f64> {
    (1..=n)
        .map(|i| {
            let (i, nf) = (i as f64, n as f64);
            (i - 1.0) * (nf - i + 1.0) * (2.0 * nf * alpha + 2.0 * alpha * i + 3.0 * beta + alpha) / 6.0
        })
        .collect()
}

/// Quartic weight `e^{−x⁴ + t x²} e^{xA} e^{xA*}` with `A_{i,i−1} = √μ_i`.
pub fn freud_weight(n: usize, alpha: f64, beta: f64, t: f64) -> Result<ExponentialWeight> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: "dimension must be positive",
        });
    }
    let mu = freud_mu(n, alpha, beta);
    if mu.iter().any(|&m| m < 0.0 || !m.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "mu",
            reason: "every μ_i must be non-negative",
        });
    }
    let mut a = CMatrix::zeros(n);
    for i in 1..n {
        a[(i, i - 1)] = c(libm::sqrt(mu[i]));
    }
    ExponentialWeight::new(ScalarPoly::new(vec![0.0, 0.0, -t, 0.0, 1.0]), a, None)
}

/// `J = diag(1, …, N)`.
pub fn number_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(n, |i, j| if i == j { c((i + 1) as f64) } else { c(0.0) })
}

/// Degree-two Pearson polynomial of the Hermite-type weight with `α` from
/// [`pearson_alpha_parameters`]:
/// `−V(x) = (L(0)*)⁻¹AL(0)* + A* + 2x(J + ½A*² − (N+3)/2) − x²A*`.
pub fn pearson_v_hermite(alpha: &[f64]) -> Result<MatrixPoly> {
    check_alpha(alpha)?;
    let n = alpha.len();
    let a = alpha_ladder_matrix(alpha);
    let a_star = a.adjoint();
    let l0_star = alpha_lower_factor(alpha, 0.0).adjoint();
    let c0 = &(&l0_star.inverse()? * &a) * &l0_star + &a_star;
    let mut c1 = &number_matrix(n) + &(&a_star * &a_star).scale(0.5);
    c1 -= &CMatrix::real_scalar(n, (n as f64 + 3.0) / 2.0);
    let minus_v = MatrixPoly::new(n, vec![c0, c1.scale(2.0), a_star.scale(-1.0)]);
    Ok(minus_v.scale(-1.0))
}

/// Fits `V = −W⁻¹W'` by interpolation at `d+1` Chebyshev nodes on `[−2, 2]`,
/// then checks it at `2d` further nodes on `[−2.5, 2.5]`.
pub fn pearson_v_numeric(w: &ExponentialWeight, d: usize) -> Result<MatrixPoly> {
    const TOL: f64 = 1e-8;
    let nodes = chebyshev_nodes(d + 1, 2.0);
    let values = nodes.iter().map(|&x| w.pearson_value(x)).collect::<Result<Vec<_>>>()?;
    let fit = interpolate(&nodes, &values);

    let mut worst: f64 = 0.0;
    for x in chebyshev_nodes(2 * d.max(1), 2.5) {
        let exact = w.pearson_value(x)?;
        let approx = fit.eval(x);
        worst = worst.max(relative_residual(&(&exact - &approx), &[&exact, &approx]));
    }
    if worst > TOL {
        return Err(Error::NotPolynomial {
            degree: d,
            residual: worst,
        });
    }
    Ok(fit)
}

fn chebyshev_nodes(count: usize, half_width: f64) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let theta = core::f64::consts::PI * (2 * i + 1) as f64 / (2 * count) as f64;
            half_width * libm::cos(theta)
        })
        .collect()
}

/// Lagrange interpolation of matrix values, returned in the monomial basis.
fn interpolate(nodes: &[f64], values: &[CMatrix]) -> MatrixPoly {
    let dim = values[0].dim();
    let mut out = MatrixPoly::zero(dim);
    for (i, (&xi, vi)) in nodes.iter().zip(values).enumerate() {
        let mut basis = ScalarPoly::constant(1.0);
        for (j, &xj) in nodes.iter().enumerate() {
            if j != i {
                basis = basis.mul(&ScalarPoly::new(vec![-xj, 1.0])).scale(1.0 / (xi - xj));
            }
        }
        out = out.add(&MatrixPoly::from_scalar(dim, &basis).right_mul(vi));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_GRID;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        relative_residual(&(a - b), &[a, b]) < tol
    }

    #[test]
    fn scalar_gaussian_values() {
        let w = ExponentialWeight::new(ScalarPoly::monomial(2), CMatrix::zeros(1), None).unwrap();
        assert_eq!(w.eval(0.0), CMatrix::identity(1));
        assert!((w.eval(1.0)[(0, 0)].re - (-1.0f64).exp()).abs() < 1e-16);
        assert!((w.log_derivative(0.8).unwrap()[(0, 0)].re + 1.6).abs() < 1e-15);
    }

    #[test]
    fn nilpotent_two_by_two_by_hand() {
        let a = 0.9;
        let w = ExponentialWeight::new(ScalarPoly::monomial(2), CMatrix::from_real(&[0.0, 0.0, a, 0.0]), None).unwrap();
        for x in DEFAULT_GRID {
            let expected = CMatrix::from_real(&[1.0, a * x, a * x, 1.0 + a * a * x * x]).scale((-x * x).exp());
            assert!(close(&w.eval(x), &expected, 1e-15));
        }
    }

    #[test]
    fn rejects_bad_potentials_and_alphas() {
        let bad = [
            ScalarPoly::new(vec![0.0, 1.0]),
            ScalarPoly::new(vec![0.0, 0.0, 0.0, 1.0]),
            ScalarPoly::new(vec![0.0, 0.0, -1.0]),
        ];
        for v in bad {
            assert!(ExponentialWeight::new(v, CMatrix::zeros(1), None).is_err());
        }
        assert!(hermite_alpha_weight(&[1.0, 0.0]).is_err());
        assert!(hermite_alpha_weight(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn weight_is_hermitian_positive_definite() {
        let w = hermite_alpha_weight(&[1.0, 0.7, 1.3]).unwrap();
        for x in DEFAULT_GRID {
            let m = w.eval(x);
            assert!(m.is_hermitian(1e-15));
            assert!(cholesky(&m).is_ok());
        }
    }

    #[test]
    fn hermite_alpha_small_cases() {
        let w1 = hermite_alpha_weight(&[1.0]).unwrap();
        assert!((w1.eval(1.5)[(0, 0)].re - (-2.25f64).exp()).abs() < 1e-16);

        let x = 0.4;
        assert_eq!(
            alpha_lower_factor(&[1.0, 1.0], x),
            CMatrix::from_real(&[1.0, 0.0, 2.0 * x, 1.0])
        );
        assert_eq!(
            alpha_ladder_matrix(&[1.0, 1.0]),
            CMatrix::from_real(&[0.0, 0.0, 2.0, 0.0])
        );

        let w3 = hermite_alpha_weight(&[1.0, 1.0, 1.0]).unwrap();
        let l0 = alpha_lower_factor(&[1.0, 1.0, 1.0], 0.0);
        assert_eq!(l0, CMatrix::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0]));
        assert!(close(&w3.eval(0.0), &(&l0 * &l0.adjoint()), 1e-15));
    }

    #[test]
    fn alpha_weight_matches_lower_factor_product() {
        let alpha = [1.0, 0.5, 2.0];
        let w = hermite_alpha_weight(&alpha).unwrap();
        assert_eq!(w.ladder_matrix(), w.matrix());
        for x in DEFAULT_GRID {
            let l = alpha_lower_factor(&alpha, x);
            let expected = (&l * &l.adjoint()).scale((-x * x).exp());
            assert!(close(&w.eval(x), &expected, 1e-13));
        }
    }

    #[test]
    fn log_derivative_matches_finite_difference() {
        let h = 1e-5;
        for w in [
            hermite_alpha_weight(&[1.0, 1.0]).unwrap(),
            freud_weight(2, 1.0, 1.0, 0.5).unwrap(),
        ] {
            for x in [-1.0, 0.3, 1.2] {
                let fd = (&w.eval(x + h) - &w.eval(x - h)).scale(0.5 / h);
                let exact = &w.log_derivative(x).unwrap() * &w.eval(x);
                assert!(close(&fd, &exact, 1e-8));
                assert!(close(&w.derivative(x), &exact, 1e-12));
            }
        }
        let scalar = freud_weight(1, 1.0, 1.0, 0.7).unwrap();
        let x = 0.9;
        let expected = -4.0 * x * x * x + 2.0 * 0.7 * x;
        assert!((scalar.log_derivative(x).unwrap()[(0, 0)].re - expected).abs() < 1e-14);
    }

    #[test]
    fn normalization_examples() {
        let v = ScalarPoly::monomial(2);
        let a = CMatrix::from_real(&[0.0, 0.0, 1.5, 0.0]);
        let (w, f) = normalize_weight(&v, &a, &CMatrix::identity(2), &CMatrix::identity(2)).unwrap();
        assert_eq!(w.matrix(), &a);
        assert_eq!(f, CMatrix::identity(2));

        let (w, f) = normalize_weight(
            &v,
            &CMatrix::zeros(2),
            &CMatrix::diag(&[4.0, 1.0]),
            &CMatrix::identity(2),
        )
        .unwrap();
        assert_eq!(f, CMatrix::diag(&[2.0, 1.0]));
        assert_eq!(w.matrix(), &CMatrix::zeros(2));

        let fw = FactoredWeight::new(
            v,
            CMatrix::from_real(&[0.3, 0.0, 1.0, -0.2]),
            CMatrix::from_real(&[2.0, 0.5, 0.5, 1.0]),
            CMatrix::from_real(&[1.0, 0.4, -0.3, 2.0]),
        )
        .unwrap();
        let (red, f) = fw.normalize().unwrap();
        for x in [-1.0, 0.0, 2.0] {
            let rebuilt = &(&f * &red.eval(x)) * &f.adjoint();
            assert!(close(&fw.eval(x), &rebuilt, 1e-12));
        }
    }

    #[test]
    fn pearson_alphas() {
        let a2 = pearson_alpha_parameters(2);
        assert_eq!(a2, vec![1.0, 0.5]);
        let a3 = pearson_alpha_parameters(3);
        assert!((a3[1] - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((a3[2] - 0.5).abs() < 1e-15);
        for n in 2..6 {
            let a = alpha_ladder_matrix(&pearson_alpha_parameters(n));
            let lhs = a.commutator(&a.adjoint());
            let rhs = &number_matrix(n).scale(2.0) - &CMatrix::real_scalar(n, (n + 1) as f64);
            assert!(close(&lhs, &rhs, 1e-14), "N={n}");
        }
    }

    #[test]
    fn freud_parameters() {
        assert_eq!(freud_mu(2, 1.0, 1.0), vec![0.0, 2.0]);
        assert!(freud_mu(5, 0.3, 2.0)[0] == 0.0);
        let w = freud_weight(1, 1.0, 1.0, 0.5).unwrap();
        let x = 1.1f64;
        assert!((w.eval(x)[(0, 0)].re - (-x.powi(4) + 0.5 * x * x).exp()).abs() < 1e-15);
        assert!(freud_weight(3, -5.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn hermite_pearson_polynomial() {
        let v1 = pearson_v_hermite(&[1.0]).unwrap();
        assert_eq!(
            v1,
            MatrixPoly::new(1, vec![CMatrix::zeros(1), CMatrix::real_scalar(1, 2.0)])
        );

        for n in 2..=4 {
            let alpha = pearson_alpha_parameters(n);
            let v = pearson_v_hermite(&alpha).unwrap();
            assert_eq!(v.leading(), alpha_ladder_matrix(&alpha).adjoint());
            let w = hermite_alpha_weight(&alpha).unwrap();
            for x in DEFAULT_GRID {
                let wp = w.derivative(x);
                let wv = &w.eval(x) * &v.eval(x);
                assert!(relative_residual(&(&wp + &wv), &[&wp, &wv]) < 1e-10, "N={n} x={x}");
            }
            let fit = pearson_v_numeric(&w, 2).unwrap();
            for k in 0..3 {
                assert!((&fit.coeff(k) - &v.coeff(k)).frobenius_norm() < 1e-10);
            }
        }
    }

    #[test]
    fn numeric_pearson_fits() {
        let scalar = hermite_alpha_weight(&[1.0]).unwrap();
        let fit = pearson_v_numeric(&scalar, 2).unwrap();
        assert!(fit.coeff(2).frobenius_norm() < 1e-12);
        assert!((fit.coeff(1)[(0, 0)].re - 2.0).abs() < 1e-12);

        let freud = freud_weight(2, 1.0, 1.0, 0.0).unwrap();
        let v = pearson_v_numeric(&freud, 3).unwrap();
        assert_eq!(v.degree(), 3);
        assert!(matches!(
            pearson_v_numeric(&freud, 2),
            Err(Error::NotPolynomial { degree: 2, .. })
        ));
    }
}
