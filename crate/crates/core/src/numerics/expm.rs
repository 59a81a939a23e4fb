use super::CMatrix;

/// `e^{xA}`.
///
/// Nilpotent `A` (checked through `A^N = 0`) gets the terminating series, which is
/// exact up to rounding in the products. Everything else goes through scaling and
/// squaring of a truncated Taylor series.
pub fn mat_exp(a: &CMatrix, x: f64) -> CMatrix {
    let n = a.dim();
    let xa = a.scale(x);
    if is_nilpotent(a) {
        let mut term = CMatrix::identity(n);
        let mut acc = term.clone();
        for k in 1..n {
            term = (&term * &xa).scale(1.0 / k as f64);
            acc += &term;
        }
        return acc;
    }

    let norm = xa.frobenius_norm();
    let squarings = if norm > 0.5 {
        libm::ceil(libm::log2(norm / 0.5)) as u32
    } else {
        0
    };
    let scaled = xa.scale(libm::ldexp(1.0, -(squarings as i32)));
    let mut term = CMatrix::identity(n);
    let mut acc = term.clone();
    for k in 1..40 {
        term = (&term * &scaled).scale(1.0 / k as f64);
        acc += &term;
        if term.frobenius_norm() <= 1e-17 * acc.frobenius_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

fn is_nilpotent(a: &CMatrix) -> bool {
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return true;
    }
    let n = a.dim();
    a.pow(n).frobenius_norm() <= 1e-14 * libm::pow(scale, n as f64).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::relative_residual;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn zero_matrix_gives_identity() {
        for n in 1..4 {
            assert_eq!(mat_exp(&CMatrix::zeros(n), 5.0), CMatrix::identity(n));
        }
    }

    #[test]
    fn nilpotent_series_terminates() {
        let a = 1.7;
        let x = -0.6;
        let m = CMatrix::from_real(&[0.0, 0.0, a, 0.0]);
        assert_eq!(mat_exp(&m, x), CMatrix::from_real(&[1.0, 0.0, a * x, 1.0]));

        let shift = CMatrix::from_real(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let e = mat_exp(&shift, 2.0);
        assert!((e[(2, 0)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_exponential() {
        let c = Complex64::new(0.3, -1.2);
        let e = mat_exp(&CMatrix::scalar(1, c), 2.5);
        let expected = (c * 2.5).exp();
        assert!((e[(0, 0)] - expected).norm() < 1e-13 * expected.norm());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let a = CMatrix::from_real(&[0.2, 1.0, -0.5, 0.1]);
        let (x, h) = (0.7, 1e-4);
        let fd = (&mat_exp(&a, x + h) - &mat_exp(&a, x - h)).scale(0.5 / h);
        let exact = &a * &mat_exp(&a, x);
        assert!((&fd - &exact).frobenius_norm() < 1e-7);
    }

    proptest! {
        #[test]
        fn group_property(entries in proptest::collection::vec(-1.5f64..1.5, 9), x in -2.0f64..2.0, y in -2.0f64..2.0) {
            let a = CMatrix::from_real(&entries);
            let lhs = &mat_exp(&a, x) * &mat_exp(&a, y);
            let rhs = mat_exp(&a, x + y);
            let err = relative_residual(&(&lhs - &rhs), &[&lhs, &rhs]);
            prop_assert!(err < 1e-12, "{}", err);
        }

        #[test]
        fn group_property_nilpotent(l in proptest::collection::vec(-3.0f64..3.0, 3), x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let a = CMatrix::from_real(&[0.0, 0.0, 0.0, l[0], 0.0, 0.0, l[1], l[2], 0.0]);
            let lhs = &mat_exp(&a, x) * &mat_exp(&a, y);
            let rhs = mat_exp(&a, x + y);
            prop_assert!(relative_residual(&(&lhs - &rhs), &[&lhs, &rhs]) < 1e-12);
        }
    }
}
