use num_complex::Complex64;
use num_traits::Zero;

use super::CMatrix;
use crate::error::{Error, Result};

/// Lower-triangular `K` with positive diagonal and `K·K* = T`.
pub fn cholesky(t: &CMatrix) -> Result<CMatrix> {
    let n = t.dim();
    let mut k = CMatrix::zeros(n);
    for j in 0..n {
        let mut d = t[(j, j)].re;
        for p in 0..j {
            d -= k[(j, p)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 || d.is_infinite() {
            return Err(Error::NotPositiveDefinite { row: j, pivot: d });
        }
        let d = libm::sqrt(d);
        k[(j, j)] = Complex64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = t[(i, j)];
            for p in 0..j {
                s -= k[(i, p)] * k[(j, p)].conj();
            }
            k[(i, j)] = s / d;
        }
    }
    Ok(k)
}

/// Inverse of a unit lower-triangular matrix by forward substitution.
pub fn unit_lower_inverse(l: &CMatrix) -> Result<CMatrix> {
    let n = l.dim();
    let one = Complex64::new(1.0, 0.0);
    for i in 0..n {
        if l[(i, i)] != one || ((i + 1)..n).any(|j| !l[(i, j)].is_zero()) {
            return Err(Error::NotUnitLowerTriangular);
        }
    }
    let mut inv = CMatrix::identity(n);
    // Column by column: solve L·y = e_col.
    for col in 0..n {
        for i in (col + 1)..n {
            let mut s = Complex64::zero();
            for p in col..i {
                s -= l[(i, p)] * inv[(p, col)];
            }
            inv[(i, col)] = s;
        }
    }
    Ok(inv)
}
