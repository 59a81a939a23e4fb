//! Dense complex matrices and the handful of kernels built on them.

mod expm;
mod factor;
mod matrix;

pub use expm::mat_exp;
pub use factor::{cholesky, unit_lower_inverse};
pub use matrix::CMatrix;

/// `‖residual‖_F / max(1, max_i ‖terms_i‖_F)`.
pub fn relative_residual(residual: &CMatrix, terms: &[&CMatrix]) -> f64 {
    let scale = terms.iter().map(|t| t.frobenius_norm()).fold(1.0, f64::max);
    residual.frobenius_norm() / scale
}

/// A residual matrix and the size of the terms it is a difference of.
#[derive(Clone, Debug)]
pub struct Residual {
    pub matrix: CMatrix,
    pub scale: f64,
}

impl Residual {
    pub fn new(matrix: CMatrix, terms: &[&CMatrix]) -> Self {
        let scale = terms.iter().map(|t| t.frobenius_norm()).fold(1.0, f64::max);
        Self { matrix, scale }
    }

    pub fn relative(&self) -> f64 {
        self.matrix.frobenius_norm() / self.scale
    }
}
