//! Matrix-valued orthogonal polynomials for exponential-type weights.
//!
//! The crate is `no_std` (it only needs `alloc`). It is organised bottom-up:
//!
//! * [`numerics`]: dense complex matrices, Cholesky, unit-lower inversion, `e^{xA}`.
//! * [`poly`]: scalar and matrix polynomials, physicists' Hermite polynomials.
//! * [`weights`]: exponential weights `e^{-v(x)} L₀ e^{xA} e^{xA*} L₀*` and their Pearson data.
//! * [`oracle`]: composite Gauss–Legendre quadrature and Gram–Schmidt construction of the
//!   monic family, the ground truth every other identity is checked against.
//! * [`op_algebra`]: banded difference operators with matrix coefficients acting on the degree.
//! * [`differential`]: matrix differential operators acting on the variable from the right.
//! * [`ladder`], [`hermite_fast`], [`pearson`], [`deformation`], [`duran_ismail`]: the
//!   structural identities and the fast Hermite-type pipeline.
//!
//! Residuals follow one convention throughout: a Frobenius norm divided by
//! `max(1, largest participating term)`, see [`numerics::relative_residual`].

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod deformation;
pub mod differential;
pub mod duran_ismail;
mod error;
pub mod hermite_fast;
pub mod ladder;
pub mod numerics;
pub mod op_algebra;
pub mod oracle;
pub mod pearson;
pub mod poly;
pub mod weights;

pub use error::{Error, Result};
pub use numerics::CMatrix;
pub use op_algebra::DiffOp;
pub use oracle::{MvopFamily, QuadratureRule};
pub use poly::{MatrixPoly, ScalarPoly};
pub use weights::{ExponentialWeight, MatrixWeight};

pub use num_complex::Complex64;

/// Default residual grid used by the identity checks.
pub const DEFAULT_GRID: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
