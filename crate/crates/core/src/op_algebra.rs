//! Banded difference operators `Σ_j c_j(n) δ^j` with matrix coefficients.
//!
//! An operator acts on a sequence `P(·, n)` from the left:
//! `(M·P)(n) = Σ_j c_j(n) P(n+j)`, with `P` at negative index equal to zero.
//! Coefficients are tabulated for `0 ≤ n ≤ n_max`; a coefficient whose target
//! index `n + j` is negative can never contribute and is stored as zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::oracle::MvopFamily;
use crate::poly::ScalarPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct DiffOp {
    dim: usize,
    lo: i64,
    hi: i64,
    n_max: usize,
    // coeffs[j - lo][n]
    coeffs: Vec<Vec<CMatrix>>,
}

impl DiffOp {
    /// Builds an operator with band `[lo, hi]` from `f(j, n)`.
    pub fn from_fn(dim: usize, lo: i64, hi: i64, n_max: usize, mut f: impl FnMut(i64, usize) -> CMatrix) -> Self {
        assert!(lo <= hi, "empty band");
        let coeffs = (lo..=hi)
            .map(|j| {
                (0..=n_max)
                    .map(|n| {
                        if n as i64 + j < 0 {
                            CMatrix::zeros(dim)
                        } else {
                            let m = f(j, n);
                            assert_eq!(m.dim(), dim, "coefficient dimension mismatch");
                            m
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            dim,
            lo,
            hi,
            n_max,
            coeffs,
        }
    }

    pub fn zero(dim: usize, n_max: usize) -> Self {
        Self::from_fn(dim, 0, 0, n_max, |_, _| CMatrix::zeros(dim))
    }

    pub fn identity(dim: usize, n_max: usize) -> Self {
        Self::constant(&CMatrix::identity(dim), n_max)
    }

    /// Order-zero operator with the same coefficient for every `n`.
    pub fn constant(m: &CMatrix, n_max: usize) -> Self {
        Self::from_fn(m.dim(), 0, 0, n_max, |_, _| m.clone())
    }

    /// Order-zero operator `n ↦ g(n)`.
    pub fn diagonal(dim: usize, n_max: usize, mut g: impl FnMut(usize) -> CMatrix) -> Self {
        Self::from_fn(dim, 0, 0, n_max, |_, n| g(n))
    }

    /// `δ^j`.
    pub fn shift(dim: usize, j: i64, n_max: usize) -> Self {
        Self::from_fn(dim, j, j, n_max, |_, _| CMatrix::identity(dim))
    }

    /// Jacobi operator `L = δ + B(n) + C(n)δ⁻¹`, so that `L·P = xP`.
    pub fn recurrence_operator(fam: &MvopFamily) -> Self {
        let dim = fam.dim();
        let (b, c) = (fam.b_seq(), fam.c_seq());
        Self::from_fn(dim, -1, 1, fam.n_max(), |j, n| match j {
            1 => CMatrix::identity(dim),
            0 => b[n].clone(),
            _ => c[n].clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn band(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `c_j(n)`; zero outside the band or when `n + j < 0`.
    pub fn coeff(&self, j: i64, n: usize) -> Result<CMatrix> {
        if n > self.n_max {
            return Err(Error::OutOfRange {
                index: n,
                n_max: self.n_max,
            });
        }
        Ok(self.coeff_unchecked(j, n))
    }

    fn coeff_unchecked(&self, j: i64, n: usize) -> CMatrix {
        if j < self.lo || j > self.hi {
            CMatrix::zeros(self.dim)
        } else {
            self.coeffs[(j - self.lo) as usize][n].clone()
        }
    }

    fn coeff_ref(&self, j: i64, n: usize) -> Option<&CMatrix> {
        if j < self.lo || j > self.hi {
            None
        } else {
            Some(&self.coeffs[(j - self.lo) as usize][n])
        }
    }

    /// The sequence `n ↦ c_j(n)`.
    pub fn diagonal_seq(&self, j: i64) -> Vec<CMatrix> {
        (0..=self.n_max).map(|n| self.coeff_unchecked(j, n)).collect()
    }

    /// Band after dropping shifts whose coefficients all have norm `≤ tol`.
    pub fn effective_band(&self, tol: f64) -> Option<(i64, i64)> {
        let live: Vec<i64> = (self.lo..=self.hi)
            .filter(|&j| {
                self.coeffs[(j - self.lo) as usize]
                    .iter()
                    .any(|m| m.frobenius_norm() > tol)
            })
            .collect();
        Some((*live.first()?, *live.last()?))
    }

    /// Same operator restricted to `n ≤ n_max`.
    pub fn truncate(&self, n_max: usize) -> Result<Self> {
        if n_max > self.n_max {
            return Err(Error::OutOfRange {
                index: n_max,
                n_max: self.n_max,
            });
        }
        let mut out = self.clone();
        out.n_max = n_max;
        for row in &mut out.coeffs {
            row.truncate(n_max + 1);
        }
        Ok(out)
    }

    /// `(S∘T)_j(n) = Σ_{a+b=j} S_a(n) T_b(n+a)`, so that `(S∘T)·P = S·(T·P)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let reach = self.hi.max(0) as usize;
        if other.n_max < reach {
            return Err(Error::OutOfRange {
                index: reach,
                n_max: other.n_max,
            });
        }
        let n_max = self.n_max.min(other.n_max - reach);
        let dim = self.dim;
        Ok(Self::from_fn(
            dim,
            self.lo + other.lo,
            self.hi + other.hi,
            n_max,
            |j, n| {
                let mut acc = CMatrix::zeros(dim);
                for a in self.lo..=self.hi {
                    let target = n as i64 + a;
                    if target < 0 {
                        continue;
                    }
                    let b = j - a;
                    if let (Some(s), Some(t)) = (self.coeff_ref(a, n), other.coeff_ref(b, target as usize)) {
                        acc += &(s * t);
                    }
                }
                acc
            },
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let n_max = self.n_max.min(other.n_max);
        Ok(Self::from_fn(
            self.dim,
            self.lo.min(other.lo),
            self.hi.max(other.hi),
            n_max,
            |j, n| &self.coeff_unchecked(j, n) + &other.coeff_unchecked(j, n),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for row in &mut out.coeffs {
            for m in row {
                *m = m.scale(s);
            }
        }
        out
    }

    /// `S∘T − T∘S`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// `q(L)`, by repeated composition; the band grows to `[−deg q, deg q]` for a
    /// tridiagonal `L`, and every power eats `max(hi, 0)` rows of tabulation.
    pub fn op_poly(&self, q: &ScalarPoly) -> Result<Self> {
        let deg = q.degree();
        let mut power = Self::identity(self.dim, self.n_max);
        let mut acc = Self::constant(&CMatrix::real_scalar(self.dim, q.coeff(0)), self.n_max);
        for k in 1..=deg {
            power = if k == 1 { self.clone() } else { self.compose(&power)? };
            acc = acc.add(&power.scale(q.coeff(k)))?;
        }
        Ok(acc)
    }

    /// `A_j(n)δ^j ↦ A_j(n−j)* δ^{−j}`.
    pub fn star(&self) -> Self {
        let reach = (-self.lo).max(0) as usize;
        let n_max = self.n_max.saturating_sub(reach);
        Self::from_fn(self.dim, -self.hi, -self.lo, n_max, |i, n| {
            // New shift i comes from old shift j = −i evaluated at n − j = n + i.
            let src = n as i64 + i;
            if src < 0 || src as usize > self.n_max {
                CMatrix::zeros(self.dim)
            } else {
                self.coeff_unchecked(-i, src as usize).adjoint()
            }
        })
    }

    /// `M† = H(n) M* H(n)⁻¹`: coefficient `H(n) (M*)_i(n) H(n+i)⁻¹` at shift `i`.
    pub fn dagger(&self, h: &[CMatrix]) -> Result<Self> {
        let star = self.star();
        if h.is_empty() {
            return Err(Error::OutOfRange { index: 0, n_max: 0 });
        }
        let h_top = h.len() - 1;
        let reach = star.hi.max(0) as usize;
        let n_max = star.n_max.min(h_top.saturating_sub(reach));
        let h_inv = h[..=(n_max + reach).min(h_top)]
            .iter()
            .map(CMatrix::inverse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_fn(self.dim, star.lo, star.hi, n_max, |i, n| {
            let target = (n as i64 + i) as usize;
            &(&h[n] * &star.coeff_unchecked(i, n)) * &h_inv[target]
        }))
    }

    /// `Σ_j c_j(n) s(n+j)` for an arbitrary sequence `s`, zero at negative index.
    pub fn apply_seq(&self, n: usize, mut s: impl FnMut(usize) -> Result<CMatrix>) -> Result<CMatrix> {
        if n > self.n_max {
            return Err(Error::OutOfRange {
                index: n,
                n_max: self.n_max,
            });
        }
        let mut acc = CMatrix::zeros(self.dim);
        for j in self.lo..=self.hi {
            let target = n as i64 + j;
            if target < 0 {
                continue;
            }
            let c = &self.coeffs[(j - self.lo) as usize][n];
            if c.max_abs() == 0.0 {
                continue;
            }
            acc += &(c * &s(target as usize)?);
        }
        Ok(acc)
    }

    /// `(M·P)(x, n)`.
    pub fn apply(&self, fam: &MvopFamily, x: f64, n: usize) -> Result<CMatrix> {
        self.apply_seq(n, |m| fam.eval(x, m as i64))
    }

    /// Largest coefficient difference over the common band and range, relative
    /// to `max(1, largest coefficient)`.
    pub fn max_difference(&self, other: &Self) -> Result<f64> {
        check_dims(self, other)?;
        let n_max = self.n_max.min(other.n_max);
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for j in self.lo.min(other.lo)..=self.hi.max(other.hi) {
            for n in 0..=n_max {
                let (a, b) = (self.coeff_unchecked(j, n), other.coeff_unchecked(j, n));
                diff = diff.max((&a - &b).frobenius_norm());
                scale = scale.max(a.frobenius_norm()).max(b.frobenius_norm());
            }
        }
        Ok(diff / scale)
    }
}

fn check_dims(a: &DiffOp, b: &DiffOp) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

/// `(L^k)_j(n)` by summing over lattice paths: each step moves the index by
/// `+1` (weight `I`), `0` (weight `B`) or `−1` (weight `C`), read left to right.
/// Exponential in `k`; kept as an independent check of [`DiffOp::op_poly`].
pub fn power_coefficient_by_paths(b: &[CMatrix], c: &[CMatrix], k: usize, j: i64, n: usize) -> CMatrix {
    let dim = b[0].dim();
    let mut total = CMatrix::zeros(dim);
    let mut steps = vec![0i64; k];
    let combos = 3usize.pow(k as u32);
    for code in 0..combos {
        let mut rest = code;
        for s in steps.iter_mut() {
            *s = (rest % 3) as i64 - 1;
            rest /= 3;
        }
        if steps.iter().sum::<i64>() != j {
            continue;
        }
        let mut idx = n as i64;
        let mut prod = CMatrix::identity(dim);
        let mut alive = true;
        for &s in &steps {
            if idx < 0 || idx as usize >= b.len() {
                alive = false;
                break;
            }
            let m = match s {
                1 => CMatrix::identity(dim),
                0 => b[idx as usize].clone(),
                _ => c[idx as usize].clone(),
            };
            prod = &prod * &m;
            idx += s;
        }
        if alive && idx >= 0 {
            total += &prod;
        }
    }
    total
}
