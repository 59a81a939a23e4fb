//! Deformations `v(x,t) = v(x) + t·v̇(x)` of the potential and the lattice
//! equations they induce on `B(n)`, `C(n)`: Toda for `v̇ = x`, Langmuir for
//! `v̇ = x²`, and the Lax form `L̇ = [L, (L^j)₊]` on block truncations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::op_algebra::DiffOp;
use crate::oracle::{gram_schmidt_family, MvopFamily};
use crate::poly::ScalarPoly;
use crate::weights::ExponentialWeight;

/// `(Ḃ, Ċ)` from
/// `Ḃ(n) = (v̇(L))₋₁(n) − (v̇(L))₋₁(n+1)` and
/// `Ċ(n) = (v̇(L))₋₂(n) − (v̇(L))₋₂(n+1) + (v̇(L))₋₁(n)B(n−1) − B(n)(v̇(L))₋₁(n)`.
pub fn lattice_rhs(fam: &MvopFamily, vdot: &ScalarPoly) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    let vl = DiffOp::recurrence_operator(fam).op_poly(vdot)?;
    let dim = fam.dim();
    let top = vl.n_max().checked_sub(1).ok_or(Error::OutOfRange {
        index: 1,
        n_max: vl.n_max(),
    })?;
    let mut bdot = Vec::with_capacity(top + 1);
    let mut cdot = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let low = vl.coeff(-1, n)?;
        bdot.push(&low - &vl.coeff(-1, n + 1)?);
        if n == 0 {
            cdot.push(CMatrix::zeros(dim));
        } else {
            let mut c = &vl.coeff(-2, n)? - &vl.coeff(-2, n + 1)?;
            c += &(&low * fam.b(n - 1)?);
            c -= &(fam.b(n)? * &low);
            cdot.push(c);
        }
    }
    Ok((bdot, cdot))
}

/// `ExponentialWeight` with the potential moved to `v + t·v̇`.
pub fn deformed_weight(base: &ExponentialWeight, vdot: &ScalarPoly, t: f64) -> Result<ExponentialWeight> {
    ExponentialWeight::new(
        base.potential().add(&vdot.scale(t)),
        base.matrix().clone(),
        base.left().cloned(),
    )
}

/// Central differences of `B`, `C` in `t` against [`lattice_rhs`].
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDiffReport {
    /// worst `‖ΔB/2h − Ḃ‖ / max(1, ‖Ḃ‖)` over `n ≤ n_max`
    pub b: f64,
    pub c: f64,
}

impl FiniteDiffReport {
    pub fn max(&self) -> f64 {
        self.b.max(self.c)
    }
}

/// Central differences of families from [`gram_schmidt_family`] for `base + s·v̇`
/// at `s = t ± h`, against the lattice right-hand side at `s = t`.
pub fn finite_diff_check(
    base: &ExponentialWeight,
    vdot: &ScalarPoly,
    t: f64,
    h: f64,
    n_max: usize,
) -> Result<FiniteDiffReport> {
    let n_fam = n_max + vdot.degree() + 1;
    let fam_at = |s: f64| gram_schmidt_family(&deformed_weight(base, vdot, s)?, n_fam);
    let (plus, minus, mid) = (fam_at(t + h)?, fam_at(t - h)?, fam_at(t)?);
    let (bdot, cdot) = lattice_rhs(&mid, vdot)?;
    let mut report = FiniteDiffReport { b: 0.0, c: 0.0 };
    for n in 0..=n_max {
        let db = (plus.b(n)? - minus.b(n)?).scale(0.5 / h);
        let dc = (plus.c(n)? - minus.c(n)?).scale(0.5 / h);
        report.b = report
            .b
            .max(crate::numerics::relative_residual(&(&db - &bdot[n]), &[&bdot[n]]));
        report.c = report
            .c
            .max(crate::numerics::relative_residual(&(&dc - &cdot[n]), &[&cdot[n]]));
    }
    Ok(report)
}

/// For `v = v₀ + t₁v̇₁ + t₂v̇₂`: `∂_{t₂}` of the `v̇₁`-flow right-hand side for `B`
/// against `∂_{t₁}` of the `v̇₂`-flow one, both by central differences at `t₁ = t₂ = 0`.
pub fn flows_commute_check(
    base: &ExponentialWeight,
    vdot1: &ScalarPoly,
    vdot2: &ScalarPoly,
    h: f64,
    n_max: usize,
) -> Result<f64> {
    let n_fam = n_max + vdot1.degree().max(vdot2.degree()) + 1;
    let rhs_at = |shift: &ScalarPoly, s: f64, flow: &ScalarPoly| -> Result<Vec<CMatrix>> {
        let fam = gram_schmidt_family(&deformed_weight(base, shift, s)?, n_fam)?;
        Ok(lattice_rhs(&fam, flow)?.0)
    };
    let d21_plus = rhs_at(vdot2, h, vdot1)?;
    let d21_minus = rhs_at(vdot2, -h, vdot1)?;
    let d12_plus = rhs_at(vdot1, h, vdot2)?;
    let d12_minus = rhs_at(vdot1, -h, vdot2)?;
    let mut worst: f64 = 0.0;
    for n in 0..=n_max {
        let a = (&d21_plus[n] - &d21_minus[n]).scale(0.5 / h);
        let b = (&d12_plus[n] - &d12_minus[n]).scale(0.5 / h);
        worst = worst.max(crate::numerics::relative_residual(&(&a - &b), &[&a, &b]));
    }
    Ok(worst)
}

/// Block truncation of `L`: identity above the diagonal, `B(n)` on it, `C(n)` below.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTridiag {
    dim: usize,
    b: Vec<CMatrix>,
    c: Vec<CMatrix>,
}

impl BlockTridiag {
    /// `c[0]` is ignored (treated as zero).
    pub fn new(b: Vec<CMatrix>, mut c: Vec<CMatrix>) -> Self {
        assert_eq!(b.len(), c.len(), "block counts differ");
        assert!(!b.is_empty(), "empty truncation");
        let dim = b[0].dim();
        c[0] = CMatrix::zeros(dim);
        Self { dim, b, c }
    }

    pub fn from_family(fam: &MvopFamily, n_blocks: usize) -> Result<Self> {
        if n_blocks == 0 || n_blocks > fam.n_max() + 1 {
            return Err(Error::OutOfRange {
                index: n_blocks,
                n_max: fam.n_max() + 1,
            });
        }
        Ok(Self::new(
            fam.b_seq()[..n_blocks].to_vec(),
            fam.c_seq()[..n_blocks].to_vec(),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_blocks(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[CMatrix] {
        &self.b
    }

    pub fn c(&self) -> &[CMatrix] {
        &self.c
    }

    pub fn to_blocks(&self) -> BlockMatrix {
        let (d, nb) = (self.dim, self.n_blocks());
        let mut m = BlockMatrix::zeros(d, nb);
        let id = CMatrix::identity(d);
        for r in 0..nb {
            m.set(r, r, &self.b[r]);
            if r + 1 < nb {
                m.set(r, r + 1, &id);
                m.set(r + 1, r, &self.c[r + 1]);
            }
        }
        m
    }
}

/// Square matrix of `n_blocks × n_blocks` blocks of size `dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    dim: usize,
    n_blocks: usize,
    dense: CMatrix,
}

impl BlockMatrix {
    pub fn zeros(dim: usize, n_blocks: usize) -> Self {
        Self {
            dim,
            n_blocks,
            dense: CMatrix::zeros(dim * n_blocks),
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn block(&self, r: usize, c: usize) -> CMatrix {
        self.dense.block(r * self.dim, c * self.dim, self.dim)
    }

    pub fn set(&mut self, r: usize, c: usize, m: &CMatrix) {
        self.dense.set_block(r * self.dim, c * self.dim, m);
    }

    fn with_dense(&self, dense: CMatrix) -> Self {
        Self {
            dim: self.dim,
            n_blocks: self.n_blocks,
            dense,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.with_dense(&self.dense * &other.dense)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.with_dense(&self.dense - &other.dense)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.with_dense(&self.dense + &other.dense)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.with_dense(self.dense.scale(s))
    }

    pub fn pow(&self, j: usize) -> Self {
        self.with_dense(self.dense.pow(j))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.with_dense(self.dense.commutator(&other.dense))
    }

    fn keep(&self, pred: impl Fn(usize, usize) -> bool) -> Self {
        let mut out = Self::zeros(self.dim, self.n_blocks);
        for r in 0..self.n_blocks {
            for c in 0..self.n_blocks {
                if pred(r, c) {
                    out.set(r, c, &self.block(r, c));
                }
            }
        }
        out
    }

    /// Blocks on and above the diagonal.
    pub fn upper_part(&self) -> Self {
        self.keep(|r, c| r <= c)
    }

    /// Blocks strictly below the diagonal.
    pub fn lower_part(&self) -> Self {
        self.keep(|r, c| r > c)
    }

    /// Largest block difference over rows `< rows`.
    pub fn max_difference_in_rows(&self, other: &Self, rows: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..rows.min(self.n_blocks) {
            for c in 0..self.n_blocks.min(other.n_blocks) {
                worst = worst.max((&self.block(r, c) - &other.block(r, c)).frobenius_norm());
            }
        }
        worst
    }
}

/// Rows of a `j`-flow bracket on `n_blocks` blocks that do not see the cut.
pub fn interior_rows(n_blocks: usize, j: usize) -> usize {
    n_blocks.saturating_sub(j + 1)
}

fn check_truncation(n_blocks: usize, j: usize) -> Result<()> {
    if j == 0 || n_blocks <= j + 2 {
        return Err(Error::TruncationTooSmall { n_blocks, flow: j });
    }
    Ok(())
}

/// `[L, (L^j)₊]` on the truncation; only rows below [`interior_rows`] are meaningful.
pub fn lax_bracket(l: &BlockTridiag, j: usize) -> Result<BlockMatrix> {
    check_truncation(l.n_blocks(), j)?;
    let lm = l.to_blocks();
    Ok(lm.commutator(&lm.pow(j).upper_part()))
}

/// `[L,(L^j)₊] + [L,(L^j)₋]` over interior rows; it vanishes because `[L, L^j] = 0`.
pub fn lax_split_residual(l: &BlockTridiag, j: usize) -> Result<f64> {
    check_truncation(l.n_blocks(), j)?;
    let lm = l.to_blocks();
    let lj = lm.pow(j);
    let plus = lm.commutator(&lj.upper_part());
    let minus = lm.commutator(&lj.lower_part());
    let zero = BlockMatrix::zeros(l.dim(), l.n_blocks());
    Ok(plus
        .add(&minus)
        .max_difference_in_rows(&zero, interior_rows(l.n_blocks(), j)))
}

/// Interior diagonal and subdiagonal blocks of `[L,(L^j)₊]` against the lattice
/// right-hand side for `v̇ = x^j`, on `n_interior` rows of a truncation of
/// `n_interior + j + 3` blocks. Relative to `max(1, ‖block‖)`.
pub fn lax_vs_lattice(fam: &MvopFamily, j: usize, n_interior: usize) -> Result<f64> {
    let n_blocks = n_interior + j + 3;
    let l = BlockTridiag::from_family(fam, n_blocks)?;
    let bracket = lax_bracket(&l, j)?;
    let (bdot, cdot) = lattice_rhs(fam, &ScalarPoly::monomial(j))?;
    if bdot.len() < n_interior {
        return Err(Error::OutOfRange {
            index: n_interior,
            n_max: bdot.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for r in 0..n_interior {
        let diag = bracket.block(r, r);
        worst = worst.max(crate::numerics::relative_residual(&(&diag - &bdot[r]), &[&bdot[r]]));
        if r > 0 {
            let sub = bracket.block(r, r - 1);
            worst = worst.max(crate::numerics::relative_residual(&(&sub - &cdot[r]), &[&cdot[r]]));
        }
    }
    Ok(worst)
}

type Slopes = (Vec<CMatrix>, Vec<CMatrix>);

/// One sample of [`lax_evolve`].
#[derive(Clone, Debug)]
pub struct LaxSample {
    pub t: f64,
    pub state: BlockTridiag,
}

/// Classical RK4 for `L̇ = [L,(L^j)₊]` on a fixed truncation, recording every
/// `record_every` steps. The truncation is treated as a closed finite lattice;
/// this is a demonstration, not an accuracy claim about the semi-infinite flow.
pub fn lax_evolve(l: &BlockTridiag, j: usize, t_end: f64, step: f64, record_every: usize) -> Result<Vec<LaxSample>> {
    check_truncation(l.n_blocks(), j)?;
    let rhs = |s: &BlockTridiag| -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
        let br = lax_bracket(s, j)?;
        let nb = s.n_blocks();
        let b = (0..nb).map(|r| br.block(r, r)).collect();
        let c = (0..nb)
            .map(|r| {
                if r == 0 {
                    CMatrix::zeros(s.dim())
                } else {
                    br.block(r, r - 1)
                }
            })
            .collect();
        Ok((b, c))
    };
    let axpy = |s: &BlockTridiag, k: &(Vec<CMatrix>, Vec<CMatrix>), h: f64| -> BlockTridiag {
        BlockTridiag::new(
            s.b.iter().zip(&k.0).map(|(x, d)| x + &d.scale(h)).collect(),
            s.c.iter().zip(&k.1).map(|(x, d)| x + &d.scale(h)).collect(),
        )
    };
    let steps = libm::round(t_end / step) as usize;
    let record_every = record_every.max(1);
    let mut state = l.clone();
    let mut out = Vec::with_capacity(steps / record_every + 1);
    out.push(LaxSample {
        t: 0.0,
        state: state.clone(),
    });
    for i in 1..=steps {
        let k1 = rhs(&state)?;
        let k2 = rhs(&axpy(&state, &k1, 0.5 * step))?;
        let k3 = rhs(&axpy(&state, &k2, 0.5 * step))?;
        let k4 = rhs(&axpy(&state, &k3, step))?;
        let nb = state.n_blocks();
        let combine = |sel: fn(&Slopes) -> &Vec<CMatrix>, r: usize| -> CMatrix {
            let mut acc = sel(&k1)[r].clone();
            acc += &sel(&k2)[r].scale(2.0);
            acc += &sel(&k3)[r].scale(2.0);
            acc += &sel(&k4)[r];
            acc.scale(step / 6.0)
        };
        let b = (0..nb).map(|r| &state.b[r] + &combine(|k| &k.0, r)).collect();
        let c = (0..nb).map(|r| &state.c[r] + &combine(|k| &k.1, r)).collect();
        state = BlockTridiag::new(b, c);
        if i % record_every == 0 || i == steps {
            out.push(LaxSample {
                t: i as f64 * step,
                state: state.clone(),
            });
        }
    }
    Ok(out)
}
