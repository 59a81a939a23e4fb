//! JSON and CSV encodings. Complex numbers are `[re, im]`, matrices are arrays of rows.

use std::io::Write;

use mvop_core::hermite_fast::FastHermite;
use mvop_core::{CMatrix, DiffOp, ExponentialWeight, MvopFamily};
use serde_json::{json, Value};

use crate::config::Config;

pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        m.rows()
            .map(|row| Value::Array(row.iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

fn matrices_json<'a>(ms: impl IntoIterator<Item = &'a CMatrix>) -> Value {
    Value::Array(ms.into_iter().map(matrix_json).collect())
}

/// Potential, `A`, `L₀` and `Ã` of a weight, plus the config it came from.
pub fn weight_json(config: Option<&Config>, w: &ExponentialWeight) -> Value {
    json!({
        "config": config,
        "potential": w.potential().coeffs(),
        "A": matrix_json(w.matrix()),
        "left": w.left().map(matrix_json),
        "ladder_matrix": matrix_json(w.ladder_matrix()),
    })
}

/// `{N, n_max, weight, P, H, B, C}` with `P[n][k]` the coefficient of `x^k`.
pub fn family_json(config: Option<&Config>, w: &ExponentialWeight, fam: &MvopFamily) -> Value {
    let n_max = fam.n_max();
    json!({
        "N": fam.dim(),
        "n_max": n_max,
        "weight": weight_json(config, w),
        "P": fam.polys()[..=n_max].iter().map(|p| matrices_json(p.coeffs())).collect::<Vec<_>>(),
        "H": matrices_json(&fam.norms()[..=n_max]),
        "B": matrices_json(fam.b_seq()),
        "C": matrices_json(fam.c_seq()),
    })
}

/// `{band, n_max, coeff}` with `coeff[j − lo][n]`.
pub fn operator_json(op: &DiffOp) -> Value {
    let (lo, hi) = op.band();
    let coeff: Vec<Value> = (lo..=hi)
        .map(|j| {
            Value::Array(
                (0..=op.n_max())
                    .map(|n| matrix_json(&op.coeff(j, n).expect("within band and range")))
                    .collect(),
            )
        })
        .collect();
    json!({ "band": [lo, hi], "n_max": op.n_max(), "coeff": coeff })
}

/// One row per `n`: `n, h_1, …, h_N` (real parts of the diagonal of `H(n)`).
pub fn norms_csv<W: Write>(norms: &[CMatrix], out: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let dim = norms.first().map_or(0, CMatrix::dim);
    let mut header = vec!["n".to_string()];
    header.extend((1..=dim).map(|j| format!("h_{j}")));
    wtr.write_record(&header)?;
    for (n, h) in norms.iter().enumerate() {
        let mut row = vec![n.to_string()];
        row.extend(h.diagonal().iter().map(|z| format!("{:e}", z.re)));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Norms, `ξ(n,j,k)` and `P(x,n)` on `grid` from the fast path.
pub fn fast_hermite_json(fast: &FastHermite, grid: &[f64]) -> mvop_core::Result<Value> {
    let dim = fast.alpha().len();
    let mut xi = Vec::new();
    let mut samples = Vec::new();
    for n in 0..=fast.n_max() {
        let t = fast.xi(n)?;
        xi.push(
            (0..dim)
                .map(|j| (0..dim).map(|k| t.get(j, k)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        );
        let ps = grid
            .iter()
            .map(|&x| Ok(json!({ "x": x, "P": matrix_json(&fast.eval(x, n)?) })))
            .collect::<mvop_core::Result<Vec<_>>>()?;
        samples.push(ps);
    }
    Ok(json!({
        "N": dim,
        "n_max": fast.n_max(),
        "alpha": fast.alpha(),
        "H": matrices_json(fast.norms()),
        "xi": xi,
        "P": samples,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mvop_core::Complex64;

    #[test]
    fn complex_encoding() {
        let m = CMatrix::from_complex(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.5),
            Complex64::new(3.0, 0.0),
        ]);
        assert_eq!(
            matrix_json(&m),
            json!([[[1.0, 2.0], [0.0, 0.0]], [[-1.0, 0.5], [3.0, 0.0]]])
        );
    }

    #[test]
    fn norms_table() {
        let mut buf = Vec::new();
        norms_csv(&[CMatrix::diag(&[1.0, 3.0]), CMatrix::diag(&[0.5, 2.0])], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "n,h_1,h_2");
        assert_eq!(lines[2], "1,5e-1,2e0");
    }
}
