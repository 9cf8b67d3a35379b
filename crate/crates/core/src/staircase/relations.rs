use serde::{Deserialize, Serialize};

use super::basis::DerivedBasis;
use crate::blockmat::BlockTridiagonal;
use crate::error::{invalid, Error, Result};
use crate::linalg::{op_norm, trace, trace_norm, Mat};
use crate::tol::le_rel;

fn diagonal_of(d: &Mat) -> Result<Vec<f64>> {
    let n = d.nrows();
    if d.ncols() != n {
        return invalid("D must be square");
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && d[(i, j)].norm() != 0.0 {
                return invalid(format!("D is not diagonal: entry ({}, {}) is nonzero", i + 1, j + 1));
            }
        }
    }
    Ok((0..n).map(|i| d[(i, i)].re).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialTraceReport {
    pub stride: usize,
    /// `Σ_{i ≤ ⌊n/stride⌋} (De_i, e_i)`.
    pub e_curve: Vec<f64>,
    /// `Σ_{i ≤ n} (Df_i, f_i)`.
    pub f_curve: Vec<f64>,
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Partial traces of a positive diagonal `D` in `e` against the derived basis.
pub fn partial_trace_relations(d: &Mat, basis: &DerivedBasis, stride: usize, rel: f64) -> Result<PartialTraceReport> {
    if stride == 0 {
        return invalid("stride must be positive");
    }
    let diag = diagonal_of(d)?;
    if diag.iter().any(|v| *v < 0.0) || (0..d.nrows()).any(|i| d[(i, i)].im != 0.0) {
        return Err(Error::Precondition("D must be positive".into()));
    }
    if basis.f.nrows() != diag.len() {
        return invalid("basis dimension does not match D");
    }
    let mut e_prefix = vec![0.0];
    for v in &diag {
        e_prefix.push(e_prefix.last().unwrap() + v);
    }
    let mut acc = 0.0;
    let mut f_curve = Vec::with_capacity(basis.len());
    for col in basis.f.column_iter() {
        acc += col.iter().zip(&diag).map(|(z, w)| z.norm_sqr() * w).sum::<f64>();
        f_curve.push(acc);
    }
    let e_curve: Vec<f64> = (1..=basis.len()).map(|n| e_prefix[(n / stride).min(diag.len())]).collect();
    let first_violation = (0..e_curve.len()).find(|&i| !le_rel(e_curve[i], f_curve[i], rel)).map(|i| i + 1);
    Ok(PartialTraceReport { stride, e_curve, f_curve, holds: first_violation.is_none(), first_violation })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormChainLink {
    pub n: usize,
    /// `Σ_{i ≤ ⌊s_n/stride⌋} d_i` in the original basis.
    pub e_sum: f64,
    /// `Σ_{i ≤ s_n} (Df_i, f_i)`.
    pub f_sum: f64,
    /// `Re trace(A_nY_n − X_nB_n)`.
    pub block_trace: f64,
    /// `‖A_nY_n − X_nB_n‖_1`.
    pub trace_norm: f64,
    /// `k_n (‖A_n‖‖Y_n‖ + ‖X_n‖‖B_n‖)`.
    pub holder: f64,
    /// `k_n (‖A_n‖ + ‖B_n‖)(‖Y_n‖ + ‖X_n‖)`.
    pub product: f64,
    pub e_le_f: bool,
    /// `f_sum = block_trace ≤ trace_norm ≤ holder ≤ product`.
    pub chain_from_trace: bool,
}

/// Lower bounds on block norms of `C`, `Z` from partial traces of `D = CZ − ZC`.
/// `d` is the diagonal of `D` in the original basis, `d_f` is `D` in the derived basis.
pub fn norm_chain(
    d: &[f64],
    d_f: &Mat,
    cm: &BlockTridiagonal,
    zm: &BlockTridiagonal,
    stride: usize,
    rel: f64,
) -> Result<Vec<NormChainLink>> {
    if cm.sizes != zm.sizes || d_f.nrows() != cm.dim() {
        return invalid("C, Z and D must share the block sizes");
    }
    if stride == 0 {
        return invalid("stride must be positive");
    }
    let mut links = Vec::new();
    for n in 1..cm.levels() {
        let s = cm.sizes.s(n);
        let k = cm.sizes.k(n) as f64;
        let e_sum: f64 = d.iter().take(s / stride).sum();
        let f_sum: f64 = (0..s).map(|i| d_f[(i, i)].re).sum();
        let (a, b) = (&cm.uppers[n - 1], &cm.lowers[n - 1]);
        let (x, y) = (&zm.uppers[n - 1], &zm.lowers[n - 1]);
        let core = a * y - x * b;
        let block_trace = trace(&core).re;
        let tn = trace_norm(&core);
        let (na, nb, nx, ny) = (op_norm(a), op_norm(b), op_norm(x), op_norm(y));
        let holder = k * (na * ny + nx * nb);
        let product = k * (na + nb) * (ny + nx);
        let scale = tn.max(f_sum.abs()).max(f64::MIN_POSITIVE);
        let chain_from_trace = (f_sum - block_trace).abs() <= rel * scale + 1e-12
            && le_rel(block_trace, tn, rel)
            && le_rel(tn, holder, rel)
            && le_rel(holder, product, rel);
        links.push(NormChainLink {
            n,
            e_sum,
            f_sum,
            block_trace,
            trace_norm: tn,
            holder,
            product,
            e_le_f: le_rel(e_sum, f_sum, rel),
            chain_from_trace,
        });
    }
    Ok(links)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_diag;

    #[test]
    fn identity_basis_on_identity() {
        let d = real_diag(&[1.0; 10]);
        let basis = DerivedBasis { f: Mat::identity(10, 10), g_log: vec![], requested: 10, truncated: false };
        let r = partial_trace_relations(&d, &basis, 5, 1e-10).unwrap();
        assert!(r.holds);
        assert_eq!(r.f_curve[9], 10.0);
        assert_eq!(r.e_curve[9], 2.0);
    }

    #[test]
    fn non_diagonal_rejected() {
        let mut d = real_diag(&[1.0, 2.0]);
        d[(0, 1)] = crate::linalg::c(1.0);
        let basis = DerivedBasis { f: Mat::identity(2, 2), g_log: vec![], requested: 2, truncated: false };
        assert!(matches!(partial_trace_relations(&d, &basis, 5, 1e-10), Err(Error::InvalidArgument(_))));
    }
}
