//! Residuals of the block equations behind `CZ − ZC = T` for block tridiagonal `C`, `Z`.
//!
//! With `C = (C_n, A_n, B_n)` and `Z = (Z_n, X_n, Y_n)` the blocks of the
//! commutator are
//!
//! * `(n, n)`: `A_nY_n − X_nB_n + B_{n−1}X_{n−1} − Y_{n−1}A_{n−1} + C_nZ_n − Z_nC_n`
//! * `(n, n+1)`: `C_nX_n − Z_nA_n + A_nZ_{n+1} − X_nC_{n+1}`
//! * `(n+1, n)`: `B_nZ_n − Y_nC_n + C_{n+1}Y_n − Z_{n+1}B_n`
//! * `(n, n+2)`: `A_nX_{n+1} − X_nA_{n+1}`
//! * `(n+2, n)`: `B_{n+1}Y_n − Y_{n+1}B_n`
//!
//! Residual norms are Frobenius norms.

use serde::{Deserialize, Serialize};

use super::tridiag::BlockTridiagonal;
use crate::error::{invalid, Error, Result};
use crate::linalg::{frobenius, op_norm, real_diag, trace, trace_norm, Mat, C64};
use crate::tol::le_rel;

fn check_shared(c: &BlockTridiagonal, z: &BlockTridiagonal) -> Result<()> {
    if c.sizes != z.sizes {
        return invalid("C and Z must share block sizes");
    }
    c.validate()?;
    z.validate()
}

/// Diagonal block `(n, n)` of `[C, Z]`, 1-based, including central terms.
pub fn commutator_diag_block(c: &BlockTridiagonal, z: &BlockTridiagonal, n: usize) -> Mat {
    let m = c.levels();
    let mut out = &c.centrals[n - 1] * &z.centrals[n - 1] - &z.centrals[n - 1] * &c.centrals[n - 1];
    if n < m {
        out += &c.uppers[n - 1] * &z.lowers[n - 1] - &z.uppers[n - 1] * &c.lowers[n - 1];
    }
    if n > 1 {
        out += &c.lowers[n - 2] * &z.uppers[n - 2] - &z.lowers[n - 2] * &c.uppers[n - 2];
    }
    out
}

/// Block `(n, n+1)` of `[C, Z]`.
pub fn commutator_upper_block(c: &BlockTridiagonal, z: &BlockTridiagonal, n: usize) -> Mat {
    &c.centrals[n - 1] * &z.uppers[n - 1] - &z.centrals[n - 1] * &c.uppers[n - 1]
        + &c.uppers[n - 1] * &z.centrals[n]
        - &z.uppers[n - 1] * &c.centrals[n]
}

/// Block `(n+1, n)` of `[C, Z]`.
pub fn commutator_lower_block(c: &BlockTridiagonal, z: &BlockTridiagonal, n: usize) -> Mat {
    &c.lowers[n - 1] * &z.centrals[n - 1] - &z.lowers[n - 1] * &c.centrals[n - 1]
        + &c.centrals[n] * &z.lowers[n - 1]
        - &z.centrals[n] * &c.lowers[n - 1]
}

fn offdiag_families(c: &BlockTridiagonal, z: &BlockTridiagonal) -> (Vec<f64>, Vec<f64>) {
    let m = c.levels();
    let upper = (1..m.saturating_sub(1))
        .map(|n| frobenius(&(&c.uppers[n - 1] * &z.uppers[n] - &z.uppers[n - 1] * &c.uppers[n])))
        .collect();
    let lower = (1..m.saturating_sub(1))
        .map(|n| frobenius(&(&c.lowers[n] * &z.lowers[n - 1] - &z.lowers[n] * &c.lowers[n - 1])))
        .collect();
    (upper, lower)
}

fn fold_max<'a>(it: impl IntoIterator<Item = &'a f64>) -> f64 {
    it.into_iter().copied().fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmResiduals {
    /// Levels `1..m−1`: target minus the diagonal block of the commutator.
    pub diagonal: Vec<f64>,
    /// Levels `1..m−2`: `‖A_nX_{n+1} − X_nA_{n+1}‖`.
    pub upper_offdiag: Vec<f64>,
    /// Levels `1..m−2`: `‖B_{n+1}Y_n − Y_{n+1}B_n‖`.
    pub lower_offdiag: Vec<f64>,
    /// Level `m`, where the truncation drops the `A_m`, `Y_m` terms. Not part of the maximum.
    pub truncated_last: f64,
    /// Maximum over all interior entries above.
    pub max_residual: f64,
}

/// Residuals of the zero-central system against diagonal targets `D_1, ..., D_m`.
pub fn residuals_am(c: &BlockTridiagonal, z: &BlockTridiagonal, d_target: &[Vec<f64>]) -> Result<AmResiduals> {
    check_shared(c, z)?;
    let m = c.levels();
    if d_target.len() != m || (1..=m).any(|n| d_target[n - 1].len() != c.sizes.k(n)) {
        return invalid("target blocks do not match the block sizes");
    }
    if !c.centrals_are_zero() || !z.centrals_are_zero() {
        return Err(Error::Precondition("central blocks must vanish in the zero-central model".into()));
    }
    let level = |n: usize| frobenius(&(real_diag(&d_target[n - 1]) - commutator_diag_block(c, z, n)));
    let diagonal: Vec<f64> = (1..m).map(level).collect();
    let truncated_last = if m > 0 { level(m) } else { 0.0 };
    let (upper_offdiag, lower_offdiag) = offdiag_families(c, z);
    let max_residual = fold_max(diagonal.iter().chain(&upper_offdiag).chain(&lower_offdiag));
    Ok(AmResiduals { diagonal, upper_offdiag, lower_offdiag, truncated_last, max_residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamResiduals {
    /// Levels `1..m`: `D_n` minus the diagonal block of the commutator.
    pub diagonal: Vec<f64>,
    /// Levels `1..m−1`: `E_n` minus block `(n, n+1)`.
    pub upper: Vec<f64>,
    /// Levels `1..m−1`: `F_n` minus block `(n+1, n)`.
    pub lower: Vec<f64>,
    pub upper_offdiag: Vec<f64>,
    pub lower_offdiag: Vec<f64>,
    /// Maximum over `diagonal[..m−1]`, `upper` and `lower`.
    pub max_band: f64,
    /// Maximum over both second off-diagonal families.
    pub max_offdiag: f64,
}

impl GamResiduals {
    pub fn max_interior(&self) -> f64 {
        self.max_band.max(self.max_offdiag)
    }
}

/// Residuals of the full block system `T = CZ − ZC` with `T` block tridiagonal.
pub fn residuals_gam(t: &BlockTridiagonal, c: &BlockTridiagonal, z: &BlockTridiagonal) -> Result<GamResiduals> {
    check_shared(c, z)?;
    if t.sizes != c.sizes {
        return invalid("T must share block sizes with C and Z");
    }
    t.validate()?;
    let m = c.levels();
    let diagonal: Vec<f64> = (1..=m)
        .map(|n| frobenius(&(&t.centrals[n - 1] - commutator_diag_block(c, z, n))))
        .collect();
    let upper: Vec<f64> = (1..m)
        .map(|n| frobenius(&(&t.uppers[n - 1] - commutator_upper_block(c, z, n))))
        .collect();
    let lower: Vec<f64> = (1..m)
        .map(|n| frobenius(&(&t.lowers[n - 1] - commutator_lower_block(c, z, n))))
        .collect();
    let (upper_offdiag, lower_offdiag) = offdiag_families(c, z);
    let interior = &diagonal[..m.saturating_sub(1)];
    let max_band = fold_max(interior.iter().chain(&upper).chain(&lower));
    let max_offdiag = fold_max(upper_offdiag.iter().chain(&lower_offdiag));
    Ok(GamResiduals { diagonal, upper, lower, upper_offdiag, lower_offdiag, max_band, max_offdiag })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceChain {
    pub n: usize,
    /// `|trace(Q_n T Q_n)|`.
    pub lhs: f64,
    /// `‖A_nY_n − X_nB_n‖_1`.
    pub t1: f64,
    /// `(‖A_n‖_1 + ‖B_n‖_1) ‖Z‖`.
    pub t2: f64,
    /// `k_n (‖A_n‖ + ‖B_n‖) ‖Z‖`.
    pub t3: f64,
    pub partial_trace: [f64; 2],
    pub block_trace: [f64; 2],
    /// `|trace(Q_nTQ_n) − trace(A_nY_n − X_nB_n)|`.
    pub telescoping_gap: f64,
    pub ordered: bool,
}

/// Evaluates the trace chain at several levels with a single `‖Z‖` computation.
pub struct TraceChainContext<'a> {
    t: &'a Mat,
    c: &'a BlockTridiagonal,
    z: &'a BlockTridiagonal,
    z_norm: f64,
    rel: f64,
}

impl<'a> TraceChainContext<'a> {
    pub fn new(t: &'a Mat, c: &'a BlockTridiagonal, z: &'a BlockTridiagonal, rel: f64) -> Result<Self> {
        check_shared(c, z)?;
        if t.nrows() != c.dim() || t.ncols() != c.dim() {
            return invalid("T dimension does not match the block sizes");
        }
        let z_norm = op_norm(&z.assemble());
        Ok(TraceChainContext { t, c, z, z_norm, rel })
    }

    pub fn z_norm(&self) -> f64 {
        self.z_norm
    }

    pub fn at(&self, n: usize) -> Result<TraceChain> {
        let (c, z) = (self.c, self.z);
        if n == 0 || n >= c.levels() {
            return invalid(format!("level {n} must satisfy 1 <= n < {}", c.levels()));
        }
        let s = c.sizes.s(n);
        let pt: C64 = (0..s).map(|i| self.t[(i, i)]).sum();
        let (a, b) = (&c.uppers[n - 1], &c.lowers[n - 1]);
        let (x, y) = (&z.uppers[n - 1], &z.lowers[n - 1]);
        let core = a * y - x * b;
        let bt = trace(&core);
        let t1 = trace_norm(&core);
        let t2 = (trace_norm(a) + trace_norm(b)) * self.z_norm;
        let t3 = c.sizes.k(n) as f64 * (op_norm(a) + op_norm(b)) * self.z_norm;
        let lhs = pt.norm();
        let ordered = le_rel(lhs, t1, self.rel) && le_rel(t1, t2, self.rel) && le_rel(t2, t3, self.rel);
        Ok(TraceChain {
            n,
            lhs,
            t1,
            t2,
            t3,
            partial_trace: [pt.re, pt.im],
            block_trace: [bt.re, bt.im],
            telescoping_gap: (pt - bt).norm(),
            ordered,
        })
    }
}

pub fn trace_chain(t: &Mat, c: &BlockTridiagonal, z: &BlockTridiagonal, n: usize, rel: f64) -> Result<TraceChain> {
    TraceChainContext::new(t, c, z, rel)?.at(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmat::BlockSizes;

    #[test]
    fn all_zero_inputs() {
        let bt = BlockTridiagonal::zeros(BlockSizes::arithmetic(4));
        let r = residuals_gam(&bt, &bt, &bt).unwrap();
        assert_eq!(r.max_interior(), 0.0);
        let targets: Vec<Vec<f64>> = (1..=4).map(|n| vec![0.0; n]).collect();
        assert_eq!(residuals_am(&bt, &bt, &targets).unwrap().max_residual, 0.0);
    }

    #[test]
    fn size_mismatch_rejected() {
        let a = BlockTridiagonal::zeros(BlockSizes::arithmetic(3));
        let b = BlockTridiagonal::zeros(BlockSizes::arithmetic(4));
        assert!(residuals_gam(&a, &a, &b).is_err());
        assert!(residuals_am(&a, &a, &[vec![0.0]]).is_err());
    }
}
