use serde::{Deserialize, Serialize};

use super::basis::{derive_basis, transform, DerivedBasis};
use super::profile::SupportProfile;
use crate::blockmat::{band_profile_check, BandCheck, BlockSizes};
use crate::error::{invalid, Result};
use crate::linalg::{c, op_norm, real_diag, Mat, C64};

/// Sizes with `s_1 = k1` and `s_{n+1} = max(r1(s_n), r2(s_n))`: the smallest
/// partition whose block tridiagonal band covers the staircase.
pub fn block_partition(
    r1: impl Fn(usize) -> usize,
    r2: impl Fn(usize) -> usize,
    k1: usize,
    levels: usize,
) -> Result<BlockSizes> {
    if k1 == 0 || levels == 0 {
        return invalid("k1 and levels must be positive");
    }
    let mut partials = vec![k1];
    while partials.len() < levels {
        let s = *partials.last().unwrap();
        let next = r1(s).max(r2(s));
        if next <= s {
            return invalid(format!("support lengths do not grow past {s}"));
        }
        partials.push(next);
    }
    let mut sizes = vec![k1];
    sizes.extend(partials.windows(2).map(|w| w[1] - w[0]));
    BlockSizes::new(sizes)
}

/// First support position, scanning rows then columns, whose blocks are more
/// than one apart. `None` means the band covers the staircase on `{1..s_m}²`.
pub fn covering_violation(
    r1: impl Fn(usize) -> usize,
    r2: impl Fn(usize) -> usize,
    sizes: &BlockSizes,
) -> Option<(usize, usize)> {
    let dim = sizes.dim();
    let blk = |i: usize| sizes.block_of(i).unwrap();
    for i in 1..=dim {
        let j = r2(i).min(dim);
        if blk(j) > blk(i) + 1 {
            return Some((i, j));
        }
    }
    for j in 1..=dim {
        let i = r1(j).min(dim);
        if blk(i) > blk(j) + 1 {
            return Some((i, j));
        }
    }
    None
}

/// `(T + T*)/2` and `(T − T*)/(2i)` for each operator.
pub fn selfadjoint_parts(ops: &[Mat]) -> Vec<Mat> {
    let half = c(0.5);
    let half_i = C64::new(0.0, 0.5);
    ops.iter()
        .flat_map(|t| {
            let ta = t.adjoint();
            [(t + &ta) * half, (t - &ta) * (-half_i)]
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SimultaneousForm {
    pub basis: DerivedBasis,
    pub profile: SupportProfile,
    pub transformed: Vec<Mat>,
    pub sizes: BlockSizes,
    pub band_checks: Vec<BandCheck>,
}

/// Splits every operator into selfadjoint parts and derives one basis for all
/// of them with lengths `(2N+1)n`. Block sizes are `1, 2N, 2N(2N+1), ...`,
/// truncated to the derived dimension.
pub fn simultaneous_tridiagonalize(ops: &[Mat], k_target: usize, tol: f64, band_tol: f64) -> Result<SimultaneousForm> {
    if ops.is_empty() || ops.len() > 3 {
        return invalid("need between 1 and 3 operators");
    }
    // unit-norm parts so the dependence gate sees every operator at its own scale
    let parts: Vec<Mat> = selfadjoint_parts(ops)
        .into_iter()
        .map(|p| {
            let s = op_norm(&p);
            if s > 0.0 { p / c(s) } else { p }
        })
        .collect();
    let slots = parts.len();
    let profile = SupportProfile::Classic { slots };
    let basis = derive_basis(&parts, None, &profile, k_target, tol)?;
    let k = basis.len();
    let len = |n: usize| (slots + 1) * n;
    let mut levels = 1;
    while block_partition(len, len, 1, levels)?.dim() < k {
        levels += 1;
    }
    let sizes = block_partition(len, len, 1, levels)?.truncated_to(k)?;
    let transformed: Vec<Mat> = ops.iter().map(|t| transform(t, &basis)).collect::<Result<_>>()?;
    let band_checks = transformed
        .iter()
        .map(|m| band_profile_check(m, &sizes, 1, band_tol))
        .collect::<Result<_>>()?;
    Ok(SimultaneousForm { basis, profile, transformed, sizes, band_checks })
}

/// `(C, Z, D)` with `D = diag(d)`, `trace D = 0`, and `CZ − ZC = D`.
///
/// With the unitary DFT `U`, `M = UDU*` has zero diagonal; `Λ = diag(1..N)`,
/// `W_ij = M_ij / (λ_i − λ_j)`, then `C = U*ΛU` and `Z = U*WU`.
pub fn fourier_commutator_pair(d: &[f64]) -> Result<(Mat, Mat, Mat)> {
    let n = d.len();
    if n < 2 {
        return invalid("need at least 2 diagonal entries");
    }
    let tr: f64 = d.iter().sum();
    let scale = d.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if tr.abs() > 1e-12 * scale * n as f64 {
        return invalid(format!("diagonal must have trace zero, got {tr}"));
    }
    let nf = n as f64;
    let u = Mat::from_fn(n, n, |i, j| {
        let theta = -2.0 * std::f64::consts::PI * ((i * j) % n) as f64 / nf;
        C64::from_polar(1.0 / nf.sqrt(), theta)
    });
    let dm = real_diag(d);
    let m = &u * &dm * u.adjoint();
    let lambda: Vec<f64> = (1..=n).map(|j| j as f64).collect();
    let w = Mat::from_fn(n, n, |i, j| if i == j { c(0.0) } else { m[(i, j)] / c(lambda[i] - lambda[j]) });
    let cm = u.adjoint() * real_diag(&lambda) * &u;
    let zm = u.adjoint() * w * &u;
    Ok((cm, zm, dm))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorForm {
    pub sizes: BlockSizes,
    pub c_band: BandCheck,
    pub z_band: BandCheck,
    /// `D` in the derived basis at block bandwidth 2.
    pub d_band: BandCheck,
}

/// Derives the basis from `[C, Z]` and checks `C`, `Z` block tridiagonal and
/// `D` block 5-diagonal in it.
pub fn commutator_form(cm: &Mat, zm: &Mat, dm: &Mat, k_target: usize, tol: f64, band_tol: f64) -> Result<(SimultaneousForm, CommutatorForm)> {
    let form = simultaneous_tridiagonalize(&[cm.clone(), zm.clone()], k_target, tol, band_tol)?;
    let dt = transform(dm, &form.basis)?;
    let d_band = band_profile_check(&dt, &form.sizes, 2, band_tol)?;
    let report = CommutatorForm {
        sizes: form.sizes.clone(),
        c_band: form.band_checks[0].clone(),
        z_band: form.band_checks[1].clone(),
        d_band,
    };
    Ok((form, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn canonical_sizes() {
        let s = block_partition(|n| 3 * n, |n| 3 * n, 1, 5).unwrap();
        assert_eq!(s.sizes(), &[1, 2, 6, 18, 54]);
        let s = block_partition(|n| 7 * n, |n| 7 * n, 1, 4).unwrap();
        assert_eq!(s.sizes(), &[1, 6, 42, 294]);
        assert_eq!(covering_violation(|n| 3 * n, |n| 3 * n, &s), None);
    }

    #[test]
    fn undersized_blocks_fail_covering() {
        let s = BlockSizes::new(vec![1; 9]).unwrap();
        assert_eq!(covering_violation(|n| 3 * n, |n| 3 * n, &s), Some((1, 3)));
    }

    #[test]
    fn fourier_pair_commutes_to_diagonal() {
        let d = [1.0, -0.5, 0.25, -0.75];
        let (cm, zm, dm) = fourier_commutator_pair(&d).unwrap();
        assert!(max_abs(&(&cm * &zm - &zm * &cm - dm)) < 1e-12);
    }
}
