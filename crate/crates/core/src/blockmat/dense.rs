use serde::{Deserialize, Serialize};

use super::io::serde_mat;
use super::sizes::BlockSizes;
use crate::error::{invalid, Result};
use crate::linalg::{frobenius, Mat, ZERO};

/// A square finite truncation of an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseOp {
    #[serde(with = "serde_mat")]
    pub entries: Mat,
    pub basis_note: String,
}

impl DenseOp {
    pub fn new(entries: Mat, basis_note: impl Into<String>) -> Result<DenseOp> {
        if entries.nrows() != entries.ncols() {
            return invalid(format!(
                "operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            ));
        }
        Ok(DenseOp { entries, basis_note: basis_note.into() })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> DenseOp {
        DenseOp { entries: self.entries.adjoint(), basis_note: self.basis_note.clone() }
    }
}

/// `AB − BA`.
pub fn commutator(a: &DenseOp, b: &DenseOp) -> Result<DenseOp> {
    if a.dim() != b.dim() {
        return invalid(format!("dimension mismatch: {} vs {}", a.dim(), b.dim()));
    }
    let e = &a.entries * &b.entries - &b.entries * &a.entries;
    Ok(DenseOp { entries: e, basis_note: a.basis_note.clone() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandSplit {
    pub minus: DenseOp,
    pub zero: DenseOp,
    pub plus: DenseOp,
    pub has_outside: bool,
    pub outside_frobenius: f64,
}

/// Splits `T` into its lower, central and upper block bands.
pub fn split_bands(t: &DenseOp, sizes: &BlockSizes) -> Result<BandSplit> {
    if sizes.level_with_dim(t.dim()).is_none() {
        return invalid(format!("dimension {} is not a partial sum of the block sizes", t.dim()));
    }
    let n = t.dim();
    let blk: Vec<usize> = (1..=n).map(|i| sizes.block_of(i).unwrap()).collect();
    let mut minus = Mat::zeros(n, n);
    let mut zero = Mat::zeros(n, n);
    let mut plus = Mat::zeros(n, n);
    let mut outside = Mat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let v = t.entries[(i, j)];
            let target = match blk[j] as isize - blk[i] as isize {
                0 => &mut zero,
                1 => &mut plus,
                -1 => &mut minus,
                _ => &mut outside,
            };
            target[(i, j)] = v;
        }
    }
    let outside_frobenius = frobenius(&outside);
    let note = &t.basis_note;
    Ok(BandSplit {
        minus: DenseOp { entries: minus, basis_note: note.clone() },
        zero: DenseOp { entries: zero, basis_note: note.clone() },
        plus: DenseOp { entries: plus, basis_note: note.clone() },
        has_outside: outside.iter().any(|z| *z != ZERO),
        outside_frobenius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub ok: bool,
    /// Largest out-of-band entry as 1-based `(i, j, |T_ij|)`.
    pub worst: Option<(usize, usize, f64)>,
}

/// Checks that every entry in blocks `(p, q)` with `|p − q| > bandwidth` has modulus at most `tol`.
///
/// `sizes` may describe a larger space than `T`; the trailing block is then read as truncated.
pub fn band_profile_check(t: &Mat, sizes: &BlockSizes, bandwidth: usize, tol: f64) -> Result<BandCheck> {
    let n = t.nrows();
    if t.ncols() != n || sizes.dim() < n {
        return invalid("block sizes do not cover the matrix");
    }
    let blk: Vec<usize> = (1..=n).map(|i| sizes.block_of(i).unwrap()).collect();
    let mut worst: Option<(usize, usize, f64)> = None;
    for j in 0..n {
        for i in 0..n {
            if blk[i].abs_diff(blk[j]) > bandwidth {
                let v = t[(i, j)].norm();
                if worst.map_or(v > 0.0, |w| v > w.2) {
                    worst = Some((i + 1, j + 1, v));
                }
            }
        }
    }
    Ok(BandCheck { ok: worst.is_none_or(|w| w.2 <= tol), worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, trace, ONE};

    #[test]
    fn nilpotent_pair_commutator() {
        let mut e12 = Mat::zeros(2, 2);
        e12[(0, 1)] = ONE;
        let e21 = e12.transpose();
        let a = DenseOp::new(e12, "").unwrap();
        let b = DenseOp::new(e21, "").unwrap();
        let t = commutator(&a, &b).unwrap();
        assert_eq!(t.entries, crate::linalg::real_diag(&[1.0, -1.0]));
        assert_eq!(commutator(&a, &a).unwrap().entries, Mat::zeros(2, 2));
        assert_eq!(trace(&t.entries), c(0.0));
    }

    #[test]
    fn split_identity() {
        let sizes = BlockSizes::new(vec![1, 2, 3]).unwrap();
        let id = DenseOp::new(Mat::identity(6, 6), "").unwrap();
        let s = split_bands(&id, &sizes).unwrap();
        assert_eq!(s.zero.entries, Mat::identity(6, 6));
        assert!(!s.has_outside);
        assert_eq!(s.plus.entries, Mat::zeros(6, 6));
        assert!(split_bands(&id, &BlockSizes::new(vec![4, 4]).unwrap()).is_err());
    }

    #[test]
    fn band_check_diagonal() {
        let d = crate::linalg::real_diag(&[1.0, 2.0, 3.0]);
        let sizes = BlockSizes::new(vec![1, 1, 1]).unwrap();
        assert!(band_profile_check(&d, &sizes, 0, 0.0).unwrap().ok);
        let mut e = d.clone();
        e[(0, 2)] = c(0.5);
        let r = band_profile_check(&e, &sizes, 1, 0.1).unwrap();
        assert!(!r.ok);
        assert_eq!(r.worst, Some((1, 3, 0.5)));
    }
}
