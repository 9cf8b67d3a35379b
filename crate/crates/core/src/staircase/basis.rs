use serde::{Deserialize, Serialize};

use super::profile::SupportProfile;
use crate::error::{invalid, Error, Result};
use crate::linalg::{c, op_norm, Mat, Vector, ONE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GEntry {
    /// 1-based position `i` in the basis.
    pub index: usize,
    /// Profile slot `k` with `r_k(n) = i`.
    pub slot: usize,
    /// `n = r_k^{-1}(i)`.
    pub source: usize,
    /// `e_j` or `T_k f_n`.
    pub candidate: String,
    /// Norm of the candidate after orthogonalization, before normalizing.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedBasis {
    /// Orthonormal columns `f_1, ..., f_K`.
    pub f: Mat,
    pub g_log: Vec<GEntry>,
    pub requested: usize,
    /// The span filled the space before `requested` vectors were found.
    pub truncated: bool,
}

impl DerivedBasis {
    pub fn len(&self) -> usize {
        self.f.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.f.ncols() == 0
    }
}

struct Span {
    q: Mat,
    len: usize,
}

impl Span {
    fn new(n: usize, cap: usize) -> Span {
        Span { q: Mat::zeros(n, cap), len: 0 }
    }

    /// Modified Gram–Schmidt with one reorthogonalization pass.
    fn orthogonalize(&self, v: &mut Vector) {
        for _ in 0..2 {
            for j in 0..self.len {
                let col = self.q.column(j);
                let h = col.dotc(v);
                v.axpy(-h, &col, ONE);
            }
        }
    }

    fn push(&mut self, v: Vector, norm: f64) {
        let inv = c(1.0 / norm);
        let mut col = self.q.column_mut(self.len);
        if norm == 1.0 {
            col.copy_from(&v);
        } else {
            col.copy_from(&(v * inv));
        }
        self.len += 1;
    }
}

fn spanning_vector(e: Option<&Mat>, n: usize, j: usize) -> Vector {
    match e {
        Some(m) => m.column(j - 1).into_owned(),
        None => {
            let mut v = Vector::zeros(n);
            v[j - 1] = ONE;
            v
        }
    }
}

/// Builds `g_1, g_2, ...` from the profile and orthonormalizes them.
///
/// Index `i = r_0(n)` takes the first of `e_n, e_{n+1}, ...` outside the
/// current span; index `i = r_k(n)` with `k ≥ 1` takes the first of
/// `T_k f_n, e_2, e_3, ...` outside it. A candidate counts as dependent when
/// its orthogonalized norm is at most `tol` times its scale: the largest
/// operator norm for `T_k f_n`, the largest column norm of `e` for spanning vectors.
pub fn derive_basis(
    ops: &[Mat],
    e: Option<&Mat>,
    profile: &SupportProfile,
    k_target: usize,
    tol: f64,
) -> Result<DerivedBasis> {
    let n = match (ops.first(), e) {
        (Some(t), _) => t.nrows(),
        (None, Some(m)) => m.nrows(),
        (None, None) => return invalid("need at least one operator or a spanning set"),
    };
    if ops.iter().any(|t| t.shape() != (n, n)) {
        return invalid("operators must be square of equal dimension");
    }
    if ops.len() != profile.slots() {
        return invalid(format!("profile has {} slots for {} operators", profile.slots(), ops.len()));
    }
    let e_count = match e {
        Some(m) => {
            if m.nrows() != n {
                return invalid("spanning set has the wrong dimension");
            }
            m.ncols()
        }
        None => n,
    };
    if k_target > n {
        return invalid(format!("K = {k_target} exceeds the dimension {n}"));
    }
    let owners = profile.owner_table(k_target)?;
    let op_scale = ops.iter().map(op_norm).fold(0.0, f64::max);
    let e_scale = match e {
        Some(m) => m.column_iter().map(|c| c.norm()).fold(0.0, f64::max),
        None => 1.0,
    };

    let mut span = Span::new(n, k_target);
    let mut g_log = Vec::with_capacity(k_target);
    // every e_j with j < known lies in the span
    let mut known = 1usize;
    let mut truncated = false;

    for (i, &(slot, src)) in owners.iter().enumerate() {
        let index = i + 1;
        let mut chosen: Option<(Vector, f64, String)> = None;
        if slot >= 1 {
            let mut v = &ops[slot - 1] * span.q.column(src - 1);
            span.orthogonalize(&mut v);
            let r = v.norm();
            if r > tol * op_scale {
                chosen = Some((v, r, format!("T{slot} f_{src}")));
            }
        }
        if chosen.is_none() {
            let first = if slot == 0 { src } else { 2 };
            let mut j = first.max(known);
            while j <= e_count {
                let mut v = spanning_vector(e, n, j);
                span.orthogonalize(&mut v);
                let r = v.norm();
                if r > tol * e_scale {
                    chosen = Some((v, r, format!("e_{j}")));
                    break;
                }
                if j == known {
                    known += 1;
                }
                j += 1;
            }
        }
        match chosen {
            Some((v, r, candidate)) => {
                span.push(v, r);
                g_log.push(GEntry { index, slot, source: src, candidate, residual: r });
            }
            None if span.len == n || e.is_some() => {
                truncated = true;
                break;
            }
            None => {
                return Err(Error::Degenerate(format!(
                    "no independent candidate at index {index} with a span of dimension {} < {n}",
                    span.len
                )))
            }
        }
    }
    let f = span.q.columns(0, span.len).into_owned();
    Ok(DerivedBasis { f, g_log, requested: k_target, truncated })
}

/// `e_1, Ce_1, C*e_1, e_2, ...` ordering: operators `[C, C*]` with lengths `3n`.
pub fn classic_word_basis(c_op: &Mat, k_target: usize, tol: f64) -> Result<DerivedBasis> {
    derive_basis(&[c_op.clone(), c_op.adjoint()], None, &SupportProfile::classic_one_op(), k_target, tol)
}

/// `F*TF`.
pub fn transform(t: &Mat, basis: &DerivedBasis) -> Result<Mat> {
    if t.nrows() != basis.f.nrows() || t.ncols() != basis.f.nrows() {
        return invalid("operator and basis dimensions differ");
    }
    Ok(basis.f.adjoint() * t * &basis.f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseCheck {
    pub ok: bool,
    /// Largest out-of-support entry as 1-based `(i, j, |M_ij|)`.
    pub worst: Option<(usize, usize, f64)>,
}

/// Entries with `i > r1(j)` or `j > r2(i)` must have modulus at most `tol`.
pub fn verify_staircase(m: &Mat, r1: impl Fn(usize) -> usize, r2: impl Fn(usize) -> usize, tol: f64) -> StaircaseCheck {
    let mut worst: Option<(usize, usize, f64)> = None;
    let r1v: Vec<usize> = (1..=m.ncols()).map(&r1).collect();
    let r2v: Vec<usize> = (1..=m.nrows()).map(&r2).collect();
    for j in 1..=m.ncols() {
        for i in 1..=m.nrows() {
            if i > r1v[j - 1] || j > r2v[i - 1] {
                let v = m[(i - 1, j - 1)].norm();
                if worst.map_or(v > 0.0, |w| v > w.2) {
                    worst = Some((i, j, v));
                }
            }
        }
    }
    StaircaseCheck { ok: worst.is_none_or(|w| w.2 <= tol), worst }
}

/// `‖e_n − P e_n‖` with `P` the projection onto `f_1, ..., f_{r_0(n)}`, for
/// every `n` with `r_0(n) ≤ K`.
pub fn e_inclusion_residuals(basis: &DerivedBasis, profile: &SupportProfile, e: Option<&Mat>) -> Vec<f64> {
    let (dim, k) = (basis.f.nrows(), basis.len());
    let mut out = Vec::new();
    let mut n = 1;
    while let Some(r) = profile.r(0, n) {
        if r > k {
            break;
        }
        let v = spanning_vector(e, dim, n);
        let fr = basis.f.columns(0, r);
        let p = fr * (fr.adjoint() * &v);
        out.push((v - p).norm());
        n += 1;
    }
    out
}

/// `‖T_k f_n − P T_k f_n‖ / ‖T_k‖` with `P` onto `f_1, ..., f_{r_k(n)}`, for
/// every slot and every `n` with `r_k(n) ≤ K`. Returns the maximum.
pub fn collapsing_residual(ops: &[Mat], basis: &DerivedBasis, profile: &SupportProfile) -> f64 {
    let k = basis.len();
    let mut worst: f64 = 0.0;
    for (slot, t) in ops.iter().enumerate() {
        let scale = op_norm(t).max(f64::MIN_POSITIVE);
        let tf = t * &basis.f;
        let coef = basis.f.adjoint() * &tf;
        for n in 1..=k {
            let Some(r) = profile.r(slot + 1, n) else { break };
            if r > k {
                break;
            }
            let p = basis.f.columns(0, r) * coef.view((0, n - 1), (r, 1));
            let resid = (tf.column(n - 1) - p).norm() / scale;
            worst = worst.max(resid);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{orthonormality_defect, random_complex};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn upper_triangular_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = random_complex(30, 30, &mut rng);
        for j in 0..30 {
            for i in j + 1..30 {
                t[(i, j)] = crate::linalg::ZERO;
            }
        }
        let b = derive_basis(&[t], None, &SupportProfile::Classic { slots: 1 }, 30, 1e-8).unwrap();
        assert_eq!(b.f, Mat::identity(30, 30));
    }

    #[test]
    fn random_matrix_staircase() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = random_complex(60, 60, &mut rng);
        let b = classic_word_basis(&t, 60, 1e-8).unwrap();
        assert!(orthonormality_defect(&b.f) < 1e-10);
        let m = transform(&t, &b).unwrap();
        assert!(verify_staircase(&m, |n| 3 * n, |n| 3 * n, 1e-9).ok);
        assert!(e_inclusion_residuals(&b, &SupportProfile::classic_one_op(), None).iter().all(|r| *r < 1e-8));
    }

    #[test]
    fn planted_violation_found() {
        let mut m = Mat::identity(12, 12);
        m[(9, 2)] = c(0.5);
        let r = verify_staircase(&m, |n| 3 * n, |n| 3 * n, 1e-9);
        assert!(!r.ok);
        assert_eq!(r.worst, Some((10, 3, 0.5)));
    }
}
