use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::blockmat::{BlockSizes, BlockTridiagonal};
use crate::error::{invalid, Error, Result};
use crate::linalg::{extend_to_unitary, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Upper,
    Lower,
}

fn thin_svd(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    let svd = m.clone().svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    (u, svd.singular_values.iter().copied().collect(), vt)
}

/// Block diagonal unitary conjugation making every `A_n = (A'_n | 0)` (upper)
/// or every `B_n = (B'_n ; 0)` (lower) with `A'_n`, `B'_n` positive semidefinite.
///
/// Upper: with `U_n* A_n = W Σ V*`, take `U_{n+1} = (V W* | completion)`.
/// Lower: with `B_n U_n = W Σ V*`, take `U_{n+1} = (W V* | completion)`.
pub fn positive_square_sparsify(bt: &BlockTridiagonal, side: Side) -> Result<BlockTridiagonal> {
    bt.validate()?;
    if !bt.sizes.is_nondecreasing() {
        return Err(Error::Precondition("block sizes must be nondecreasing".into()));
    }
    let m = bt.levels();
    let mut units: Vec<Mat> = vec![Mat::identity(bt.sizes.k(1), bt.sizes.k(1))];
    for n in 1..m {
        let un = &units[n - 1];
        let next = match side {
            Side::Upper => {
                let (w, _, vt) = thin_svd(&(un.adjoint() * &bt.uppers[n - 1]));
                extend_to_unitary(&(vt.adjoint() * w.adjoint()))
            }
            Side::Lower => {
                let (w, _, vt) = thin_svd(&(&bt.lowers[n - 1] * un));
                extend_to_unitary(&(w * vt))
            }
        };
        units.push(next);
    }
    let mut out = BlockTridiagonal::zeros(bt.sizes.clone());
    for n in 1..=m {
        let un = &units[n - 1];
        out.centrals[n - 1] = un.adjoint() * &bt.centrals[n - 1] * un;
        if n < m {
            let un1 = &units[n];
            out.uppers[n - 1] = un.adjoint() * &bt.uppers[n - 1] * un1;
            out.lowers[n - 1] = un1.adjoint() * &bt.lowers[n - 1] * un;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareShape {
    pub ok: bool,
    /// Largest modulus outside the leading square factor.
    pub outside: f64,
    /// Largest `‖P − P*‖` entry over the square factors.
    pub hermitian_defect: f64,
    /// Smallest eigenvalue over the Hermitian parts of the square factors.
    pub min_eigenvalue: f64,
}

/// Checks the `(positive square | 0)` shape of the chosen side.
pub fn square_shape_check(bt: &BlockTridiagonal, side: Side, tol: f64) -> SquareShape {
    let mut outside: f64 = 0.0;
    let mut hermitian_defect: f64 = 0.0;
    let mut min_eigenvalue = f64::INFINITY;
    for n in 1..bt.levels() {
        let k = bt.sizes.k(n);
        let square = match side {
            Side::Upper => {
                let a = &bt.uppers[n - 1];
                for j in k..a.ncols() {
                    for i in 0..a.nrows() {
                        outside = outside.max(a[(i, j)].norm());
                    }
                }
                a.view((0, 0), (k, k)).into_owned()
            }
            Side::Lower => {
                let b = &bt.lowers[n - 1];
                for j in 0..b.ncols() {
                    for i in k..b.nrows() {
                        outside = outside.max(b[(i, j)].norm());
                    }
                }
                b.view((0, 0), (k, k)).into_owned()
            }
        };
        let defect = (&square - square.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        hermitian_defect = hermitian_defect.max(defect);
        let herm = (&square + square.adjoint()) * crate::linalg::c(0.5);
        let eig = SymmetricEigen::new(herm);
        min_eigenvalue = min_eigenvalue.min(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min));
    }
    if bt.levels() < 2 {
        min_eigenvalue = 0.0;
    }
    SquareShape {
        ok: outside <= tol && hermitian_defect <= tol && min_eigenvalue >= -tol,
        outside,
        hermitian_defect,
        min_eigenvalue,
    }
}

/// `1, 2, 6, 18, ...` truncated to `dim`.
pub fn t3aa_sizes(dim: usize) -> Result<BlockSizes> {
    let mut levels = 1;
    while BlockSizes::geometric_cover(3, levels)?.dim() < dim {
        levels += 1;
    }
    BlockSizes::geometric_cover(3, levels)?.truncated_to(dim)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeViolation {
    /// `"A"` or `"B"`.
    pub block: String,
    pub level: usize,
    /// 1-based local position.
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T3aaShape {
    pub ok: bool,
    pub violation_count: usize,
    /// Up to 20 of the largest violations.
    pub violations: Vec<ShapeViolation>,
}

/// `B_n = (B'_n | 0 | 0)^T` with `B'_n` upper triangular means local `B_n(i, j) = 0`
/// for `i > j`; `A_n = (A'_n | A''_n | 0)` with `A''_n` lower triangular means
/// local `A_n(i, j) = 0` for `j > k_n + i`.
pub fn t3aa_shape_check(bt: &BlockTridiagonal, tol: f64) -> T3aaShape {
    let mut all = Vec::new();
    for n in 1..bt.levels() {
        let k = bt.sizes.k(n);
        let a = &bt.uppers[n - 1];
        for i in 1..=a.nrows() {
            for j in (k + i + 1)..=a.ncols() {
                let v = a[(i - 1, j - 1)].norm();
                if v > tol {
                    all.push(ShapeViolation { block: "A".into(), level: n, i, j, value: v });
                }
            }
        }
        let b = &bt.lowers[n - 1];
        for j in 1..=b.ncols() {
            for i in (j + 1)..=b.nrows() {
                let v = b[(i - 1, j - 1)].norm();
                if v > tol {
                    all.push(ShapeViolation { block: "B".into(), level: n, i, j, value: v });
                }
            }
        }
    }
    let count = all.len();
    all.sort_by(|x, y| y.value.total_cmp(&x.value));
    all.truncate(20);
    T3aaShape { ok: count == 0, violation_count: count, violations: all }
}

/// Rejects block sizes that are not a prefix of `1, 2, 6, 18, ...` (last block may be truncated).
pub fn check_t3aa_sizes(sizes: &BlockSizes) -> Result<()> {
    let canon = t3aa_sizes(sizes.dim())?;
    if canon != *sizes {
        return invalid("sizes are not the canonical 1, 2, 6, 18, ... partition");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_complex, singular_values};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_bt(sizes: &[usize], seed: u64) -> BlockTridiagonal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bt = BlockTridiagonal::zeros(BlockSizes::new(sizes.to_vec()).unwrap());
        for m in bt.centrals.iter_mut().chain(bt.uppers.iter_mut()).chain(bt.lowers.iter_mut()) {
            *m = random_complex(m.nrows(), m.ncols(), &mut rng);
        }
        bt
    }

    #[test]
    fn sparsify_both_sides() {
        let bt = random_bt(&[1, 2, 6], 9);
        let before = singular_values(&bt.assemble());
        for side in [Side::Upper, Side::Lower] {
            let out = positive_square_sparsify(&bt, side).unwrap();
            assert!(square_shape_check(&out, side, 1e-10).ok);
            let after = singular_values(&out.assemble());
            assert!(before.iter().zip(&after).all(|(a, b)| (a - b).abs() < 1e-9));
        }
    }

    #[test]
    fn decreasing_sizes_rejected() {
        let bt = random_bt(&[3, 2], 1);
        assert!(matches!(positive_square_sparsify(&bt, Side::Upper), Err(Error::Precondition(_))));
    }

    #[test]
    fn canonical_t3aa_sizes() {
        assert_eq!(t3aa_sizes(200).unwrap().sizes(), &[1, 2, 6, 18, 54, 119]);
    }
}
