//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn op_norm(m: &Mat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn trace_norm(m: &Mat) -> f64 {
    singular_values(m).iter().sum()
}

pub fn schatten_norm(m: &Mat, p: f64) -> f64 {
    singular_values(m).iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn frobenius(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn real_diag(v: &[f64]) -> Mat {
    Mat::from_diagonal(&Vector::from_iterator(v.len(), v.iter().map(|x| c(*x))))
}

pub fn trace(m: &Mat) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Entries with independent standard normal real and imaginary parts.
pub fn random_complex<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_real<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| c(rng.sample(StandardNormal)))
}

/// Orthonormal columns spanning the complement of the orthonormal columns of `q`.
///
/// Each step takes the standard basis vector with the largest residual against
/// the running span.
pub fn complete_columns(q: &Mat) -> Mat {
    let n = q.nrows();
    let mut cols: Vec<Vector> = q.column_iter().map(|c| c.into_owned()).collect();
    let start = cols.len();
    let mut residuals: Vec<Vector> = (0..n)
        .map(|i| {
            let mut v = Vector::zeros(n);
            v[i] = ONE;
            project_out(&mut v, &cols);
            v
        })
        .collect();
    while cols.len() < n {
        let (best, _) = residuals
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let mut v = residuals[best].clone();
        project_out(&mut v, &cols);
        let norm = v.norm();
        let u = v / c(norm);
        for r in residuals.iter_mut() {
            let h = u.dotc(r);
            r.axpy(-h, &u, ONE);
        }
        cols.push(u);
    }
    let extra = &cols[start..];
    Mat::from_fn(n, extra.len(), |i, j| extra[j][i])
}

fn project_out(v: &mut Vector, cols: &[Vector]) {
    for _ in 0..2 {
        for u in cols {
            let h = u.dotc(v);
            v.axpy(-h, u, ONE);
        }
    }
}

/// Full unitary whose leading columns are the orthonormal columns of `q`.
pub fn extend_to_unitary(q: &Mat) -> Mat {
    let rest = complete_columns(q);
    let mut u = Mat::zeros(q.nrows(), q.nrows());
    u.columns_mut(0, q.ncols()).copy_from(q);
    u.columns_mut(q.ncols(), rest.ncols()).copy_from(&rest);
    u
}

/// `‖Q*Q − I‖` measured entrywise (max modulus).
pub fn orthonormality_defect(q: &Mat) -> f64 {
    let g = q.adjoint() * q;
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn completion_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_complex(6, 2, &mut rng);
        let q = a.qr().q();
        let u = extend_to_unitary(&q);
        assert!(orthonormality_defect(&u) < 1e-12);
        assert!((u.columns(0, 2) - &q).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn norms_of_diagonal() {
        let d = real_diag(&[3.0, -4.0, 0.0]);
        assert!((op_norm(&d) - 4.0).abs() < 1e-12);
        assert!((trace_norm(&d) - 7.0).abs() < 1e-12);
        assert!((schatten_norm(&d, 2.0) - 5.0).abs() < 1e-12);
        assert!((frobenius(&d) - 5.0).abs() < 1e-12);
        assert!(singular_values(&Mat::zeros(0, 3)).is_empty());
    }
}
