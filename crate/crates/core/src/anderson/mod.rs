//! Commutator witnesses with zero central blocks and shift-like off-diagonal
//! blocks: the classical rank-one model, the weighted variant, the strictly
//! positive construction, the exponential-size variant and a 2×2
//! self-commutator family.

mod eam;
mod t7;

use serde::{Deserialize, Serialize};

pub use eam::{eam_generate, eam_reduce, embed_am};
pub use t7::{t7_generate, DRule, EpsRule, T7Config, T7Output};

use crate::blockmat::{
    commutator_diag_block, residuals_am, residuals_gam, AmResiduals, BlockSizes, BlockTridiagonal, GamResiduals,
};
use crate::error::{invalid, Result};
use crate::linalg::{c, real_diag, singular_values, Mat};
use crate::seqcalc::{monotonize, RealSeq};

/// Per level `n`: weight vectors `a, x, b, y`, stored at index `n − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmWeights {
    pub a: Vec<Vec<f64>>,
    pub x: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
}

impl AmWeights {
    pub fn levels(&self) -> usize {
        self.a.len()
    }

    fn check(&self) -> Result<()> {
        let l = self.a.len();
        if self.x.len() != l || self.b.len() != l || self.y.len() != l {
            return invalid("weight families have different level counts");
        }
        for n in 0..l {
            let len = self.a[n].len();
            if self.x[n].len() != len || self.b[n].len() != len || self.y[n].len() != len {
                return invalid(format!("weight vectors at level {} differ in length", n + 1));
            }
        }
        Ok(())
    }

    /// Weights with `√factor_n` applied at level `n`.
    pub fn scaled(&self, factor: impl Fn(usize) -> f64) -> AmWeights {
        let f = |v: &Vec<Vec<f64>>| {
            v.iter()
                .enumerate()
                .map(|(i, row)| {
                    let s = factor(i + 1).sqrt();
                    row.iter().map(|w| w * s).collect()
                })
                .collect()
        };
        AmWeights { a: f(&self.a), x: f(&self.x), b: f(&self.b), y: f(&self.y) }
    }
}

/// Classical weights for off-diagonal levels `1..levels`.
pub fn classical_weights(levels: usize) -> AmWeights {
    let mut w = AmWeights { a: vec![], x: vec![], b: vec![], y: vec![] };
    for n in 1..=levels {
        let nf = n as f64;
        w.a.push((1..=n).map(|k| ((n + 1 - k) as f64).sqrt() / nf).collect());
        w.x.push((1..=n).map(|k| (k as f64).sqrt() / nf).collect());
        w.b.push((1..=n).map(|k| (k as f64).sqrt() / (nf + 1.0)).collect());
        w.y.push((1..=n).map(|k| ((n + 1 - k) as f64).sqrt() / (nf + 1.0)).collect());
    }
    w
}

/// Places the weights: `a` on the diagonal of `A_n`, `x` on the superdiagonal
/// of `X_n`, `−b` on the subdiagonal of `B_n`, `y` on the diagonal of `Y_n`.
pub fn blocks_from_weights(w: &AmWeights, sizes: &BlockSizes) -> Result<(BlockTridiagonal, BlockTridiagonal)> {
    w.check()?;
    if w.levels() + 1 != sizes.levels() {
        return invalid(format!(
            "{} weight levels need {} block levels, got {}",
            w.levels(),
            w.levels() + 1,
            sizes.levels()
        ));
    }
    let mut cm = BlockTridiagonal::zeros(sizes.clone());
    let mut zm = BlockTridiagonal::zeros(sizes.clone());
    for n in 1..sizes.levels() {
        let len = w.a[n - 1].len();
        if len > sizes.k(n) || len + 1 > sizes.k(n + 1) {
            return invalid(format!("weights at level {n} do not fit the block sizes"));
        }
        for k in 0..len {
            cm.uppers[n - 1][(k, k)] = c(w.a[n - 1][k]);
            zm.uppers[n - 1][(k, k + 1)] = c(w.x[n - 1][k]);
            cm.lowers[n - 1][(k + 1, k)] = c(-w.b[n - 1][k]);
            zm.lowers[n - 1][(k, k)] = c(w.y[n - 1][k]);
        }
    }
    Ok((cm, zm))
}

/// Reads weights back from zero-central blocks.
pub fn weights_from_blocks(cm: &BlockTridiagonal, zm: &BlockTridiagonal, len: impl Fn(usize) -> usize) -> AmWeights {
    let mut w = AmWeights { a: vec![], x: vec![], b: vec![], y: vec![] };
    for n in 1..cm.levels() {
        let l = len(n);
        let (a, b) = (&cm.uppers[n - 1], &cm.lowers[n - 1]);
        let (x, y) = (&zm.uppers[n - 1], &zm.lowers[n - 1]);
        w.a.push((0..l).map(|k| a[(k, k)].re).collect());
        w.x.push((0..l).map(|k| x[(k, k + 1)].re).collect());
        w.b.push((0..l).map(|k| -b[(k + 1, k)].re).collect());
        w.y.push((0..l).map(|k| y[(k, k)].re).collect());
    }
    w
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
}

/// A block form triple `(C, Z, D)` with diagonal targets `D_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorWitness {
    pub provenance: Provenance,
    pub sizes: BlockSizes,
    #[serde(rename = "C")]
    pub c: BlockTridiagonal,
    #[serde(rename = "Z")]
    pub z: BlockTridiagonal,
    #[serde(rename = "D_blocks")]
    pub d_blocks: Vec<Vec<f64>>,
}

impl CommutatorWitness {
    pub fn levels(&self) -> usize {
        self.sizes.levels()
    }

    pub fn dense_commutator(&self) -> Mat {
        let cd = self.c.assemble();
        let zd = self.z.assemble();
        &cd * &zd - &zd * &cd
    }

    /// All target entries in order.
    pub fn target_diagonal(&self) -> Vec<f64> {
        self.d_blocks.iter().flatten().copied().collect()
    }

    /// Max-abs difference between the commutator and the target on the leading
    /// `s_{m−1}` principal part, where truncation has no effect.
    pub fn leading_principal_error(&self) -> f64 {
        let t = self.dense_commutator();
        let s = self.sizes.s(self.levels().saturating_sub(1));
        let d = self.target_diagonal();
        let mut worst: f64 = 0.0;
        for j in 0..s {
            for i in 0..s {
                let target = if i == j { d[i] } else { 0.0 };
                worst = worst.max((t[(i, j)] - c(target)).norm());
            }
        }
        worst
    }

    pub fn residuals(&self) -> Result<AmResiduals> {
        residuals_am(&self.c, &self.z, &self.d_blocks)
    }

    pub fn target_blocks(&self) -> BlockTridiagonal {
        let mut t = BlockTridiagonal::zeros(self.sizes.clone());
        for (n, d) in self.d_blocks.iter().enumerate() {
            t.centrals[n] = real_diag(d);
        }
        t
    }

    pub fn gam_residuals(&self) -> Result<GamResiduals> {
        residuals_gam(&self.target_blocks(), &self.c, &self.z)
    }
}

/// Diagonal of the commutator produced by shift-pattern weights, level by level.
pub fn induced_targets(cm: &BlockTridiagonal, zm: &BlockTridiagonal) -> Vec<Vec<f64>> {
    (1..=cm.levels())
        .map(|n| {
            let d = commutator_diag_block(cm, zm, n);
            (0..d.nrows()).map(|i| d[(i, i)].re).collect()
        })
        .collect()
}

/// Rank-one projection target `D_1 = (1)`, `D_n = 0`.
pub fn classical_rank_one(m: usize) -> Result<CommutatorWitness> {
    if m < 2 {
        return invalid("need at least 2 levels");
    }
    let sizes = BlockSizes::arithmetic(m);
    let (cm, zm) = blocks_from_weights(&classical_weights(m - 1), &sizes)?;
    let mut d_blocks: Vec<Vec<f64>> = (1..=m).map(|n| vec![0.0; n]).collect();
    d_blocks[0][0] = 1.0;
    Ok(CommutatorWitness {
        provenance: Provenance {
            generator: "classical".into(),
            config: serde_json::json!({ "levels": m }),
            seed: None,
        },
        sizes,
        c: cm,
        z: zm,
        d_blocks,
    })
}

/// Classical weights scaled by `√S_n`, `S_n = d_1 + ... + d_n`, giving targets `D_n = (d_n / n) I_n`.
pub fn bpw_weighted(d: &RealSeq, m: usize) -> Result<CommutatorWitness> {
    if m < 2 {
        return invalid("need at least 2 levels");
    }
    if d.len() < m {
        return invalid(format!("need {m} terms of d, got {}", d.len()));
    }
    if d.values()[..m].iter().any(|v| *v <= 0.0) {
        return invalid("d must be strictly positive");
    }
    let sums: Vec<f64> = d.values()[..m]
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let sizes = BlockSizes::arithmetic(m);
    let w = classical_weights(m - 1).scaled(|n| sums[n - 1]);
    let (cm, zm) = blocks_from_weights(&w, &sizes)?;
    let d_blocks = (1..=m).map(|n| vec![d.term(n) / n as f64; n]).collect();
    Ok(CommutatorWitness {
        provenance: Provenance {
            generator: "bpw".into(),
            config: serde_json::json!({ "levels": m, "d_prefix": &d.values()[..m] }),
            seed: None,
        },
        sizes,
        c: cm,
        z: zm,
        d_blocks,
    })
}

/// `C = ⊕ √d_n E_12`, `Z = ⊕ √d_n E_21`, so `[C, Z] = diag(d_1, −d_1, d_2, −d_2, ...)`.
pub fn selfcommutator_witness(d: &RealSeq, m: usize) -> Result<CommutatorWitness> {
    if d.len() < m || m == 0 {
        return invalid("need at least one pair and enough terms of d");
    }
    if d.values()[..m].iter().any(|v| *v <= 0.0) {
        return invalid("d must be strictly positive");
    }
    let sizes = BlockSizes::new(vec![2; m])?;
    let mut cm = BlockTridiagonal::zeros(sizes.clone());
    let mut zm = BlockTridiagonal::zeros(sizes.clone());
    for n in 0..m {
        let r = d.values()[n].sqrt();
        cm.centrals[n][(0, 1)] = c(r);
        zm.centrals[n][(1, 0)] = c(r);
    }
    let d_blocks = d.values()[..m].iter().map(|v| vec![*v, -*v]).collect();
    Ok(CommutatorWitness {
        provenance: Provenance {
            generator: "selfcommutator".into(),
            config: serde_json::json!({ "pairs": m, "d_prefix": &d.values()[..m] }),
            seed: None,
        },
        sizes,
        c: cm,
        z: zm,
        d_blocks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    C,
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub holds: bool,
    /// First failing term as `(index, lhs, rhs)`, 1-based.
    pub first_violation: Option<(usize, f64, f64)>,
    pub violations: usize,
}

fn compare(name: &str, lhs: impl Fn(usize) -> f64, rhs: impl Fn(usize) -> f64, len: usize) -> Comparison {
    let mut first = None;
    let mut count = 0;
    for j in 1..=len {
        let (l, r) = (lhs(j), rhs(j));
        if l > r * (1.0 + 1e-12) {
            count += 1;
            first.get_or_insert((j, l, r));
        }
    }
    Comparison { name: name.into(), holds: count == 0, first_violation: first, violations: count }
}

/// Exact prefixes of `c⋆` (the nonincreasing rearrangement of all `(n−k+1)/n²`)
/// and of `a = ⊕⟨1/n⟩ⁿ`.
pub fn anderson_ideal_sequences(len: usize) -> (Vec<f64>, Vec<f64>) {
    let mut levels = 2usize;
    let c_star = loop {
        let mut v: Vec<f64> = Vec::new();
        for n in 1..=levels {
            let n2 = (n * n) as f64;
            v.extend((1..=n).map(|j| j as f64 / n2));
        }
        v.sort_by(|a, b| b.total_cmp(a));
        let omitted_max = 1.0 / (levels + 1) as f64;
        if v.len() >= len && (len == 0 || v[len - 1] > omitted_max) {
            v.truncate(len);
            break v;
        }
        levels *= 2;
    };
    let mut a = Vec::with_capacity(len);
    let mut k = 1usize;
    while a.len() < len {
        for _ in 0..k {
            if a.len() < len {
                a.push(1.0 / k as f64);
            }
        }
        k += 1;
    }
    (c_star, a)
}

/// The four constant comparisons between `c⋆`, `a` and `⟨1/√n⟩` on `len` terms.
pub fn anderson_ideal_comparisons(len: usize) -> Vec<Comparison> {
    let (cs, a) = anderson_ideal_sequences(len);
    let inv_sqrt = |j: usize| 1.0 / (j as f64).sqrt();
    vec![
        compare("c_star <= a", |j| cs[j - 1], |j| a[j - 1], len),
        compare("a <= 2 D_2(c_star)", |j| a[j - 1], |j| 2.0 * cs[j.div_ceil(2) - 1], len),
        compare("a <= sqrt(3) <1/sqrt(n)>", |j| a[j - 1], |j| 3f64.sqrt() * inv_sqrt(j), len),
        compare("<1/sqrt(n)> <= sqrt(2) a", inv_sqrt, |j| 2f64.sqrt() * a[j - 1], len),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularProfile {
    pub which: Which,
    pub levels: usize,
    /// Squared singular values of the upper band, nonincreasing, nonzero part.
    pub svd_squared: Vec<f64>,
    /// Nonincreasing rearrangement of the enumerated `c_n`, `n < levels`.
    pub enumerated: Vec<f64>,
    pub max_mismatch: f64,
    /// Leading terms that already agree with the infinite rearrangement.
    pub exact_prefix: usize,
    pub comparisons: Vec<Comparison>,
}

/// Singular values of the upper band of the classical `C` or `Z`, compared
/// with the enumerated `c_n = ⟨(n−k+1)/n²⟩_k`.
pub fn singular_profile(which: Which, m: usize, terms: usize) -> Result<SingularProfile> {
    if m < 3 {
        return invalid("need at least 3 levels");
    }
    let w = classical_rank_one(m)?;
    let bt = match which {
        Which::C => &w.c,
        Which::Z => &w.z,
    };
    let mut upper = BlockTridiagonal::zeros(bt.sizes.clone());
    upper.uppers = bt.uppers.clone();
    let rank = m * (m - 1) / 2;
    let mut svd_squared: Vec<f64> = singular_values(&upper.assemble()).iter().map(|s| s * s).collect();
    svd_squared.truncate(rank);
    let mut raw = Vec::with_capacity(rank);
    for n in 1..m {
        let n2 = (n * n) as f64;
        raw.extend((1..=n).map(|k| (n - k + 1) as f64 / n2));
    }
    let enumerated = monotonize(&RealSeq::new(raw)?).into_values();
    let max_mismatch = svd_squared
        .iter()
        .zip(&enumerated)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let exact_prefix = enumerated.iter().take_while(|v| **v > 1.0 / m as f64).count();
    Ok(SingularProfile {
        which,
        levels: m,
        svd_squared,
        enumerated,
        max_mismatch,
        exact_prefix,
        comparisons: anderson_ideal_comparisons(terms),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_first_target() {
        let w = classical_rank_one(5).unwrap();
        let t = w.dense_commutator();
        assert!((t[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(w.leading_principal_error() < 1e-14);
        assert!(w.residuals().unwrap().max_residual < 1e-14);
    }

    #[test]
    fn weights_round_trip() {
        let w = classical_rank_one(6).unwrap();
        let back = weights_from_blocks(&w.c, &w.z, |n| n);
        assert_eq!(back, classical_weights(5));
    }

    #[test]
    fn ideal_sequence_prefix() {
        let (cs, a) = anderson_ideal_sequences(6);
        let expect = [1.0, 0.5, 1.0 / 3.0, 0.25, 0.25, 2.0 / 9.0];
        for (x, y) in cs.iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(a, vec![1.0, 0.5, 0.5, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn selfcommutator_two_pairs() {
        let d = RealSeq::new(vec![1.0, 0.5]).unwrap();
        let w = selfcommutator_witness(&d, 2).unwrap();
        let err = crate::linalg::max_abs(&(w.dense_commutator() - real_diag(&[1.0, -1.0, 0.5, -0.5])));
        assert!(err < 1e-15);
    }
}
