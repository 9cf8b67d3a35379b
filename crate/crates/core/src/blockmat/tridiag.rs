use serde::{Deserialize, Serialize};

use super::dense::DenseOp;
use super::io::serde_mats;
use super::sizes::BlockSizes;
use crate::error::{invalid, Result};
use crate::linalg::{frobenius, op_norm, schatten_norm, trace_norm, Mat};
use crate::seqcalc::RealSeq;

/// Block tridiagonal matrix: `centrals[n-1] = C_n` (`k_n × k_n`),
/// `uppers[n-1] = A_n` (`k_n × k_{n+1}`), `lowers[n-1] = B_n` (`k_{n+1} × k_n`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockTridiagonal {
    pub sizes: BlockSizes,
    #[serde(with = "serde_mats")]
    pub centrals: Vec<Mat>,
    #[serde(with = "serde_mats")]
    pub uppers: Vec<Mat>,
    #[serde(with = "serde_mats")]
    pub lowers: Vec<Mat>,
}

impl BlockTridiagonal {
    pub fn new(sizes: BlockSizes, centrals: Vec<Mat>, uppers: Vec<Mat>, lowers: Vec<Mat>) -> Result<Self> {
        let bt = BlockTridiagonal { sizes, centrals, uppers, lowers };
        bt.validate()?;
        Ok(bt)
    }

    pub fn zeros(sizes: BlockSizes) -> BlockTridiagonal {
        let m = sizes.levels();
        let centrals = (1..=m).map(|n| Mat::zeros(sizes.k(n), sizes.k(n))).collect();
        let uppers = (1..m).map(|n| Mat::zeros(sizes.k(n), sizes.k(n + 1))).collect();
        let lowers = (1..m).map(|n| Mat::zeros(sizes.k(n + 1), sizes.k(n))).collect();
        BlockTridiagonal { sizes, centrals, uppers, lowers }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.sizes.levels();
        if self.centrals.len() != m || self.uppers.len() + 1 != m.max(1) || self.lowers.len() != self.uppers.len() {
            return invalid("block counts do not match the number of levels");
        }
        for n in 1..=m {
            let k = self.sizes.k(n);
            if self.centrals[n - 1].shape() != (k, k) {
                return invalid(format!("central block {n} has the wrong shape"));
            }
            if n < m {
                let k1 = self.sizes.k(n + 1);
                if self.uppers[n - 1].shape() != (k, k1) {
                    return invalid(format!("upper block {n} has the wrong shape"));
                }
                if self.lowers[n - 1].shape() != (k1, k) {
                    return invalid(format!("lower block {n} has the wrong shape"));
                }
            }
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.sizes.levels()
    }

    pub fn dim(&self) -> usize {
        self.sizes.dim()
    }

    /// Dense matrix with the blocks placed at the partial-sum offsets.
    pub fn assemble(&self) -> Mat {
        let n = self.dim();
        let mut out = Mat::zeros(n, n);
        for lvl in 1..=self.levels() {
            let o = self.sizes.s(lvl - 1);
            let c = &self.centrals[lvl - 1];
            out.view_mut((o, o), c.shape()).copy_from(c);
            if lvl < self.levels() {
                let o1 = self.sizes.s(lvl);
                let a = &self.uppers[lvl - 1];
                out.view_mut((o, o1), a.shape()).copy_from(a);
                let b = &self.lowers[lvl - 1];
                out.view_mut((o1, o), b.shape()).copy_from(b);
            }
        }
        out
    }

    pub fn to_dense(&self, note: &str) -> DenseOp {
        DenseOp { entries: self.assemble(), basis_note: note.to_string() }
    }

    /// Reads the three block bands of `t`. Entries outside them are ignored;
    /// use [`super::split_bands`] to measure them.
    pub fn from_dense(t: &Mat, sizes: &BlockSizes) -> Result<BlockTridiagonal> {
        if t.nrows() != sizes.dim() || t.ncols() != sizes.dim() {
            return invalid("matrix dimension does not match the block sizes");
        }
        let mut bt = BlockTridiagonal::zeros(sizes.clone());
        for lvl in 1..=sizes.levels() {
            let o = sizes.s(lvl - 1);
            let k = sizes.k(lvl);
            bt.centrals[lvl - 1] = t.view((o, o), (k, k)).into_owned();
            if lvl < sizes.levels() {
                let o1 = sizes.s(lvl);
                let k1 = sizes.k(lvl + 1);
                bt.uppers[lvl - 1] = t.view((o, o1), (k, k1)).into_owned();
                bt.lowers[lvl - 1] = t.view((o1, o), (k1, k)).into_owned();
            }
        }
        Ok(bt)
    }

    pub fn adjoint(&self) -> BlockTridiagonal {
        BlockTridiagonal {
            sizes: self.sizes.clone(),
            centrals: self.centrals.iter().map(|c| c.adjoint()).collect(),
            uppers: self.lowers.iter().map(|b| b.adjoint()).collect(),
            lowers: self.uppers.iter().map(|a| a.adjoint()).collect(),
        }
    }

    pub fn centrals_are_zero(&self) -> bool {
        self.centrals.iter().all(|c| frobenius(c) == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Operator,
    Trace,
    Schatten(f64),
}

impl NormKind {
    pub fn eval(self, m: &Mat) -> f64 {
        match self {
            NormKind::Operator => op_norm(m),
            NormKind::Trace => trace_norm(m),
            NormKind::Schatten(p) => schatten_norm(m, p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockNorms {
    pub centrals: RealSeq,
    pub uppers: RealSeq,
    pub lowers: RealSeq,
}

pub fn block_norms(bt: &BlockTridiagonal, which: NormKind) -> Result<BlockNorms> {
    if let NormKind::Schatten(p) = which {
        if !(p >= 1.0) {
            return invalid("Schatten exponent must be at least 1");
        }
    }
    let f = |v: &[Mat]| RealSeq::new(v.iter().map(|m| which.eval(m)).collect());
    Ok(BlockNorms { centrals: f(&bt.centrals)?, uppers: f(&bt.uppers)?, lowers: f(&bt.lowers)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmat::split_bands;
    use crate::linalg::{c, random_complex};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn assemble_small_example() {
        let sizes = BlockSizes::new(vec![1, 2]).unwrap();
        let mut bt = BlockTridiagonal::zeros(sizes);
        bt.uppers[0] = Mat::from_row_slice(1, 2, &[c(1.0), c(0.0)]);
        bt.lowers[0] = Mat::from_row_slice(2, 1, &[c(0.0), c(1.0)]);
        let d = bt.assemble();
        let mut expect = Mat::zeros(3, 3);
        expect[(0, 1)] = c(1.0);
        expect[(2, 0)] = c(1.0);
        assert_eq!(d, expect);
    }

    #[test]
    fn round_trip_through_bands() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sizes = BlockSizes::new(vec![1, 2, 6, 5]).unwrap();
        let mut bt = BlockTridiagonal::zeros(sizes.clone());
        for m in bt.centrals.iter_mut().chain(bt.uppers.iter_mut()).chain(bt.lowers.iter_mut()) {
            *m = random_complex(m.nrows(), m.ncols(), &mut rng);
        }
        let d = bt.to_dense("");
        let s = split_bands(&d, &sizes).unwrap();
        assert!(!s.has_outside);
        let back = &s.minus.entries + &s.zero.entries + &s.plus.entries;
        assert_eq!(back, d.entries);
        assert_eq!(BlockTridiagonal::from_dense(&d.entries, &sizes).unwrap(), bt);
        let j = serde_json::to_string(&bt).unwrap();
        let again: BlockTridiagonal = serde_json::from_str(&j).unwrap();
        assert_eq!(again, bt);
    }

    #[test]
    fn schatten_rejects_small_p() {
        let bt = BlockTridiagonal::zeros(BlockSizes::arithmetic(3));
        assert!(block_norms(&bt, NormKind::Schatten(0.5)).is_err());
        let n = block_norms(&bt, NormKind::Trace).unwrap();
        assert_eq!(n.uppers.len(), 2);
    }
}
