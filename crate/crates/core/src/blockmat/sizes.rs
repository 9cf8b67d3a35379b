use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Central block dimensions `k_1, ..., k_m` with cached partial sums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BlockSizes {
    sizes: Vec<usize>,
    partials: Vec<usize>,
}

impl TryFrom<Vec<usize>> for BlockSizes {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        BlockSizes::new(v)
    }
}

impl From<BlockSizes> for Vec<usize> {
    fn from(b: BlockSizes) -> Vec<usize> {
        b.sizes
    }
}

impl BlockSizes {
    pub fn new(sizes: Vec<usize>) -> Result<BlockSizes> {
        if sizes.contains(&0) {
            return invalid("block sizes must be positive");
        }
        let mut partials = Vec::with_capacity(sizes.len() + 1);
        partials.push(0usize);
        for k in &sizes {
            let next = partials
                .last()
                .unwrap()
                .checked_add(*k)
                .ok_or_else(|| Error::InvalidArgument("partial sums overflow".into()))?;
            partials.push(next);
        }
        Ok(BlockSizes { sizes, partials })
    }

    /// `k_n = n`.
    pub fn arithmetic(m: usize) -> BlockSizes {
        BlockSizes::new((1..=m).collect()).expect("arithmetic sizes are valid")
    }

    /// `k_1 = 1`, `k_n = (q-1) q^{n-2}`, so that `s_n = q^{n-1}`.
    pub fn geometric_cover(q: usize, m: usize) -> Result<BlockSizes> {
        if q < 2 {
            return invalid("ratio must be at least 2");
        }
        let mut sizes = Vec::with_capacity(m);
        let mut p: usize = 1;
        for n in 1..=m {
            if n == 1 {
                sizes.push(1);
            } else {
                sizes.push(
                    (q - 1)
                        .checked_mul(p)
                        .ok_or_else(|| Error::InvalidArgument("block size overflow".into()))?,
                );
                p = p
                    .checked_mul(q)
                    .ok_or_else(|| Error::InvalidArgument("block size overflow".into()))?;
            }
        }
        BlockSizes::new(sizes)
    }

    /// `k_n = 2^n - 1`.
    pub fn pow2_minus_one(m: usize) -> Result<BlockSizes> {
        if m >= usize::BITS as usize - 1 {
            return invalid("too many levels");
        }
        BlockSizes::new((1..=m).map(|n| (1usize << n) - 1).collect())
    }

    /// `k_n = 2^n`.
    pub fn pow2(m: usize) -> Result<BlockSizes> {
        if m >= usize::BITS as usize - 1 {
            return invalid("too many levels");
        }
        BlockSizes::new((1..=m).map(|n| 1usize << n).collect())
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// `s_0, s_1, ..., s_m`.
    pub fn partials(&self) -> &[usize] {
        &self.partials
    }

    pub fn levels(&self) -> usize {
        self.sizes.len()
    }

    /// `k_n`, 1-based.
    pub fn k(&self, n: usize) -> usize {
        self.sizes[n - 1]
    }

    /// `s_n`, with `s_0 = 0`.
    pub fn s(&self, n: usize) -> usize {
        self.partials[n]
    }

    pub fn dim(&self) -> usize {
        *self.partials.last().unwrap()
    }

    /// Level containing the 1-based index `i`.
    pub fn block_of(&self, i: usize) -> Option<usize> {
        if i == 0 || i > self.dim() {
            return None;
        }
        Some(self.partials.partition_point(|s| *s < i))
    }

    /// `k_{n+1} >= 2 s_n` for every stored `n`.
    pub fn is_covering(&self) -> bool {
        (1..self.levels()).all(|n| self.k(n + 1) >= 2 * self.s(n))
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.sizes.windows(2).all(|w| w[0] <= w[1])
    }

    /// Sizes clipped so the total dimension is `dim`, truncating the last block.
    pub fn truncated_to(&self, dim: usize) -> Result<BlockSizes> {
        if dim == 0 || dim > self.dim() {
            return invalid(format!("cannot truncate dimension {} to {dim}", self.dim()));
        }
        let n = self.block_of(dim).unwrap();
        let mut sizes = self.sizes[..n].to_vec();
        sizes[n - 1] = dim - self.s(n - 1);
        BlockSizes::new(sizes)
    }

    /// Level count whose partial sum equals `dim`, if any.
    pub fn level_with_dim(&self, dim: usize) -> Option<usize> {
        self.partials.iter().position(|s| *s == dim)
    }

    pub fn prefix(&self, levels: usize) -> BlockSizes {
        BlockSizes::new(self.sizes[..levels.min(self.levels())].to_vec()).unwrap()
    }
}
