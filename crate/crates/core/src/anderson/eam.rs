use super::{blocks_from_weights, induced_targets, weights_from_blocks, AmWeights, CommutatorWitness, Provenance};
use crate::blockmat::{BlockSizes, BlockTridiagonal};
use crate::error::{invalid, Error, Result};

fn check_ratio(sizes: &BlockSizes) -> Result<()> {
    if let Some(n) = (1..sizes.levels()).find(|&n| sizes.k(n + 1) <= sizes.k(n)) {
        return invalid(format!("block sizes must grow geometrically: k_{} <= k_{n}", n + 1));
    }
    Ok(())
}

fn pad(w: &AmWeights, sizes: &BlockSizes) -> Result<AmWeights> {
    let f = |v: &Vec<Vec<f64>>| -> Result<Vec<Vec<f64>>> {
        v.iter()
            .enumerate()
            .map(|(i, row)| {
                let k = sizes.k(i + 1);
                if row.len() > k {
                    return invalid(format!("weights at level {} exceed k = {k}", i + 1));
                }
                let mut r = row.clone();
                r.resize(k, 0.0);
                Ok(r)
            })
            .collect()
    };
    Ok(AmWeights { a: f(&w.a)?, x: f(&w.x)?, b: f(&w.b)?, y: f(&w.y)? })
}

/// Shift-pattern blocks of sizes `k_n` with `k_{n+1} > k_n`. Weight vectors
/// shorter than `k_n` are padded with zeros. Without a target, the induced
/// diagonal of the commutator is used.
pub fn eam_generate(weights: &AmWeights, sizes: &BlockSizes, target: Option<Vec<Vec<f64>>>) -> Result<CommutatorWitness> {
    check_ratio(sizes)?;
    let w = pad(weights, sizes)?;
    let (c, z) = blocks_from_weights(&w, sizes)?;
    let d_blocks = match target {
        Some(t) => {
            if t.len() != sizes.levels() || (1..=sizes.levels()).any(|n| t[n - 1].len() != sizes.k(n)) {
                return invalid("target blocks do not match the block sizes");
            }
            t
        }
        None => induced_targets(&c, &z),
    };
    Ok(CommutatorWitness {
        provenance: Provenance {
            generator: "eam".into(),
            config: serde_json::json!({ "sizes": sizes }),
            seed: None,
        },
        sizes: sizes.clone(),
        c,
        z,
        d_blocks,
    })
}

/// Places an arithmetic-size witness in the top-left corners of larger blocks.
pub fn embed_am(w: &CommutatorWitness, sizes: &BlockSizes) -> Result<CommutatorWitness> {
    let m = w.levels();
    if sizes.levels() != m {
        return invalid(format!("need {m} levels, got {}", sizes.levels()));
    }
    if w.sizes != BlockSizes::arithmetic(m) {
        return invalid("input witness must have arithmetic block sizes");
    }
    if !w.c.centrals_are_zero() || !w.z.centrals_are_zero() {
        return Err(Error::Precondition("central blocks must vanish".into()));
    }
    let weights = weights_from_blocks(&w.c, &w.z, |n| n);
    let target = w
        .d_blocks
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut v = d.clone();
            v.resize(sizes.k(i + 1), 0.0);
            v
        })
        .collect();
    let mut out = eam_generate(&weights, sizes, Some(target))?;
    out.provenance = Provenance {
        generator: format!("{}+embed", w.provenance.generator),
        config: serde_json::json!({ "inner": w.provenance.config, "sizes": sizes }),
        seed: w.provenance.seed,
    };
    Ok(out)
}

/// Upper-left corners: `A'_n = A_n[..n, ..n+1]`, `X'_n` likewise, `B'_n =
/// B_n[..n+1, ..n]`, `Y'_n` likewise, `D'_n = D_n[..n]`, over `levels` levels.
pub fn eam_reduce(w: &CommutatorWitness, levels: usize) -> Result<CommutatorWitness> {
    let m = levels.min(w.levels());
    if m < 2 {
        return invalid("need at least 2 levels");
    }
    if !w.c.centrals_are_zero() || !w.z.centrals_are_zero() {
        return invalid("central blocks must vanish in the exponential shape");
    }
    if let Some(n) = (1..=m).find(|&n| w.sizes.k(n) < n) {
        return invalid(format!("k_{n} = {} is smaller than {n}", w.sizes.k(n)));
    }
    let sizes = BlockSizes::arithmetic(m);
    let corner = |bt: &BlockTridiagonal| -> BlockTridiagonal {
        let mut out = BlockTridiagonal::zeros(sizes.clone());
        for n in 1..m {
            out.uppers[n - 1] = bt.uppers[n - 1].view((0, 0), (n, n + 1)).into_owned();
            out.lowers[n - 1] = bt.lowers[n - 1].view((0, 0), (n + 1, n)).into_owned();
        }
        out
    };
    Ok(CommutatorWitness {
        provenance: Provenance {
            generator: format!("{}+reduce", w.provenance.generator),
            config: serde_json::json!({ "levels": m }),
            seed: w.provenance.seed,
        },
        c: corner(&w.c),
        z: corner(&w.z),
        d_blocks: (1..=m).map(|n| w.d_blocks[n - 1][..n].to_vec()).collect(),
        sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anderson::classical_rank_one;

    #[test]
    fn embed_then_reduce_is_identity() {
        let w = classical_rank_one(6).unwrap();
        let e = embed_am(&w, &BlockSizes::pow2(6).unwrap()).unwrap();
        let r = eam_reduce(&e, 6).unwrap();
        assert_eq!(r.c, w.c);
        assert_eq!(r.z, w.z);
        assert_eq!(r.d_blocks, w.d_blocks);
    }

    #[test]
    fn flat_sizes_rejected() {
        let w = AmWeights { a: vec![vec![]], x: vec![vec![]], b: vec![vec![]], y: vec![vec![]] };
        assert!(eam_generate(&w, &BlockSizes::new(vec![2, 2]).unwrap(), None).is_err());
    }
}
