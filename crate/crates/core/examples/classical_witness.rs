//! Builds the classical rank-one commutator and checks it against the dense product.

use opcommute::anderson::classical_rank_one;

fn main() -> opcommute::Result<()> {
    let w = classical_rank_one(12)?;
    let res = w.residuals()?;
    let t = w.dense_commutator();
    println!("dimension {}", w.sizes.dim());
    println!("max block residual {:.3e}", res.max_residual);
    println!("[C,Z] top-left entry {:.6}", t[(0, 0)].re);
    println!("[C,Z] next diagonal entries {:.3e} {:.3e}", t[(1, 1)].norm(), t[(2, 2)].norm());
    Ok(())
}
