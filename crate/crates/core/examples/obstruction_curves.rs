//! Partial-trace ratio curves, growth classification and a counterexample sequence.

use opcommute::blockmat::BlockSizes;
use opcommute::obstruction::{counterexample_sequence, growth_classify, ratio_curve};
use opcommute::seqcalc::RealSeq;

fn main() -> opcommute::Result<()> {
    let sizes = BlockSizes::arithmetic(100);
    let d = RealSeq::from_fn(sizes.dim(), |n| 1.0 / (n as f64).sqrt())?;
    let curve = ratio_curve(&d, &sizes)?;
    println!("d_n = 1/sqrt(n): ratio at level 100 {:.5}", curve.term(100));

    for (name, s) in [("arithmetic", BlockSizes::arithmetic(60)), ("2*3^(n-2)", BlockSizes::geometric_cover(3, 20)?)] {
        let g = growth_classify(&s)?;
        println!("{name}: liminf k_n/s_n {:.4}, exponential {}", g.liminf_est, g.omega_exponential);
    }

    let cx = counterexample_sequence(&BlockSizes::arithmetic(200), 20_100)?;
    for c in cx.certified.iter().take(5) {
        println!("l={} level {} ratio {:.3} > {:.3}", c.l, c.n, c.ratio, c.bound);
    }
    Ok(())
}
