//! Strictly positive diagonal commutator with seeded, pairwise distinct entries.

use opcommute::anderson::{t7_generate, DRule, T7Config};
use opcommute::linalg::op_norm;

fn main() -> opcommute::Result<()> {
    let cfg = T7Config { levels: 10, d_rule: DRule::SeededUniform { seed: 11 }, ..T7Config::default() };
    let out = t7_generate(&cfg)?;
    let diag = out.witness.target_diagonal();
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    println!("{} diagonal targets, min {min:.4e}, distinct {}", diag.len(), out.distinct_entries);
    println!("residual {:.3e}", out.witness.residuals()?.max_residual);
    for n in 1..out.witness.levels() {
        let x = op_norm(&out.witness.z.uppers[n - 1]);
        println!("n={n:2} d_n={:.5} |X_n|={x:.5} sqrt(d_n/n)={:.5}", out.d[n - 1], (out.d[n - 1] / n as f64).sqrt());
    }
    Ok(())
}
