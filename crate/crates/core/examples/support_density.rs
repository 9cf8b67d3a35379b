//! Support densities of common matrix forms.

use opcommute::blockmat::BlockSizes;
use opcommute::density::{density_curve, zero_density_permutation, MatrixForm};
use opcommute::staircase::SupportProfile;

fn main() -> opcommute::Result<()> {
    let forms = [
        MatrixForm::Hessenberg,
        MatrixForm::AndersonModel,
        MatrixForm::Staircase { c1: 3, c2: 3 },
        MatrixForm::ProfileStaircase(SupportProfile::T3aa),
        MatrixForm::T3aaBlock(BlockSizes::geometric_cover(3, 8)?),
    ];
    for f in &forms {
        let p = density_curve(f, &[100, 1000, 2187])?;
        let ds: Vec<String> = p.iter().map(|p| format!("{:.4}", p.d)).collect();
        println!("{:<24} {}", f.name(), ds.join(" "));
    }
    let perm = zero_density_permutation(&MatrixForm::Staircase { c1: 3, c2: 3 }, 4096, 1 << 20)?;
    println!("permuted staircase: {:.4} -> {:.6}", perm.density_before, perm.density_after);
    Ok(())
}
