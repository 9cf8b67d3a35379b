//! Gram–Schmidt over `T`, `T*` words puts a random matrix in 3n staircase form.

use opcommute::linalg::{orthonormality_defect, random_complex};
use opcommute::staircase::{classic_word_basis, transform, verify_staircase};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> opcommute::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = random_complex(80, 80, &mut rng);
    let basis = classic_word_basis(&t, 80, 1e-8)?;
    let m = transform(&t, &basis)?;
    let check = verify_staircase(&m, |n| 3 * n, |n| 3 * n, 1e-9);
    println!("basis size {}, orthonormality {:.2e}", basis.len(), orthonormality_defect(&basis.f));
    println!("staircase ok {}, worst outside entry {:?}", check.ok, check.worst);
    Ok(())
}
