//! One basis in which two matrices are both block tridiagonal, and a
//! commutator pair whose diagonal `D` becomes block 5-diagonal.

use opcommute::linalg::random_complex;
use opcommute::staircase::{commutator_form, fourier_commutator_pair, simultaneous_tridiagonalize};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> opcommute::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_complex(100, 100, &mut rng);
    let b = random_complex(100, 100, &mut rng);
    let form = simultaneous_tridiagonalize(&[a, b], 100, 1e-8, 1e-8)?;
    println!("block sizes {:?}", form.sizes.sizes());
    for (i, c) in form.band_checks.iter().enumerate() {
        println!("operator {i}: block tridiagonal {}", c.ok);
    }

    let d: Vec<f64> = (1..=60).map(|j| if j % 2 == 1 { 1.0 } else { -1.0 }).collect();
    let (c, z, dm) = fourier_commutator_pair(&d)?;
    let (_, report) = commutator_form(&c, &z, &dm, 60, 1e-8, 1e-8)?;
    println!("C {} Z {} D (bandwidth 2) {}", report.c_band.ok, report.z_band.ok, report.d_band.ok);
    Ok(())
}
