//! s-number calculus: rearrangement, ampliation, dominance and the intersection witness.

use opcommute::linalg::{random_complex, singular_values};
use opcommute::seqcalc::{ampliate, dominated_by, intersection_witness, monotonize, RealSeq};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> opcommute::Result<()> {
    let s = RealSeq::new(vec![0.1, 3.0, 0.5, 2.0])?;
    println!("monotonize {:?}", monotonize(&s).values());
    println!("D_2 {:?}", ampliate(&monotonize(&s), 2)?.values());

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_complex(40, 40, &mut rng);
    let b = random_complex(40, 40, &mut rng);
    let t = &a * &b - &b * &a;
    let st = RealSeq::new_monotone(singular_values(&t))?;
    let sa = RealSeq::new_monotone(singular_values(&a))?;
    let dom = dominated_by(&st, &sa, 4, 0.01)?;
    println!("s([A,B]) <= M D_k(s(A)): found {} k {:?} M {:?}", dom.found, dom.k, dom.m);

    let w = intersection_witness(8)?;
    let both = w.c_and_z();
    for k in 1..=8 {
        println!("k={k} sum c {:.3} sum z {:.3} sum min {:.6}", w.c.sum_through_run(k), w.z.sum_through_run(k), both.sum_through_run(k));
    }
    Ok(())
}
