use opcommute::anderson::{classical_rank_one, eam_reduce, embed_am, t7_generate, DRule, T7Config};
use opcommute::blockmat::{commutator, split_bands, trace_chain, BlockSizes, BlockTridiagonal, DenseOp};
use opcommute::density::{count_support, count_support_bruteforce, MatrixForm};
use opcommute::linalg::{
    extend_to_unitary, max_abs, orthonormality_defect, random_complex, singular_values, trace, Mat,
};
use opcommute::obstruction::{growth_classify, ratio_curve};
use opcommute::seqcalc::{ampliate, direct_sum, intersection_witness, monotonize, pointwise, Pointwise, RealSeq};
use opcommute::staircase::{derive_basis, positive_square_sparsify, square_shape_check, Side, SupportProfile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seq() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 0..60)
}

fn sizes() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..5, 2..6)
}

fn random_bt(sizes: &[usize], seed: u64) -> BlockTridiagonal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bt = BlockTridiagonal::zeros(BlockSizes::new(sizes.to_vec()).unwrap());
    for m in bt.centrals.iter_mut().chain(bt.uppers.iter_mut()).chain(bt.lowers.iter_mut()) {
        *m = random_complex(m.nrows(), m.ncols(), &mut rng);
    }
    bt
}

proptest! {
    #[test]
    fn monotonize_idempotent_and_permutation_invariant(v in seq(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let s = RealSeq::new(v.clone()).unwrap();
        let once = monotonize(&s);
        prop_assert_eq!(monotonize(&once), once.clone());
        let mut shuffled = v;
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(monotonize(&RealSeq::new(shuffled).unwrap()), once);
    }

    #[test]
    fn monotonize_preserves_order(pairs in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 0..60)) {
        let s: Vec<f64> = pairs.iter().map(|(a, b)| a.min(*b)).collect();
        let t: Vec<f64> = pairs.iter().map(|(a, b)| a.max(*b)).collect();
        let ms = monotonize(&RealSeq::new(s).unwrap());
        let mt = monotonize(&RealSeq::new(t).unwrap());
        prop_assert!(ms.values().iter().zip(mt.values()).all(|(a, b)| a <= b));
    }

    #[test]
    fn ampliation_semigroup(v in seq(), j in 1usize..5, k in 1usize..5) {
        let s = RealSeq::new(v).unwrap();
        let lhs = ampliate(&ampliate(&s, k).unwrap(), j).unwrap();
        prop_assert_eq!(lhs.into_values(), ampliate(&s, j * k).unwrap().into_values());
    }

    #[test]
    fn direct_sum_sandwich(pairs in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..60)) {
        let l = monotonize(&RealSeq::new(pairs.iter().map(|p| p.0).collect()).unwrap());
        let m = monotonize(&RealSeq::new(pairs.iter().map(|p| p.1).collect()).unwrap());
        let join = pointwise(Pointwise::Max, &l, Some(&m)).unwrap();
        let sum = direct_sum(&l, &m);
        let upper = ampliate(&join, 2).unwrap();
        prop_assert!(join.values().iter().zip(sum.values()).all(|(a, b)| a <= b));
        prop_assert!(sum.values().iter().zip(upper.values()).all(|(a, b)| a <= b));
    }

    #[test]
    fn intersection_runs_match_direct_terms(m in 1u64..=10_000) {
        let w = intersection_witness(10).unwrap();
        let k = (1..=10).find(|&k| m <= w.s[k]).unwrap();
        let nk = |j: usize| (j * (j + 1) / 2) as i32;
        let c_direct = 2f64.powi(1 - nk(2 * k.div_ceil(2)));
        let z_direct = 2f64.powi(1 - nk(2 * (k / 2) + 1));
        prop_assert_eq!(w.c.term(m), Some(c_direct));
        prop_assert_eq!(w.z.term(m), Some(z_direct));
        let idx = m as usize - 1;
        prop_assert_eq!(w.c.decode_prefix(10_000).values()[idx], c_direct);
    }

    #[test]
    fn block_sizes_partials(v in prop::collection::vec(1usize..50, 1..30)) {
        let s = BlockSizes::new(v.clone()).unwrap();
        prop_assert_eq!(s.levels(), v.len());
        for n in 1..=v.len() {
            prop_assert_eq!(s.s(n), s.s(n - 1) + v[n - 1]);
            prop_assert!(s.s(n) > s.s(n - 1));
        }
    }

    #[test]
    fn assemble_split_round_trip(sz in sizes(), seed in any::<u64>()) {
        let bt = random_bt(&sz, seed);
        let dense = DenseOp::new(bt.assemble(), "").unwrap();
        let split = split_bands(&dense, &bt.sizes).unwrap();
        prop_assert!(!split.has_outside);
        let back = &split.minus.entries + &split.zero.entries + &split.plus.entries;
        prop_assert_eq!(back, dense.entries);
    }

    #[test]
    fn commutator_trace_vanishes(n in 1usize..30, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DenseOp::new(random_complex(n, n, &mut rng), "").unwrap();
        let b = DenseOp::new(random_complex(n, n, &mut rng), "").unwrap();
        let t = commutator(&a, &b).unwrap();
        let scale = max_abs(&a.entries) * max_abs(&b.entries) * n as f64;
        prop_assert!(trace(&t.entries).norm() <= 1e-10 * scale);
    }

    #[test]
    fn trace_chain_ordered(sz in sizes(), seed in any::<u64>()) {
        let cm = random_bt(&sz, seed);
        let zm = random_bt(&sz, seed.wrapping_add(1));
        let (c, z) = (cm.assemble(), zm.assemble());
        let t = &c * &z - &z * &c;
        for n in 1..sz.len() {
            prop_assert!(trace_chain(&t, &cm, &zm, n, 1e-10).unwrap().ordered);
        }
    }

    #[test]
    fn unitary_completion(n in 1usize..24, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let k = ((n as f64 * frac) as usize).min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_complex(n, n, &mut rng).qr().q().columns(0, k).into_owned();
        let u = extend_to_unitary(&q);
        prop_assert_eq!(u.ncols(), n);
        prop_assert!(orthonormality_defect(&u) < 1e-12);
    }

    #[test]
    fn rearrangement_dominance(v in prop::collection::vec(0.0f64..1.0, 55), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let sizes = BlockSizes::arithmetic(10);
        let mut shuffled = v;
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let d = RealSeq::new(shuffled).unwrap();
        let plain = ratio_curve(&d, &sizes).unwrap();
        let sorted = ratio_curve(&monotonize(&d), &sizes).unwrap();
        prop_assert!(plain.values().iter().zip(sorted.values()).all(|(a, b)| *a <= b * (1.0 + 1e-12)));
    }

    #[test]
    fn support_counts_match_loop(n in 1usize..200, pick in 0usize..6) {
        let forms = [
            MatrixForm::Diagonal,
            MatrixForm::Hessenberg,
            MatrixForm::AndersonModel,
            MatrixForm::Staircase { c1: 3, c2: 3 },
            MatrixForm::ProfileStaircase(SupportProfile::T3aa),
            MatrixForm::BlockTridiagonal(BlockSizes::arithmetic(20)),
        ];
        let f = &forms[pick];
        prop_assert_eq!(count_support(f, n).unwrap(), count_support_bruteforce(f, n).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn eam_round_trip(m in 2usize..8) {
        let w = classical_rank_one(m).unwrap();
        let e = embed_am(&w, &BlockSizes::pow2(m).unwrap()).unwrap();
        let r = eam_reduce(&e, m).unwrap();
        prop_assert_eq!((r.sizes, r.c, r.z, r.d_blocks), (w.sizes, w.c, w.z, w.d_blocks));
    }

    #[test]
    fn t7_strictly_positive(levels in 2usize..20, seed in any::<u64>()) {
        let cfg = T7Config { levels, d_rule: DRule::SeededUniform { seed }, ..T7Config::default() };
        let out = t7_generate(&cfg).unwrap();
        prop_assert!(out.all_positive && out.interval_ok);
        prop_assert!(out.witness.target_diagonal().iter().all(|v| *v > 0.0));
        prop_assert!(out.witness.residuals().unwrap().max_residual <= 1e-12);
    }

    #[test]
    fn derived_basis_orthonormal(n in 2usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_complex(n, n, &mut rng);
        let b = derive_basis(&[t.clone(), t.adjoint()], None, &SupportProfile::Classic { slots: 2 }, n, 1e-8).unwrap();
        prop_assert!(orthonormality_defect(&b.f) <= 1e-10);
    }

    #[test]
    fn upper_triangular_fixed_point(n in 2usize..30, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = Mat::from_fn(n, n, |i, j| if i <= j { random_complex(1, 1, &mut rng)[(0, 0)] } else { Default::default() });
        let b = derive_basis(&[t], None, &SupportProfile::Classic { slots: 1 }, n, 1e-8).unwrap();
        prop_assert_eq!(b.f, Mat::identity(n, n));
    }

    #[test]
    fn sparsify_preserves_spectrum(seed in any::<u64>(), upper in any::<bool>()) {
        let bt = random_bt(&[1, 2, 6, 18], seed);
        let side = if upper { Side::Upper } else { Side::Lower };
        let out = positive_square_sparsify(&bt, side).unwrap();
        prop_assert!(square_shape_check(&out, side, 1e-10).ok);
        let before = singular_values(&bt.assemble());
        let after = singular_values(&out.assemble());
        prop_assert!(before.iter().zip(&after).all(|(a, b)| (a - b).abs() <= 1e-9));
    }

    #[test]
    fn growth_certificate(base in 2usize..5, levels in 10usize..16) {
        let sizes: Vec<usize> = (0..levels).map(|n| base.pow(n as u32)).collect();
        let g = growth_classify(&BlockSizes::new(sizes.clone()).unwrap()).unwrap();
        prop_assert!(g.certificate_ok);
        let rho = g.rho.unwrap();
        let s: Vec<usize> = sizes.iter().scan(0, |a, k| { *a += k; Some(*a) }).collect();
        prop_assert!(s.windows(2).skip(levels / 2).all(|w| w[1] as f64 > rho * w[0] as f64));
    }
}
