//! Randomized invariants of every layer.

mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zn_edge::cft_oracle::{
    charge_prediction, prediction_table, scaling_dimension, twisted_momentum, twisted_scaling_dimension,
};
use zn_edge::clock_algebra::{order_and_unitarity_check, weyl_check};
use zn_edge::cocycle::{three_cocycle, verify_cocycle_condition, GroupElement};
use zn_edge::hamiltonian::{commutator_residual, EdgeModel};
use zn_edge::hilbert::{apply_kernel, apply_translation, ChainGeometry, LocalKernel, ManyBodyOperator, StateVector};
use zn_edge::spectra::{
    lowest_eigenpairs, resolve_quantum_numbers, QuantumOptions, SolverMethod, SolverOptions,
};
use zn_edge::symmetry::{
    build_symmetry, build_twisted_symmetry, build_twisted_translation, q_polynomial, SptClass,
};

fn class_strategy(max_n: usize) -> impl Strategy<Value = SptClass> {
    (2..=max_n).prop_flat_map(|n| (Just(n), 0..n)).prop_map(|(n, p)| SptClass::new(n, p).unwrap())
}

fn random_vector(g: &ChainGeometry, seed: u64) -> StateVector {
    StateVector::random(g, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Dense embedding of a kernel with local index `Σ_a d_{support[a]} N^a`.
fn embed(k: &LocalKernel, m: usize) -> Dense {
    let n = k.n();
    let dim = n.pow(m as u32);
    let sup = k.support();
    let local = |d: &[usize]| sup.iter().rev().fold(0, |acc, &s| acc * n + d[s]);
    let mut out = Dense::zeros(dim, dim);
    for col in 0..dim {
        let d = digits(n, m, col);
        let lc = local(&d);
        for lr in 0..k.matrix().nrows() {
            let v = k.matrix()[(lr, lc)];
            let mut e = d.clone();
            let mut rest = lr;
            for &s in sup {
                e[s] = rest % n;
                rest /= n;
            }
            out[(index(n, &e), col)] += v;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn clock_algebra_relations(n in 2usize..=8) {
        prop_assert!(weyl_check(n).unwrap() < 1e-13);
        prop_assert!(order_and_unitarity_check(n).unwrap() < 1e-13);
    }

    #[test]
    fn encode_decode_bijection(
        (n, m) in prop_oneof![Just((2usize, 4usize)), Just((3, 3)), Just((4, 2)), Just((5, 3))],
        seed in any::<u64>(),
    ) {
        let g = ChainGeometry::new(n, m).unwrap();
        for i in 0..g.dim() {
            prop_assert_eq!(g.encode(&g.decode(i).unwrap()).unwrap(), i);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let config: Vec<usize> = (0..m).map(|_| rand::Rng::gen_range(&mut rng, 0..n)).collect();
        prop_assert_eq!(g.decode(g.encode(&config).unwrap()).unwrap(), config);
    }

    #[test]
    fn translation_has_order_m(n in 2usize..=4, m in 2usize..=6, seed in any::<u64>()) {
        let g = ChainGeometry::new(n, m).unwrap();
        let v = random_vector(&g, seed);
        let w = (0..m).fold(v.clone(), |acc, _| apply_translation(&acc));
        prop_assert!(w.distance(&v) < 1e-12);
    }

    #[test]
    fn kernels_match_dense_embedding(
        n in 2usize..=4,
        width in 1usize..=3,
        first in 0usize..6,
        seed in any::<u64>(),
    ) {
        let m = (1..=8).rev().find(|&m| n.pow(m as u32) <= 256).unwrap().max(width);
        let d = n.pow(width as u32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mat = DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rand::Rng::gen_range(&mut rng, -1.0..1.0), rand::Rng::gen_range(&mut rng, -1.0..1.0))
        });
        let support = (0..width).collect();
        let k = LocalKernel::new(n, support, mat).unwrap().relocated(first % m, m);
        let g = ChainGeometry::new(n, m).unwrap();
        let v = random_vector(&g, seed ^ 1);
        let got = apply_kernel(&k, &v).unwrap();
        let want = embed(&k, m) * nalgebra::DVector::from_column_slice(v.amplitudes());
        let err = got.amplitudes().iter().zip(want.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-13);
        let sum = ManyBodyOperator::sum(&g, vec![k.clone(), k]).unwrap().apply(&v).unwrap();
        let err = sum.amplitudes().iter().zip(want.iter()).map(|(a, b)| (a - b * 2.0).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn domain_wall_exponentiation(class in class_strategy(12)) {
        let q = q_polynomial(class);
        prop_assert!(q.exponentiation_deviation() < 1e-12);
        prop_assert!(q.hermiticity_deviation() < 1e-12);
    }

    #[test]
    fn symmetry_order_and_translation(class in class_strategy(5), m in 3usize..=8, seed in any::<u64>()) {
        let (n, p) = (class.n(), class.p());
        prop_assume!(n.pow(m as u32) <= 1 << 16);
        let s = build_symmetry(class, m).unwrap();
        let g = ChainGeometry::new(n, m).unwrap();
        let v = random_vector(&g, seed);
        let w = (0..n).fold(v.clone(), |acc, _| s.apply(&acc).unwrap());
        prop_assert!(w.distance(&v) < 1e-10, "S^N N={} p={} M={}", n, p, m);
        let t = ManyBodyOperator::translation(&g);
        prop_assert!(commutator_residual(&s, &t, 1, seed).unwrap() < 1e-10);
    }

    #[test]
    fn twisted_translation_power(class in class_strategy(4), m in 3usize..=10, seed in any::<u64>()) {
        prop_assume!(class.n().pow(m as u32) <= 1 << 16);
        let tt = build_twisted_translation(class, m).unwrap();
        let st = build_twisted_symmetry(class, m).unwrap();
        let v = random_vector(tt.geometry(), seed);
        let w = (0..m).fold(v.clone(), |acc, _| tt.apply(&acc).unwrap());
        prop_assert!(w.distance(&st.apply(&v).unwrap()) < 1e-10);
    }

    #[test]
    fn hamiltonians_are_hermitian_and_symmetric(
        class in class_strategy(4),
        m in 3usize..=8,
        lambda in 0.1f64..2.0,
        seed in any::<u64>(),
    ) {
        prop_assume!(class.n().pow(m as u32) <= 1 << 14);
        let h = EdgeModel::new(class, m, lambda, false).unwrap().build().unwrap();
        let ht = EdgeModel::new(class, m, lambda, true).unwrap().build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(h.hermiticity_defect(1, &mut rng) < 1e-11);
        prop_assert!(ht.hermiticity_defect(1, &mut rng) < 1e-11);
        let s = build_symmetry(class, m).unwrap();
        let t = ManyBodyOperator::translation(h.geometry());
        prop_assert!(commutator_residual(&h, &s, 1, seed).unwrap() < 1e-10);
        prop_assert!(commutator_residual(&h, &t, 1, seed).unwrap() < 1e-10);
        let tt = build_twisted_translation(class, m).unwrap();
        let st = build_twisted_symmetry(class, m).unwrap();
        prop_assert!(commutator_residual(&ht, &tt, 1, seed).unwrap() < 1e-10);
        prop_assert!(commutator_residual(&ht, &st, 1, seed).unwrap() < 1e-10);
    }

    #[test]
    fn twisted_dimension_is_shifted_winding(
        class in class_strategy(7),
        n in -6i64..=6,
        m in -6i64..=6,
        r in 0.5f64..4.0,
    ) {
        let nn = class.n() as f64;
        let a = n as f64 + class.p() as f64 / nn;
        let b = m as f64 + 1.0 / nn;
        let want = a * a / (r * r) + r * r * b * b / 4.0;
        prop_assert!((twisted_scaling_dimension(class, n, m, r).unwrap() - want).abs() < 1e-14 * want.max(1.0));
        prop_assert!((twisted_momentum(class, n, m) - a * b).abs() < 1e-14 * (a * b).abs().max(1.0));
        prop_assert!((scaling_dimension(n, m, r).unwrap()
            - ((n * n) as f64 / (r * r) + r * r * (m * m) as f64 / 4.0)).abs() < 1e-14 * want.max(1.0));
        let q = charge_prediction(class, n, m);
        prop_assert!((q.powu(class.n() as u32) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cocycle_periodic_in_each_argument(class in class_strategy(6), a in 0i64..6, b in 0i64..6, c in 0i64..6, k in -3i64..=3) {
        let n = class.n();
        let g = |v: i64| GroupElement::new(n, v).unwrap();
        let base = three_cocycle(class, g(a), g(b), g(c)).unwrap().phase;
        let s = k * n as i64;
        for (x, y, z) in [(a + s, b, c), (a, b + s, c), (a, b, c + s)] {
            let shifted = three_cocycle(class, g(x), g(y), g(z)).unwrap().phase;
            prop_assert!((shifted - base).norm() < 1e-12);
        }
    }
}

#[test]
fn cocycle_condition_small_groups() {
    for n in 2..=6 {
        for p in 0..n {
            assert!(verify_cocycle_condition(SptClass::new(n, p).unwrap()) < 1e-12);
        }
    }
}

#[test]
fn twisted_z2_table_pairs_up() {
    let class = SptClass::new(2, 1).unwrap();
    let table = prediction_table(class, 2.0, true, 4, 4).unwrap();
    for n in -3i64..=3 {
        for m in -3i64..=3 {
            let d = twisted_scaling_dimension(class, n, m, 2.0).unwrap();
            let partner = twisted_scaling_dimension(class, -1 - n, -1 - m, 2.0).unwrap();
            assert!((n, m) != (-1 - n, -1 - m));
            assert!((d - partner).abs() < 1e-14);
            assert!(table.iter().any(|p| (p.n, p.m) == (-1 - n, -1 - m)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn quantum_numbers_are_quantized(
        (class, m) in prop_oneof![
            (class_strategy(2), 4usize..=8),
            (class_strategy(3), 3usize..=6),
            (class_strategy(4), 3usize..=4),
        ],
        lambda in 0.2f64..1.5,
        twisted in any::<bool>(),
    ) {
        let model = EdgeModel::new(class, m, lambda, twisted).unwrap();
        let h = model.build().unwrap();
        let count = 12.min(h.geometry().dim());
        let opts = SolverOptions::default().with_method(SolverMethod::Dense);
        let pairs = lowest_eigenpairs(&h, count, &opts).unwrap();
        let g = h.geometry().clone();
        let (t, s) = if twisted {
            (build_twisted_translation(class, m).unwrap(), build_twisted_symmetry(class, m).unwrap())
        } else {
            (ManyBodyOperator::translation(&g), build_symmetry(class, m).unwrap())
        };
        // A degenerate block cut at `count` can leak, so only complete blocks are labelled.
        let last = pairs.last().unwrap().energy;
        let complete: Vec<_> = pairs.iter().filter(|p| (p.energy - last).abs() > 1e-7).cloned().collect();
        prop_assume!(!complete.is_empty());
        let records = resolve_quantum_numbers(&complete, &t, &s, &QuantumOptions::default()).unwrap();
        for r in &records {
            prop_assert!(r.residual < 1e-9);
            prop_assert!(r.momentum_k > -(m as f64) / 2.0 - 1e-9 && r.momentum_k <= m as f64 / 2.0 + 1e-9);
            if twisted {
                let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * r.momentum_k);
                prop_assert!((phase - r.symmetry_eigenvalue).norm() < 1e-6, "k~ {} vs S~ {}", r.momentum_k, r.symmetry_eigenvalue);
            } else {
                prop_assert!((r.momentum_k - r.momentum_k.round()).abs() < 1e-6);
                prop_assert!((r.charge_phase.powu(class.n() as u32) - Complex64::new(1.0, 0.0)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn krylov_agrees_with_dense(
        (class, m) in prop_oneof![(class_strategy(2), 9usize..=12), (class_strategy(3), 6usize..=7)],
        lambda in 0.2f64..1.5,
        seed in any::<u64>(),
    ) {
        let h = EdgeModel::new(class, m, lambda, seed % 2 == 0).unwrap().build().unwrap();
        let count = 29;
        let dense = lowest_eigenpairs(&h, count, &SolverOptions::default().with_method(SolverMethod::Dense)).unwrap();
        let krylov = lowest_eigenpairs(
            &h,
            count,
            &SolverOptions::default().with_method(SolverMethod::Krylov).with_seed(seed),
        )
        .unwrap();
        for (d, k) in dense.iter().zip(&krylov) {
            prop_assert!((d.energy - k.energy).abs() < 1e-9, "dense {} krylov {}", d.energy, k.energy);
            prop_assert!(k.residual < 1e-9);
        }
    }

    #[test]
    fn conjugate_classes_share_spectra(m in 3usize..=6, lambda in 0.2f64..1.5) {
        for n in [3usize, 4, 5] {
            prop_assume!(n.pow(m as u32) <= 1024);
            for p in 1..n {
                let a = spectrum(&dense_of(&EdgeModel::new(SptClass::new(n, p).unwrap(), m, lambda, false).unwrap().build().unwrap()));
                let b = spectrum(&dense_of(&EdgeModel::new(SptClass::new(n, n - p).unwrap(), m, lambda, false).unwrap().build().unwrap()));
                prop_assert!(max_gap(&a, &b) < 1e-10, "N={} p={} M={}", n, p, m);
            }
        }
    }
}
