use super::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::statevec::{c, GateSpec, FIDELITY_TOL};

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dft(n: usize) -> DMatrix<C64> {
    let dim = 1usize << n;
    DMatrix::from_fn(dim, dim, |j, k| {
        C64::from_polar(1.0, 2.0 * PI * (j * k) as f64 / dim as f64) / (dim as f64).sqrt()
    })
}

#[test]
fn deutsch_jozsa_examples() {
    let zero = BooleanOracle::constant(1, false).unwrap();
    assert_eq!(deutsch_jozsa(&zero).unwrap(), DjVerdict::Constant);
    let first_bit = BooleanOracle::new(3, |x| x >> 2 == 1, Promise::ConstantOrBalanced).unwrap();
    assert_eq!(deutsch_jozsa(&first_bit).unwrap(), DjVerdict::Balanced);
    let not = BooleanOracle::new(1, |x| x == 0, Promise::ConstantOrBalanced).unwrap();
    assert_eq!(deutsch_jozsa(&not).unwrap(), DjVerdict::Balanced);
    let ones = BooleanOracle::constant(4, true).unwrap();
    assert_eq!(deutsch_jozsa(&ones).unwrap(), DjVerdict::Constant);
}

#[test]
fn oracle_promises_are_checked() {
    assert!(matches!(
        BooleanOracle::new(2, |x| x == 0, Promise::ConstantOrBalanced),
        Err(QError::PromiseViolation(_))
    ));
    assert!(matches!(
        BooleanOracle::new(2, |x| x < 2, Promise::SingleMarked),
        Err(QError::PromiseViolation(_))
    ));
    assert!(BooleanOracle::new(21, |_| false, Promise::General).is_err());
    let general = BooleanOracle::new(2, |x| x == 0, Promise::General).unwrap();
    assert!(deutsch_jozsa(&general).is_err());
}

#[test]
fn ancilla_oracle_matches_phase_mask() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let oracle = BooleanOracle::new(3, |x| x % 3 == 1, Promise::General).unwrap();
    let psi = QState::random(3, &mut rng).unwrap();
    let minus = QState::qubit(c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)).unwrap();
    let mut with_ancilla = psi.tensor(&minus).unwrap();
    oracle.apply_xor(&mut with_ancilla).unwrap();
    let mut phased = psi.clone();
    oracle.apply_phase(&mut phased).unwrap();
    let expected = phased.tensor(&minus).unwrap();
    assert!(with_ancilla.fidelity(&expected).unwrap() > 1.0 - FIDELITY_TOL);
    assert!((with_ancilla.inner(&expected).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
}

// Independent argmax over `0..=window` restricted to the first lobe,
// i.e. (k + ½)θ ≤ π.
fn scan_best_k(n_items: u64, marked: u64, window: u64) -> u64 {
    let theta = 2.0 * ((marked as f64) / (n_items as f64)).sqrt().asin();
    let mut best = (0, -1.0);
    for k in 0..=window {
        if ((k as f64 + 0.5) * theta) > std::f64::consts::PI {
            break;
        }
        let p = ((k as f64 + 0.5) * theta).sin().powi(2);
        if p > best.1 + 1e-12 {
            best = (k, p);
        }
    }
    best.0
}

#[test]
fn grover_iteration_counts() {
    assert_eq!(grover_iterations(4, 1).unwrap(), 1);
    assert_eq!(grover_iterations(1024, 1).unwrap(), 25);
    assert_eq!(scan_best_k(1024, 1, 100), 25);
    // Unrestricted, the second lobe would win.
    let theta = grover_angle(1024, 1);
    let p = |k: f64| ((k + 0.5) * theta).sin().powi(2);
    assert!(p(75.0) > p(25.0));
    assert_eq!(grover_iterations(2, 1).unwrap(), 0);
    assert!(grover_iterations(4, 4).is_err());
    assert!(grover_iterations(4, 0).is_err());
    for n in 2..=12u32 {
        for m in [1u64, 2, 3] {
            let big = 1u64 << n;
            if m < big {
                assert_eq!(grover_iterations(big, m).unwrap(), scan_best_k(big, m, 200));
            }
        }
    }
}

#[test]
fn grover_search_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let o = BooleanOracle::marked(2, 0b11).unwrap();
    let run = grover_search(&o, 1, &mut rng).unwrap();
    assert!((run.success_probability - 1.0).abs() < 1e-12);
    assert_eq!(run.bitstring, "11");

    let o = BooleanOracle::marked(3, 0b101).unwrap();
    let run = grover_search(&o, 2, &mut rng).unwrap();
    assert!((run.success_probability - 0.9453).abs() < 1e-4);
    assert!(run.success_probability >= 1.0 - 1.0 / 8.0);

    let run = grover_search(&o, 0, &mut rng).unwrap();
    assert!((run.success_probability - 1.0 / 8.0).abs() < 1e-12);
}

#[test]
fn grover_matches_closed_form() {
    for n in 2..=10usize {
        let big = 1u64 << n;
        let x0 = (big as usize * 5 / 7) % big as usize;
        let o = BooleanOracle::marked(n, x0).unwrap();
        let k_opt = grover_iterations(big, 1).unwrap();
        let mut s = QState::plus(n).unwrap();
        for k in 0..=3 * k_opt {
            let p = s.amplitude(x0).norm_sqr();
            assert!((p - grover_success_probability(big, 1, k)).abs() < 1e-9, "n={n} k={k}");
            if k == k_opt {
                assert!(p >= 1.0 - 1.0 / big as f64);
            }
            o.apply_phase(&mut s).unwrap();
            let mean: C64 = s.amplitudes().iter().sum::<C64>() / s.dim() as f64;
            s.map_amplitudes(|a| mean * 2.0 - a);
        }
    }
}

#[test]
fn qft_small_cases() {
    let one = qft_circuit(1).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one.ops()[0].gate.name(), "H");

    let two = qft_circuit(2).unwrap().unitary().unwrap();
    let i = c(0.0, 1.0);
    for j in 0..4 {
        for k in 0..4 {
            let expect = i.powu((j * k) as u32) * 0.5;
            assert!((two[(j, k)] - expect).norm() < 1e-12);
        }
    }

    let three = qft_circuit(3).unwrap();
    assert_eq!(three.count_named(&["H", "CRK"]), 6);
    assert_eq!(three.count_named(&["SWAP"]), 1);
    assert!(qft_circuit(0).is_err());
}

#[test]
fn qft_equals_dft_and_inverts() {
    for n in 1..=8 {
        let c = qft_circuit(n).unwrap();
        assert_eq!(c.len(), n * (n + 1) / 2 + n / 2);
        let u = c.unitary().unwrap();
        if n <= 6 {
            assert!(max_diff(&u, &dft(n)) < 1e-10, "n={n}");
        }
        let v = inverse_qft_circuit(n).unwrap().unitary().unwrap();
        let dim = 1 << n;
        assert!(max_diff(&(v * u), &DMatrix::identity(dim, dim)) < 1e-10);
    }
}

#[test]
fn qft_product_form() {
    // QFT|j> = ⊗_l (|0> + e^{2πi j / 2^{l+1}} |1>)/√2 with qubit 0 leftmost.
    let n = 4;
    let circ = qft_circuit(n).unwrap();
    for j in 0..1usize << n {
        let mut s = QState::basis(n, j).unwrap();
        s.apply_circuit(&circ).unwrap();
        let mut product: Option<QState> = None;
        for l in 0..n {
            let phase = 2.0 * PI * j as f64 / (1usize << (l + 1)) as f64;
            let f = QState::qubit(
                c(FRAC_1_SQRT_2, 0.0),
                C64::from_polar(FRAC_1_SQRT_2, phase),
            )
            .unwrap();
            product = Some(match product {
                None => f,
                Some(p) => p.tensor(&f).unwrap(),
            });
        }
        let product = product.unwrap();
        assert!((s.inner(&product).unwrap() - c(1.0, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn fft_register_transform_matches_circuit() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (n, t) = (6, 4);
    let psi = QState::random(n, &mut rng).unwrap();
    for inverse in [false, true] {
        let fast = apply_qft_leading(&psi, t, inverse).unwrap();
        let sub = if inverse {
            inverse_qft_circuit(t).unwrap()
        } else {
            qft_circuit(t).unwrap()
        };
        let mut full = Circuit::new(n);
        for op in sub.ops() {
            full.push_gate(op.gate.clone(), &op.targets).unwrap();
        }
        let mut slow = psi.clone();
        slow.apply_circuit(&full).unwrap();
        assert!((fast.inner(&slow).unwrap() - c(1.0, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn phase_estimation_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let u = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.0, 0.0),
        C64::from_polar(1.0, 2.0 * PI * 0.625),
    ]));
    let one = QState::basis(1, 1).unwrap();
    let cfg = PhaseEstConfig::with_t(3).unwrap();
    let est = phase_estimate_unitary(&u, &one, &cfg, 16, &mut rng).unwrap();
    assert_eq!(est.mode(), 5);
    assert!((est.distribution[5] - 1.0).abs() < 1e-9);
    assert!(est.samples.iter().all(|&k| k == 5));

    let x = GateSpec::named("X", &[]).unwrap().matrix().clone();
    let plus = QState::plus(1).unwrap();
    let est = phase_estimate_unitary(&x, &plus, &PhaseEstConfig::with_t(4).unwrap(), 1, &mut rng)
        .unwrap();
    assert_eq!(est.mode(), 0);
    assert!((est.distribution[0] - 1.0).abs() < 1e-9);

    assert_eq!(PhaseEstConfig::from_precision(3, 0.25).unwrap().t, 5);
    assert!(PhaseEstConfig::from_precision(3, 0.0).is_err());

    let mut big = PhaseEstConfig::with_t(25).unwrap();
    big.max_qubits = 26;
    assert!(matches!(
        phase_estimate_unitary(&x, &QState::zero(2).unwrap().tensor(&plus).unwrap().clone(), &big, 1, &mut rng),
        Err(QError::SizeMismatch { .. })
    ));
    let too_wide = PhaseEstConfig { t: 26, ..PhaseEstConfig::with_t(1).unwrap() };
    assert!(matches!(
        phase_estimate_unitary(&x, &plus, &too_wide, 1, &mut rng),
        Err(QError::CapExceeded { .. })
    ));
}

#[test]
fn phase_estimation_failure_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let cfg = PhaseEstConfig::from_precision(3, 0.25).unwrap();
    let one = QState::basis(1, 1).unwrap();
    for _ in 0..100 {
        let phi: f64 = rng.random();
        let u = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            C64::from_polar(1.0, 2.0 * PI * phi),
        ]));
        let est = phase_estimate_unitary(&u, &one, &cfg, 1, &mut rng).unwrap();
        assert!((est.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(est.mass_within(phi, 1.0 / 8.0) >= 1.0 - cfg.epsilon, "phi={phi}");
    }
}

#[test]
fn phase_estimation_mixture_modes() {
    // |0> = (|+> + |->)/√2 under X: outcomes concentrate on phases 0 and ½.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = GateSpec::named("X", &[]).unwrap().matrix().clone();
    let zero = QState::zero(1).unwrap();
    let est = phase_estimate_unitary(&x, &zero, &PhaseEstConfig::with_t(3).unwrap(), 1, &mut rng)
        .unwrap();
    assert!((est.distribution[0] - 0.5).abs() < 1e-9);
    assert!((est.distribution[4] - 0.5).abs() < 1e-9);
}

#[test]
fn hadamard_test_examples() {
    let mut z = Circuit::new(1);
    z.push("Z", &[0], &[]).unwrap();
    let zero = QState::zero(1).unwrap();
    assert!((hadamard_test(&z, &zero, false).unwrap().estimate - 1.0).abs() < 1e-10);

    let mut x = Circuit::new(1);
    x.push("X", &[0], &[]).unwrap();
    assert!(hadamard_test(&x, &zero, false).unwrap().estimate.abs() < 1e-10);

    let mut s = Circuit::new(1);
    s.push("S", &[0], &[]).unwrap();
    let plus = QState::plus(1).unwrap();
    let im = hadamard_test(&s, &plus, true).unwrap();
    assert!((im.estimate - 0.5).abs() < 1e-10);
    assert!((im.p0 + im.p1 - 1.0).abs() < 1e-12);
    let re = hadamard_test(&s, &plus, false).unwrap();
    assert!((re.estimate - 0.5).abs() < 1e-10);
    assert!(hadamard_test(&s, &QState::zero(2).unwrap(), false).is_err());
}

#[test]
fn swap_test_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let f = QState::random(2, &mut rng).unwrap();
    assert!((swap_test(&f, &f).unwrap() - 1.0).abs() < 1e-10);
    let a = QState::basis(2, 0).unwrap();
    let b = QState::basis(2, 3).unwrap();
    assert!((swap_test(&a, &b).unwrap() - 0.5).abs() < 1e-10);
    let zero = QState::zero(1).unwrap();
    let plus = QState::plus(1).unwrap();
    assert!((swap_test(&zero, &plus).unwrap() - 0.75).abs() < 1e-10);
    assert!(swap_test(&zero, &a).is_err());
}

fn random_circuit(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let q = rng.random_range(0..n);
        match rng.random_range(0..3) {
            0 => {
                let g = ["H", "S", "T", "X", "Y"][rng.random_range(0..5)];
                c.push(g, &[q], &[]).unwrap();
            }
            1 => {
                let g = ["RX", "RY", "RZ"][rng.random_range(0..3)];
                c.push(g, &[q], &[rng.random_range(-3.0..3.0)]).unwrap();
            }
            _ if n > 1 => {
                let r = (q + 1 + rng.random_range(0..n - 1)) % n;
                c.push("CNOT", &[q, r], &[]).unwrap();
            }
            _ => {
                c.push("H", &[q], &[]).unwrap();
            }
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hadamard_test_reads_expectation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=3);
        let psi = QState::random(n, &mut rng).unwrap();
        let q = random_circuit(n, 8, &mut rng);
        let mut qpsi = psi.clone();
        qpsi.apply_circuit(&q).unwrap();
        let expect = psi.inner(&qpsi).unwrap();
        let re = hadamard_test(&q, &psi, false).unwrap();
        let im = hadamard_test(&q, &psi, true).unwrap();
        prop_assert!((re.estimate - expect.re).abs() < 1e-10);
        prop_assert!((im.estimate - expect.im).abs() < 1e-10);
    }

    #[test]
    fn swap_test_reads_overlap(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=3);
        let f = QState::random(n, &mut rng).unwrap();
        let g = QState::random(n, &mut rng).unwrap();
        let p0 = swap_test(&f, &g).unwrap();
        prop_assert!((p0 - 0.5 * (1.0 + f.fidelity(&g).unwrap())).abs() < 1e-10);
    }

    #[test]
    fn exact_dyadic_phases_are_certain(k in 0usize..32) {
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let phi = k as f64 / 32.0;
        let u = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            C64::from_polar(1.0, 2.0 * PI * phi),
        ]));
        let est = phase_estimate_unitary(&u, &QState::basis(1, 1).unwrap(),
            &PhaseEstConfig::with_t(5).unwrap(), 1, &mut rng).unwrap();
        prop_assert_eq!(est.mode(), k);
        prop_assert!((est.distribution[k] - 1.0).abs() < 1e-9);
    }
}
