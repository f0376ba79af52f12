use super::*;
use crate::clifford::PauliString;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_1_SQRT_2;

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() < 1e-12
}

fn bell() -> QState {
    let mut s = QState::zero(2).unwrap();
    s.apply_named("H", &[0], &[]).unwrap();
    s.apply_named("CNOT", &[0, 1], &[]).unwrap();
    s
}

#[test]
fn basis_index_convention() {
    let s = QState::basis(3, 0b100).unwrap();
    assert_eq!(bitstring(0b100, 3), "100");
    let mut t = QState::zero(3).unwrap();
    t.apply_named("X", &[0], &[]).unwrap();
    assert_eq!(s, t);
    assert_eq!(parse_bitstring("011").unwrap(), 3);
}

#[test]
fn single_gate_examples() {
    let mut s = QState::zero(1).unwrap();
    s.apply_named("X", &[0], &[]).unwrap();
    assert!(close(s.amplitude(1), c(1.0, 0.0)));

    let mut s = QState::zero(1).unwrap();
    s.apply_named("H", &[0], &[]).unwrap();
    assert!(close(s.amplitude(0), c(FRAC_1_SQRT_2, 0.0)));
    assert!(close(s.amplitude(1), c(FRAC_1_SQRT_2, 0.0)));

    let mut s = QState::basis(2, 0b11).unwrap();
    s.apply_named("CNOT", &[0, 1], &[]).unwrap();
    assert!(close(s.amplitude(0b10), c(1.0, 0.0)));
}

#[test]
fn target_validation() {
    let mut s = QState::zero(2).unwrap();
    let cnot = GateSpec::named("CNOT", &[]).unwrap();
    assert_eq!(
        s.apply_gate(&cnot, &[0, 2]),
        Err(QError::TargetOutOfRange { index: 2, num_qubits: 2 })
    );
    assert_eq!(s.apply_gate(&cnot, &[1, 1]), Err(QError::DuplicateTarget(1)));
    assert!(matches!(
        s.apply_gate(&cnot, &[0]),
        Err(QError::ArityMismatch { expected: 2, got: 1, .. })
    ));
}

#[test]
fn cap_is_enforced() {
    assert!(matches!(QState::zero(27), Err(QError::CapExceeded { requested: 27, cap: 26 })));
    assert!(matches!(
        QState::zero_with_cap(5, 4),
        Err(QError::CapExceeded { .. })
    ));
    assert!(QState::zero(0).is_err());
}

#[test]
fn gate_on_low_qubit_matches_kron() {
    // H on qubit 1 of 2 equals (I ⊗ H) as a dense matrix.
    let mut circ = Circuit::new(2);
    circ.push("H", &[1], &[]).unwrap();
    let u = circ.unitary().unwrap();
    let h = GateSpec::named("H", &[]).unwrap();
    let expect = kron(&DMatrix::identity(2, 2), h.matrix());
    assert!((u - expect).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn reversed_targets_swap_roles() {
    // CNOT with control 1 and target 0 maps |01> to |11>.
    let mut s = QState::basis(2, 0b01).unwrap();
    s.apply_named("CNOT", &[1, 0], &[]).unwrap();
    assert!(close(s.amplitude(0b11), c(1.0, 0.0)));
}

#[test]
fn measure_basis_and_plus() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut s = QState::zero(1).unwrap();
    assert_eq!(s.measure_qubit(0, &mut rng).unwrap(), 0);

    let trials = 4000;
    let mut ones = 0;
    for _ in 0..trials {
        let mut p = QState::plus(1).unwrap();
        ones += p.measure_qubit(0, &mut rng).unwrap() as usize;
    }
    let sigma = (trials as f64 * 0.25).sqrt();
    assert!((ones as f64 - trials as f64 / 2.0).abs() < 5.0 * sigma);
    assert!(QState::zero(1).unwrap().measure_qubit(1, &mut rng).is_err());
}

#[test]
fn bell_collapse() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let mut s = bell();
        let m = s.measure_qubit(0, &mut rng).unwrap() as usize;
        let expected = QState::basis(2, m * 0b11).unwrap();
        assert!(s.fidelity(&expected).unwrap() > 1.0 - FIDELITY_TOL);
    }
}

#[test]
fn sample_counts_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let one = QState::basis(1, 1).unwrap();
    let counts = one.sample_counts(100, &mut rng).unwrap();
    assert_eq!(counts.get("1"), Some(&100));
    assert_eq!(counts.len(), 1);

    let plus = QState::plus(1).unwrap();
    let counts = plus.sample_counts(100_000, &mut rng).unwrap();
    let sigma = (100_000f64 * 0.25).sqrt();
    for key in ["0", "1"] {
        assert!((counts[key] as f64 - 50_000.0).abs() < 5.0 * sigma);
    }

    let mut ghz = QState::zero(3).unwrap();
    ghz.apply_named("H", &[0], &[]).unwrap();
    ghz.apply_named("CNOT", &[0, 1], &[]).unwrap();
    ghz.apply_named("CNOT", &[1, 2], &[]).unwrap();
    let counts = ghz.sample_counts(10_000, &mut rng).unwrap();
    assert!(counts.keys().all(|k| k == "000" || k == "111"));
    assert_eq!(counts.values().sum::<usize>(), 10_000);
    assert!(plus.sample_counts(0, &mut rng).is_err());
}

#[test]
fn pauli_expectations() {
    let zero = QState::zero(1).unwrap();
    assert!((zero.expectation_pauli(&"Z".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
    let plus = QState::plus(1).unwrap();
    assert!((plus.expectation_pauli(&"X".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
    let b = bell();
    assert!((b.expectation_pauli(&"XX".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
    assert!((b.expectation_pauli(&"YY".parse().unwrap()).unwrap() + 1.0).abs() < 1e-12);
    assert!(b.expectation_pauli(&"X".parse().unwrap()).is_err());
    assert!(b.expectation_pauli(&"iXX".parse().unwrap()).is_err());
}

#[test]
fn project_remove_keeps_conditional_state() {
    // (|0>|a> + |1>|b>)/√2 conditioned on the first qubit.
    let mut s = QState::zero(2).unwrap();
    s.apply_named("H", &[0], &[]).unwrap();
    s.apply_named("CNOT", &[0, 1], &[]).unwrap();
    s.apply_named("H", &[1], &[]).unwrap();
    let (p, rest) = s.project_remove(0, 1).unwrap();
    assert!((p - 0.5).abs() < 1e-12);
    let minus = QState::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]).unwrap();
    assert!(rest.fidelity(&minus).unwrap() > 1.0 - FIDELITY_TOL);
    let (_, rest) = s.project_remove(1, 0).unwrap();
    assert_eq!(rest.num_qubits(), 1);
}

#[test]
fn controlled_matrix_application() {
    let x = GateSpec::named("X", &[]).unwrap();
    for z in 0..8 {
        let mut a = QState::basis(3, z).unwrap();
        a.apply_controlled(&[0, 2], x.matrix(), &[1]).unwrap();
        let mut b = QState::basis(3, z).unwrap();
        b.apply_named("TOFFOLI", &[0, 2, 1], &[]).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn norm_survives_a_thousand_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 5;
    let mut s = QState::zero(n).unwrap();
    let singles = ["H", "S", "T", "X", "Y", "Z", "TDG", "SDG"];
    for _ in 0..1000 {
        match rng.random_range(0..4) {
            0 => {
                let g = singles[rng.random_range(0..singles.len())];
                s.apply_named(g, &[rng.random_range(0..n)], &[]).unwrap();
            }
            1 => {
                let g = ["RX", "RY", "RZ"][rng.random_range(0..3)];
                let th = rng.random_range(-6.0..6.0);
                s.apply_named(g, &[rng.random_range(0..n)], &[th]).unwrap();
            }
            2 => {
                let a = rng.random_range(0..n);
                let b = (a + 1 + rng.random_range(0..n - 1)) % n;
                let g = ["CNOT", "CZ", "SWAP"][rng.random_range(0..3)];
                s.apply_named(g, &[a, b], &[]).unwrap();
            }
            _ => {
                let mut qs: Vec<usize> = (0..n).collect();
                for i in 0..3 {
                    let j = rng.random_range(i..n);
                    qs.swap(i, j);
                }
                let g = ["TOFFOLI", "FREDKIN", "CCZ"][rng.random_range(0..3)];
                s.apply_named(g, &qs[..3], &[]).unwrap();
            }
        }
    }
    assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
}

#[test]
fn parallel_kernel_agrees_with_serial_reference() {
    // 15 qubits crosses the rayon threshold; compare against a per-index formula.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 15;
    let psi = QState::random(n, &mut rng).unwrap();
    let mut a = psi.clone();
    a.apply_named("RY", &[3], &[0.7]).unwrap();
    let (s, co) = (0.35f64.sin(), 0.35f64.cos());
    let bit = 1 << (n - 1 - 3);
    for z in 0..psi.dim() {
        let (z0, z1) = (z & !bit, z | bit);
        let expect = if z & bit == 0 {
            psi.amplitude(z0) * co - psi.amplitude(z1) * s
        } else {
            psi.amplitude(z0) * s + psi.amplitude(z1) * co
        };
        assert!((a.amplitude(z) - expect).norm() < 1e-12);
    }
}

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(rand_distr::StandardNormal);
        let im: f64 = rng.sample(rand_distr::StandardNormal);
        c(re, im)
    });
    m.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gate_then_adjoint_is_identity(seed in any::<u64>(), k in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let psi = QState::random(n, &mut rng).unwrap();
        let u = GateSpec::custom("U", random_unitary(1 << k, &mut rng)).unwrap();
        let mut targets: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.random_range(i..n);
            targets.swap(i, j);
        }
        targets.truncate(k);
        let mut phi = psi.clone();
        phi.apply_gate(&u, &targets).unwrap();
        prop_assert!((phi.norm_sqr() - 1.0).abs() < 1e-12);
        phi.apply_gate(&u.adjoint(), &targets).unwrap();
        for (a, b) in phi.amplitudes().iter().zip(psi.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn marginals_match_sampling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = QState::random(3, &mut rng).unwrap();
        let shots = 20_000;
        let counts = psi.sample_counts(shots, &mut rng).unwrap();
        for q in 0..3 {
            let p1 = psi.prob_one(q).unwrap();
            let ones: usize = counts
                .iter()
                .filter(|(k, _)| k.as_bytes()[q] == b'1')
                .map(|(_, v)| v)
                .sum();
            let sigma = (shots as f64 * p1 * (1.0 - p1)).sqrt().max(1.0);
            prop_assert!((ones as f64 - shots as f64 * p1).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn pauli_expectation_matches_dense(seed in any::<u64>(), letters in proptest::collection::vec(0usize..4, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = QState::random(3, &mut rng).unwrap();
        let s: String = letters.iter().map(|&l| ['I', 'X', 'Y', 'Z'][l]).collect();
        let p: PauliString = s.parse().unwrap();
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let dense = (v.adjoint() * p.to_matrix() * &v)[(0, 0)];
        let fast = psi.expectation_pauli(&p).unwrap();
        prop_assert!((dense.re - fast).abs() < 1e-12 && dense.im.abs() < 1e-12);
        prop_assert!(fast.abs() <= 1.0 + 1e-12);
    }
}
