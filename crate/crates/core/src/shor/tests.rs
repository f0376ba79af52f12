use super::*;
use crate::statevec::Circuit;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Naive repeated multiplication, independent of square-and-multiply.
fn pow_naive(x: u64, e: u64, n: u64) -> u64 {
    (0..e).fold(1 % n, |acc, _| acc * (x % n) % n)
}

/// Trial-division factor oracle.
fn smallest_factor(n: u64) -> u64 {
    (2..n).find(|d| n % d == 0).unwrap_or(n)
}

#[test]
fn modular_examples() {
    assert_eq!(mod_pow(2, 4, 15).unwrap(), 1);
    assert_eq!(mod_pow(5, 6, 21).unwrap(), 1);
    assert_eq!(mod_pow(9, 0, 21).unwrap(), 1);
    assert!(mod_pow(3, 2, 1).is_err());
    assert_eq!(mod_inverse(7, 15).unwrap(), 13);
    assert_eq!(mod_inverse(6, 15), Err(QError::NotCoprime { x: 6, n: 15 }));
    assert_eq!(mod_inverse(1, 22).unwrap(), 1);
    assert_eq!(classical_order(2, 15).unwrap(), 4);
    assert_eq!(classical_order(5, 21).unwrap(), 6);
    assert_eq!(classical_order(1, 35).unwrap(), 1);
    assert!(classical_order(6, 15).is_err());
}

#[test]
fn powers_of_two_mod_15_table() {
    let expect = [1, 2, 4, 8, 1, 2, 4, 8, 1];
    for (j, &e) in expect.iter().enumerate() {
        assert_eq!(mod_pow(2, j as u64, 15).unwrap(), e);
    }
}

#[test]
fn continued_fraction_examples() {
    assert_eq!(continued_fraction_r(3, 4, 15), Some(4));
    assert_eq!(continued_fraction_r(1, 4, 15), Some(4));
    assert_eq!(continued_fraction_r(2, 4, 15), Some(2));
    assert_eq!(continued_fraction_r(0, 4, 15), None);
    assert_eq!(convergents(3, 4), vec![(0, 1), (1, 1), (3, 4)]);
}

#[test]
fn continued_fractions_recover_order_in_convergence_regime() {
    for n in [15u64, 21] {
        for x in 2..n {
            if x.gcd(&n) != 1 {
                continue;
            }
            let r = classical_order(x, n).unwrap();
            for t in 2..=10u32 {
                let q = 1u64 << t;
                if r * r >= q {
                    continue;
                }
                for k in 1..q {
                    // k within ½ of s·Q/r for some s
                    let s_near = ((k * r) as f64 / q as f64).round() as u64;
                    let dist = (k as f64 - s_near as f64 * q as f64 / r as f64).abs();
                    if s_near == 0 || s_near >= r || dist > 0.5 {
                        continue;
                    }
                    let got = continued_fraction_r(k, q, n).expect("candidate");
                    let reduced = r / s_near.gcd(&r);
                    assert_eq!(got, reduced, "n={n} x={x} t={t} k={k}");
                    assert_eq!(r % got, 0);
                    if s_near.gcd(&r) == 1 {
                        assert_eq!(mod_pow(x, got, n).unwrap(), 1);
                    }
                }
            }
        }
    }
}

#[test]
fn order_finding_two_mod_fifteen_is_uniform() {
    let run = quantum_order_finding(2, 15, Some(2), &mut rng(1)).unwrap();
    assert_eq!(run.distribution.len(), 4);
    for p in &run.distribution {
        assert!((p - 0.25).abs() < 1e-9);
    }
    assert_eq!(run.l, 4);
}

#[test]
fn order_finding_four_mod_fifteen_concentrates_on_multiples_of_eight() {
    let run = quantum_order_finding(4, 15, Some(4), &mut rng(2)).unwrap();
    for (k, p) in run.distribution.iter().enumerate() {
        if k % 8 == 0 {
            assert!((p - 0.5).abs() < 1e-9, "k={k} p={p}");
        } else {
            assert!(*p < 1e-12, "k={k} p={p}");
        }
    }
}

#[test]
fn order_finding_seven_mod_fifteen_candidates_divide_four() {
    let r = classical_order(7, 15).unwrap();
    assert_eq!(r, 4);
    let mut g = rng(3);
    for _ in 0..20 {
        let run = quantum_order_finding(7, 15, None, &mut g).unwrap();
        if let Some(c) = run.candidate_r {
            assert_eq!(r % c, 0, "candidate {c}");
        }
    }
}

#[test]
fn order_finding_matches_dense_phase_estimation() {
    use crate::algorithms::{phase_estimate_unitary, PhaseEstConfig};
    let (x, n, t) = (2u64, 21u64, 5usize);
    let u = modmul_unitary(x, n).unwrap();
    let one = QState::basis(work_qubits(n), 1).unwrap();
    let cfg = PhaseEstConfig::with_t(t).unwrap();
    let dense = phase_estimate_unitary(&u, &one, &cfg, 1, &mut rng(4)).unwrap();
    let run = quantum_order_finding(x, n, Some(t), &mut rng(4)).unwrap();
    for (a, b) in dense.distribution.iter().zip(&run.distribution) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn order_finding_rejects_bad_input() {
    assert!(matches!(
        quantum_order_finding(6, 15, Some(3), &mut rng(0)),
        Err(QError::NotCoprime { .. })
    ));
    assert!(matches!(
        quantum_order_finding(2, 15, Some(23), &mut rng(0)),
        Err(QError::CapExceeded { .. })
    ));
    assert!(quantum_order_finding(2, 15, Some(1), &mut rng(0)).is_err());
}

#[test]
fn eigenstates_sum_to_one() {
    let (x, n) = (2u64, 15u64);
    let r = classical_order(x, n).unwrap();
    let l = work_qubits(n);
    let dim = 1usize << l;
    let u = modmul_unitary(x, n).unwrap();
    let mut total = vec![C64::new(0.0, 0.0); dim];
    for s in 0..r {
        let mut us = nalgebra::DVector::<C64>::zeros(dim);
        for k in 0..r {
            let ang = -2.0 * std::f64::consts::PI * (s * k) as f64 / r as f64;
            us[mod_pow(x, k, n).unwrap() as usize] += C64::from_polar(1.0 / (r as f64).sqrt(), ang);
        }
        // U|u_s> = e^{2πi s/r}|u_s>
        let lam = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * s as f64 / r as f64);
        let diff = &u * &us - &us * lam;
        assert!(diff.norm() < 1e-10);
        for (t, v) in total.iter_mut().zip(us.iter()) {
            *t += v / (r as f64).sqrt();
        }
    }
    for (y, a) in total.iter().enumerate() {
        let want = if y == 1 { 1.0 } else { 0.0 };
        assert!((a - C64::new(want, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn modmul_is_a_permutation_matrix() {
    for n in [15u64, 21, 33, 35] {
        for x in 2..n {
            if x.gcd(&n) != 1 {
                continue;
            }
            let u = modmul_unitary(x, n).unwrap();
            for j in 0..u.ncols() {
                let col = u.column(j);
                assert_eq!(col.iter().filter(|c| c.norm() > 0.5).count(), 1);
                assert!(col.iter().all(|c| c.norm() < 1e-15 || (c - C64::new(1.0, 0.0)).norm() < 1e-15));
            }
            let prod = u.adjoint() * &u;
            assert!((prod - DMatrix::identity(u.nrows(), u.nrows())).norm() < 1e-12);
        }
    }
}

/// Bit-rotation networks for multiplication by 2 and 4 mod 15.
#[test]
fn swap_networks_multiply_mod_fifteen() {
    // y = y3 y2 y1 y0 with y3 on qubit 1; qubit 0 is the control
    let mut times2 = Circuit::new(5);
    times2.push("FREDKIN", &[0, 1, 2], &[]).unwrap();
    times2.push("FREDKIN", &[0, 2, 3], &[]).unwrap();
    times2.push("FREDKIN", &[0, 3, 4], &[]).unwrap();
    let mut times4 = Circuit::new(5);
    times4.push("FREDKIN", &[0, 1, 3], &[]).unwrap();
    times4.push("FREDKIN", &[0, 2, 4], &[]).unwrap();
    for (circ, a) in [(&times2, 2u64), (&times4, 4)] {
        for ctrl in 0..2usize {
            for y in 0..16usize {
                let mut out = QState::basis(5, (ctrl << 4) | y).unwrap();
                out.apply_circuit(circ).unwrap();
                let expect = if ctrl == 1 { modmul_map(a, 15, y as u64) as usize } else { y };
                assert!((out.amplitude((ctrl << 4) | expect).norm() - 1.0).abs() < 1e-12);
            }
        }
    }
    // two-bit control x = x0 + 2 x1: 4^{x1} then 2^{x0}
    let mut both = Circuit::new(6);
    for (c, tgts) in [(0, [2, 4]), (0, [3, 5]), (1, [2, 3]), (1, [3, 4]), (1, [4, 5])] {
        both.push("FREDKIN", &[c, tgts[0], tgts[1]], &[]).unwrap();
    }
    for xv in 0..4u64 {
        let x1 = (xv >> 1) as usize;
        let x0 = (xv & 1) as usize;
        for y in 0..15usize {
            let idx = (x1 << 5) | (x0 << 4) | y;
            let mut out = QState::basis(6, idx).unwrap();
            out.apply_circuit(&both).unwrap();
            let f = (mod_pow(2, xv, 15).unwrap() as usize * y) % 15;
            assert!((out.amplitude((x1 << 5) | (x0 << 4) | f).norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn factor_examples() {
    let r = factor(15, &mut rng(7), 10).unwrap();
    let mut f = [r.factors.0, r.factors.1];
    f.sort();
    assert_eq!(f, [3, 5]);

    let r = factor(14, &mut rng(0), 10).unwrap();
    assert_eq!(r.factors.0, 2);
    assert_eq!(r.transcript[0].branch, Branch::Even);
    assert_eq!(r.attempts, 0);

    let r = factor(21, &mut rng(9), 20).unwrap();
    let mut f = [r.factors.0, r.factors.1];
    f.sort();
    assert_eq!(f, [3, 7]);
    assert_eq!(f[0], smallest_factor(21));
}

#[test]
fn factor_rejects_primes_and_large_inputs() {
    assert_eq!(factor(13, &mut rng(0), 5).unwrap_err(), QError::NotComposite(13));
    assert_eq!(factor(3, &mut rng(0), 5).unwrap_err(), QError::NotComposite(3));
    assert!(matches!(factor(2047, &mut rng(0), 5), Err(QError::InvalidArgument(_))));
}

#[test]
fn factor_detects_perfect_powers() {
    let r = factor(27, &mut rng(0), 5).unwrap();
    assert_eq!(r.factors, (3, 9));
    assert_eq!(r.transcript[0].branch, Branch::PerfectPower);
    assert_eq!(perfect_power_base(49), Some(7));
    assert_eq!(perfect_power_base(15), None);
}

#[test]
fn wrong_order_still_yields_a_factor() {
    // readout k=2 of a t=2 register gives r=2 for x=2, which fails verification
    let r = continued_fraction_r(2, 4, 15).unwrap();
    assert_eq!(r, 2);
    assert_ne!(mod_pow(2, r, 15).unwrap(), 1);
    let y = mod_pow(2, r / 2, 15).unwrap();
    assert_eq!((y + 1).gcd(&15), 3);
    assert_eq!((y - 1).gcd(&15), 1);
}

#[test]
fn factor_with_tutorial_register_records_branches() {
    let mut seen_wrong = false;
    for seed in 0..40 {
        let res = factor_with_t(15, Some(2), &mut rng(seed), 20).unwrap();
        let mut f = [res.factors.0, res.factors.1];
        f.sort();
        assert_eq!(f, [3, 5]);
        seen_wrong |= res.transcript.iter().any(|a| a.branch == Branch::WrongOrderRecovered);
    }
    assert!(seen_wrong);
}

#[test]
fn factor_mid_sized_composites() {
    for (n, seed) in [(91u64, 1u64), (221, 2), (323, 3), (667, 4)] {
        let res = factor(n, &mut rng(seed), 30).unwrap();
        let (p, q) = res.factors;
        assert_eq!(p * q, n);
        assert!(p > 1 && p < n);
    }
}

proptest! {
    #[test]
    fn mod_pow_matches_naive(x in 0u64..2000, e in 0u64..300, n in 2u64..2000) {
        prop_assert_eq!(mod_pow(x, e, n).unwrap(), pow_naive(x, e, n));
    }

    #[test]
    fn mod_inverse_is_inverse(x in 1u64..5000, n in 2u64..5000) {
        match mod_inverse(x, n) {
            Ok(y) => prop_assert_eq!((x % n) * y % n, 1 % n),
            Err(_) => prop_assert!(x.gcd(&n) > 1),
        }
    }

    #[test]
    fn order_finding_distribution_is_normalized(idx in 0usize..8, t in 2usize..8) {
        let x = [2u64, 4, 7, 8, 11, 13, 14, 1][idx];
        prop_assume!(x > 1);
        let run = quantum_order_finding(x, 15, Some(t), &mut rng(0)).unwrap();
        let total: f64 = run.distribution.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        // exact readouts k = s·2^t/r are peaks when r divides 2^t
        let r = classical_order(x, 15).unwrap() as usize;
        let q = 1usize << t;
        if q % r == 0 {
            for (k, p) in run.distribution.iter().enumerate() {
                let want = if k % (q / r) == 0 { 1.0 / r as f64 } else { 0.0 };
                prop_assert!((p - want).abs() < 1e-9);
            }
        }
    }
}
