//! Factoring by order finding: number theory, the simulated quantum
//! subroutine, continued fractions and the classical driver.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use num_integer::{Integer, Roots};
use rand::Rng;

use crate::algorithms::apply_qft_leading;
use crate::error::{QError, Result};
use crate::statevec::{sample_from_probs, QState, DEFAULT_QUBIT_CAP};

/// Largest modulus the simulated pipeline accepts.
pub const SHOR_MAX_N: u64 = 1 << 10;

/// Total qubits used when `t` is left to the default. Keeps the largest
/// registers (N close to 1024) at 4M amplitudes.
pub const SHOR_QUBIT_BUDGET: usize = 22;

/// `x^e mod n` by square-and-multiply.
pub fn mod_pow(x: u64, mut e: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(QError::InvalidArgument(format!("modulus must be ≥ 2, got {n}")));
    }
    let m = n as u128;
    let mut base = x as u128 % m;
    let mut acc = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    Ok(acc as u64)
}

/// `y` with `x·y ≡ 1 (mod n)`, by the extended Euclidean algorithm.
pub fn mod_inverse(x: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(QError::InvalidArgument(format!("modulus must be ≥ 2, got {n}")));
    }
    let (mut r0, mut r1) = (n as i128, (x % n) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(QError::NotCoprime { x, n });
    }
    Ok(s0.rem_euclid(n as i128) as u64)
}

/// Smallest `r ≥ 1` with `x^r ≡ 1 (mod n)`, by direct scan.
pub fn classical_order(x: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(QError::InvalidArgument(format!("modulus must be ≥ 2, got {n}")));
    }
    if x.gcd(&n) != 1 {
        return Err(QError::NotCoprime { x, n });
    }
    let x = x % n;
    let mut acc = x;
    let mut r = 1;
    while acc != 1 % n {
        acc = ((acc as u128 * x as u128) % n as u128) as u64;
        r += 1;
    }
    Ok(r)
}

/// Convergents `p/q` of `k/q_total`, in order.
pub fn convergents(k: u64, q_total: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if q_total == 0 {
        return out;
    }
    let (mut a, mut b) = (k, q_total);
    let (mut p0, mut p1) = (0u64, 1u64);
    let (mut q0, mut q1) = (1u64, 0u64);
    while b != 0 {
        let c = a / b;
        (p0, p1) = (p1, c * p1 + p0);
        (q0, q1) = (q1, c * q1 + q0);
        out.push((p1, q1));
        (a, b) = (b, a % b);
    }
    out
}

/// Order candidate from a readout `k` of a `2^t = q_total` register.
///
/// Scans the convergents of `k/Q` and returns the first (smallest)
/// denominator `r < n` whose convergent lies within `1/(2Q)` of `k/Q`, the
/// rounding window of the readout. Two distinct fractions with
/// denominators below `√Q` cannot share that window, so in the usual
/// regime this is exactly the reduced `s/r`. `None` for `k = 0` or when no
/// convergent qualifies.
pub fn continued_fraction_r(k: u64, q_total: u64, n: u64) -> Option<u64> {
    if k == 0 || k >= q_total {
        return None;
    }
    convergents(k, q_total)
        .into_iter()
        .filter(|&(p, q)| p != 0 && q < n)
        .find(|&(p, q)| {
            // |k/Q - p/q| ≤ 1/(2Q)  ⇔  2·|k·q - p·Q| ≤ q
            let lhs = 2 * (k as i128 * q as i128 - p as i128 * q_total as i128).abs();
            lhs <= q as i128
        })
        .map(|(_, q)| q)
}

/// Work-register width `L = ⌈log₂ n⌉`.
pub fn work_qubits(n: u64) -> usize {
    (64 - (n.max(2) - 1).leading_zeros()) as usize
}

/// Dense `U|y> = |x·y mod n>` on `L` qubits, identity for `y ≥ n`.
pub fn modmul_unitary(x: u64, n: u64) -> Result<DMatrix<C64>> {
    check_coprime(x, n)?;
    let l = work_qubits(n);
    if l > 10 {
        return Err(QError::CapExceeded {
            requested: l,
            cap: 10,
        });
    }
    let dim = 1usize << l;
    let mut u = DMatrix::zeros(dim, dim);
    for y in 0..dim {
        u[(modmul_map(x, n, y as u64) as usize, y)] = C64::new(1.0, 0.0);
    }
    Ok(u)
}

fn modmul_map(a: u64, n: u64, y: u64) -> u64 {
    if y < n {
        a * y % n
    } else {
        y
    }
}

fn check_coprime(x: u64, n: u64) -> Result<()> {
    if n < 2 {
        return Err(QError::InvalidArgument(format!("modulus must be ≥ 2, got {n}")));
    }
    if x.gcd(&n) != 1 {
        return Err(QError::NotCoprime { x, n });
    }
    Ok(())
}

/// One run of the order-finding subroutine.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderFindingRun {
    pub x: u64,
    pub n: u64,
    pub t: usize,
    pub l: usize,
    /// Exact probability of each counting-register readout.
    pub distribution: Vec<f64>,
    pub outcome_k: u64,
    pub candidate_r: Option<u64>,
}

impl OrderFindingRun {
    pub fn q_total(&self) -> u64 {
        1 << self.t
    }

    /// Draw another readout from the same distribution.
    pub fn resample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, Option<u64>) {
        let k = sample_from_probs(&self.distribution, 1, rng)[0] as u64;
        (k, continued_fraction_r(k, self.q_total(), self.n))
    }
}

/// Default counting register: `2L + 1`, trimmed to fit `SHOR_QUBIT_BUDGET`.
pub fn default_counting_qubits(n: u64) -> usize {
    let l = work_qubits(n);
    (2 * l + 1).min(SHOR_QUBIT_BUDGET.saturating_sub(l)).max(2)
}

/// Phase estimation on the modular multiplier with the work register in `|1>`.
///
/// Counting qubit `t-1-j` controls `U^{2^j}`, applied as the index
/// permutation it is. `t = None` picks `default_counting_qubits`.
pub fn quantum_order_finding<R: Rng + ?Sized>(
    x: u64,
    n: u64,
    t: Option<usize>,
    rng: &mut R,
) -> Result<OrderFindingRun> {
    check_coprime(x, n)?;
    if x < 2 || x >= n {
        return Err(QError::InvalidArgument(format!("base must satisfy 1 < x < N, got x={x}, N={n}")));
    }
    let l = work_qubits(n);
    let t = t.unwrap_or_else(|| default_counting_qubits(n));
    if t < 2 {
        return Err(QError::InvalidArgument(format!("need t ≥ 2, got {t}")));
    }
    if t + l > DEFAULT_QUBIT_CAP {
        return Err(QError::CapExceeded {
            requested: t + l,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    let mut state = QState::basis(t + l, 1)?;
    for q in 0..t {
        state.apply_named("H", &[q], &[])?;
    }
    let mask = (1usize << l) - 1;
    let mut a = x % n;
    for j in 0..t {
        let bit = 1usize << (l + j);
        state.apply_permutation(|z| {
            if z & bit != 0 {
                (z & !mask) | modmul_map(a, n, (z & mask) as u64) as usize
            } else {
                z
            }
        })?;
        a = a * a % n;
    }
    let state = apply_qft_leading(&state, t, true)?;
    let distribution: Vec<f64> = state
        .amplitudes()
        .chunks(1 << l)
        .map(|block| block.iter().map(|c| c.norm_sqr()).sum())
        .collect();
    let outcome_k = sample_from_probs(&distribution, 1, rng)[0] as u64;
    let candidate_r = continued_fraction_r(outcome_k, 1 << t, n);
    Ok(OrderFindingRun {
        x,
        n,
        t,
        l,
        distribution,
        outcome_k,
        candidate_r,
    })
}

/// Which branch of the driver an attempt ended in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Even,
    PerfectPower,
    GcdShortcut,
    NoCandidate,
    OddOrder,
    MinusOne,
    Success,
    /// `r` failed verification but `gcd(x^{r/2} ± 1, n)` was still nontrivial.
    WrongOrderRecovered,
    WrongOrder,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::Even => "even",
            Branch::PerfectPower => "perfect-power",
            Branch::GcdShortcut => "gcd-shortcut",
            Branch::NoCandidate => "no-candidate",
            Branch::OddOrder => "odd-order",
            Branch::MinusOne => "minus-one",
            Branch::Success => "success",
            Branch::WrongOrderRecovered => "wrong-order-recovered",
            Branch::WrongOrder => "wrong-order",
        };
        f.write_str(s)
    }
}

/// One step of the driver's transcript.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttemptRecord {
    pub x: Option<u64>,
    pub k: Option<u64>,
    pub r: Option<u64>,
    pub branch: Branch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorResult {
    pub n: u64,
    /// `(p, n / p)` with `1 < p < n`.
    pub factors: (u64, u64),
    /// Number of random bases tried.
    pub attempts: usize,
    pub transcript: Vec<AttemptRecord>,
}

/// Readouts drawn per base before moving on.
pub const K_RESAMPLES: usize = 4;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `b` with `b^k = n` for some `k ≥ 2`, if any.
pub fn perfect_power_base(n: u64) -> Option<u64> {
    if n < 4 {
        return None;
    }
    let max_k = 63 - n.leading_zeros();
    (2..=max_k).find_map(|k| {
        let b = n.nth_root(k);
        (b > 1 && b.checked_pow(k) == Some(n)).then_some(b)
    })
}

/// Factor a composite `n ≤ 1024` with the classical driver around
/// simulated order finding. `max_attempts` bounds the random bases.
pub fn factor<R: Rng + ?Sized>(n: u64, rng: &mut R, max_attempts: usize) -> Result<FactorResult> {
    factor_with_t(n, None, rng, max_attempts)
}

/// `factor` with an explicit counting-register size.
pub fn factor_with_t<R: Rng + ?Sized>(
    n: u64,
    t: Option<usize>,
    rng: &mut R,
    max_attempts: usize,
) -> Result<FactorResult> {
    if n > SHOR_MAX_N {
        return Err(QError::InvalidArgument(format!(
            "n={n} exceeds the simulation limit {SHOR_MAX_N}"
        )));
    }
    if n < 4 || is_prime(n) {
        return Err(QError::NotComposite(n));
    }
    let done = |p: u64, attempts, transcript| FactorResult {
        n,
        factors: (p, n / p),
        attempts,
        transcript,
    };
    let mut transcript = Vec::new();
    if n % 2 == 0 {
        transcript.push(AttemptRecord {
            x: None,
            k: None,
            r: None,
            branch: Branch::Even,
        });
        return Ok(done(2, 0, transcript));
    }
    if let Some(b) = perfect_power_base(n) {
        transcript.push(AttemptRecord {
            x: None,
            k: None,
            r: None,
            branch: Branch::PerfectPower,
        });
        return Ok(done(b, 0, transcript));
    }
    for attempt in 1..=max_attempts {
        let x = rng.random_range(2..=n - 2);
        let g = x.gcd(&n);
        if g != 1 {
            transcript.push(AttemptRecord {
                x: Some(x),
                k: None,
                r: None,
                branch: Branch::GcdShortcut,
            });
            return Ok(done(g, attempt, transcript));
        }
        let run = quantum_order_finding(x, n, t, rng)?;
        let mut draw = (run.outcome_k, run.candidate_r);
        for resample in 0..K_RESAMPLES {
            if resample > 0 {
                draw = run.resample(rng);
            }
            let (k, cand) = draw;
            let mut rec = AttemptRecord {
                x: Some(x),
                k: Some(k),
                r: cand,
                branch: Branch::NoCandidate,
            };
            let Some(r) = cand else {
                transcript.push(rec);
                continue;
            };
            let verified = mod_pow(x, r, n)? == 1;
            if r % 2 == 1 {
                rec.branch = if verified { Branch::OddOrder } else { Branch::WrongOrder };
                transcript.push(rec);
                if verified {
                    break;
                }
                continue;
            }
            let y = mod_pow(x, r / 2, n)?;
            if verified && y == n - 1 {
                rec.branch = Branch::MinusOne;
                transcript.push(rec);
                break;
            }
            let p = [(y + 1).gcd(&n), (y + n - 1).gcd(&n)]
                .into_iter()
                .find(|&d| d > 1 && d < n);
            match (p, verified) {
                (Some(p), true) => {
                    rec.branch = Branch::Success;
                    transcript.push(rec);
                    return Ok(done(p, attempt, transcript));
                }
                (Some(p), false) => {
                    rec.branch = Branch::WrongOrderRecovered;
                    transcript.push(rec);
                    return Ok(done(p, attempt, transcript));
                }
                (None, _) => {
                    rec.branch = Branch::WrongOrder;
                    transcript.push(rec);
                }
            }
        }
    }
    Err(QError::AttemptsExhausted(max_attempts))
}

#[cfg(test)]
mod tests;
