use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use super::qft::apply_qft_leading;
use crate::error::{QError, Result};
use crate::statevec::{sample_from_probs, QState, DEFAULT_QUBIT_CAP};

/// Counting-register sizing for phase estimation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseEstConfig {
    pub t: usize,
    pub n_bits: usize,
    pub epsilon: f64,
    pub max_qubits: usize,
}

impl PhaseEstConfig {
    /// `t = n + ⌈log2(2 + 1/(2ε))⌉` counting qubits for `n` bits with failure ≤ ε.
    pub fn from_precision(n_bits: usize, epsilon: f64) -> Result<Self> {
        if n_bits == 0 || !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(QError::InvalidArgument(format!(
                "need n_bits ≥ 1 and 0 < ε < 1, got n_bits={n_bits}, ε={epsilon}"
            )));
        }
        let extra = (2.0 + 1.0 / (2.0 * epsilon)).log2().ceil() as usize;
        Ok(Self {
            t: n_bits + extra,
            n_bits,
            epsilon,
            max_qubits: DEFAULT_QUBIT_CAP,
        })
    }

    /// Fixed register of `t` qubits; precision equals `t`, no failure budget.
    pub fn with_t(t: usize) -> Result<Self> {
        if t == 0 {
            return Err(QError::InvalidArgument("counting register needs t ≥ 1".into()));
        }
        Ok(Self {
            t,
            n_bits: t,
            epsilon: 1.0,
            max_qubits: DEFAULT_QUBIT_CAP,
        })
    }
}

/// Exact counting-register distribution plus sampled outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseEstimate {
    pub t: usize,
    /// Probability of reading `k`, for `k` in `0..2^t`.
    pub distribution: Vec<f64>,
    pub samples: Vec<usize>,
}

impl PhaseEstimate {
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.distribution.iter().enumerate() {
            if p > self.distribution[best] + 1e-12 {
                best = k;
            }
        }
        best
    }

    /// `k / 2^t`.
    pub fn phase_of(&self, k: usize) -> f64 {
        k as f64 / (1usize << self.t) as f64
    }

    /// Mass on outcomes whose phase lies within `tol` of `phi` on the circle.
    pub fn mass_within(&self, phi: f64, tol: f64) -> f64 {
        self.distribution
            .iter()
            .enumerate()
            .filter(|(k, _)| circular_distance(self.phase_of(*k), phi) <= tol + 1e-12)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Distance between two phases in `[0, 1)` taken modulo 1.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Phase estimation with caller-supplied powers: `u_pow(j)` returns `U^{2^j}`.
///
/// Counting qubit `t-1-j` controls `U^{2^j}`, so the readout `k` approximates
/// `φ·2^t` for `U|u> = e^{2πiφ}|u>`.
pub fn phase_estimate<F, R>(
    u_pow: F,
    eigenstate: &QState,
    cfg: &PhaseEstConfig,
    shots: usize,
    rng: &mut R,
) -> Result<PhaseEstimate>
where
    F: Fn(usize) -> Result<DMatrix<C64>>,
    R: Rng + ?Sized,
{
    let t = cfg.t;
    let m = eigenstate.num_qubits();
    if t + m > cfg.max_qubits {
        return Err(QError::CapExceeded {
            requested: t + m,
            cap: cfg.max_qubits,
        });
    }
    let mut state = QState::zero_with_cap(t, cfg.max_qubits)?.tensor(eigenstate)?;
    for q in 0..t {
        state.apply_named("H", &[q], &[])?;
    }
    let system: Vec<usize> = (t..t + m).collect();
    for j in 0..t {
        let u = u_pow(j)?;
        state.apply_controlled(&[t - 1 - j], &u, &system)?;
    }
    let state = apply_qft_leading(&state, t, true)?;
    let rest = 1usize << m;
    let distribution: Vec<f64> = state
        .amplitudes()
        .chunks(rest)
        .map(|block| block.iter().map(|a| a.norm_sqr()).sum())
        .collect();
    let samples = sample_from_probs(&distribution, shots, rng);
    Ok(PhaseEstimate {
        t,
        distribution,
        samples,
    })
}

/// Phase estimation of a dense unitary, with powers by repeated squaring.
pub fn phase_estimate_unitary<R: Rng + ?Sized>(
    u: &DMatrix<C64>,
    eigenstate: &QState,
    cfg: &PhaseEstConfig,
    shots: usize,
    rng: &mut R,
) -> Result<PhaseEstimate> {
    if u.nrows() != eigenstate.dim() || u.ncols() != eigenstate.dim() {
        return Err(QError::SizeMismatch {
            expected: eigenstate.dim(),
            got: u.nrows(),
        });
    }
    let mut powers = Vec::with_capacity(cfg.t);
    let mut p = u.clone();
    for _ in 0..cfg.t {
        let next = &p * &p;
        powers.push(p);
        p = next;
    }
    phase_estimate(|j| Ok(powers[j].clone()), eigenstate, cfg, shots, rng)
}
