use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::nelder_mead::{minimize_multistart, OptimizerConfig};
use super::spectrum::PauliSum;
use crate::error::{QError, Result};
use crate::statevec::{QState, DEFAULT_QUBIT_CAP};

/// Two-qubit layout of the fixed entangling layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Entangler {
    /// CZ on `(0,1), (1,2), …, (n−2,n−1)`.
    #[default]
    CzLine,
    /// CZ line closed by `(n−1, 0)`.
    CzRing,
}

impl Entangler {
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        let mut p: Vec<_> = (0..n.saturating_sub(1)).map(|q| (q, q + 1)).collect();
        if self == Entangler::CzRing && n > 2 {
            p.push((n - 1, 0));
        }
        p
    }
}

/// Hardware-efficient VQE instance.
#[derive(Clone, Debug, PartialEq)]
pub struct VqeProblem {
    pub hamiltonian: PauliSum,
    pub depth: usize,
    pub entangler: Entangler,
}

impl VqeProblem {
    pub fn new(hamiltonian: PauliSum, depth: usize) -> Result<Self> {
        if hamiltonian.is_empty() {
            return Err(QError::InvalidArgument("the Hamiltonian has no terms".into()));
        }
        let n = hamiltonian.num_qubits();
        if n > DEFAULT_QUBIT_CAP {
            return Err(QError::CapExceeded {
                requested: n,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        Ok(Self {
            hamiltonian,
            depth,
            entangler: Entangler::CzLine,
        })
    }

    pub fn with_entangler(mut self, e: Entangler) -> Self {
        self.entangler = e;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.hamiltonian.num_qubits()
    }

    /// `n(3d + 2)`.
    pub fn num_params(&self) -> usize {
        self.num_qubits() * (3 * self.depth + 2)
    }
}

/// Trial state: `R_z R_x` on every qubit, then `d` rounds of
/// (entangler, `R_z R_x R_z` on every qubit), acting on `|0…0>`.
///
/// Parameters are consumed qubit by qubit within each layer, the first
/// angle of a qubit's block applied first.
pub fn ansatz_state(prob: &VqeProblem, theta: &[f64]) -> Result<QState> {
    if theta.len() != prob.num_params() {
        return Err(QError::SizeMismatch {
            expected: prob.num_params(),
            got: theta.len(),
        });
    }
    let n = prob.num_qubits();
    let mut s = QState::zero(n)?;
    let mut it = theta.iter().copied();
    let mut next = || it.next().expect("length checked");
    for q in 0..n {
        s.apply_named("RX", &[q], &[next()])?;
        s.apply_named("RZ", &[q], &[next()])?;
    }
    let pairs = prob.entangler.pairs(n);
    for _ in 0..prob.depth {
        for &(a, b) in &pairs {
            s.apply_named("CZ", &[a, b], &[])?;
        }
        for q in 0..n {
            s.apply_named("RZ", &[q], &[next()])?;
            s.apply_named("RX", &[q], &[next()])?;
            s.apply_named("RZ", &[q], &[next()])?;
        }
    }
    Ok(s)
}

/// `Σ_α h_α <P_α>`, exact.
pub fn vqe_energy(prob: &VqeProblem, theta: &[f64]) -> Result<f64> {
    prob.hamiltonian.expectation(&ansatz_state(prob, theta)?)
}

/// Shot-noise estimate: each term measured `shots` times in its own basis.
pub fn vqe_energy_sampled<R: Rng + ?Sized>(
    prob: &VqeProblem,
    theta: &[f64],
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    if shots == 0 {
        return Err(QError::InvalidArgument("shots must be at least 1".into()));
    }
    let s = ansatz_state(prob, theta)?;
    let mut e = 0.0;
    for (h, p) in prob.hamiltonian.terms() {
        if p.weight() == 0 {
            e += if p.phase() == 2 { -h } else { *h };
            continue;
        }
        let mean = s.expectation_pauli(p)?;
        let p_plus = ((1.0 + mean) / 2.0).clamp(0.0, 1.0);
        let plus = Binomial::new(shots, p_plus)
            .map_err(|e| QError::Internal(e.to_string()))?
            .sample(rng);
        e += h * (2.0 * plus as f64 - shots as f64) / shots as f64;
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    pub evals: usize,
    pub converged: bool,
}

/// Multi-start simplex minimization of the exact energy, angles drawn from
/// `[0, 2π)`.
pub fn vqe_optimize<R: Rng + ?Sized>(
    prob: &VqeProblem,
    cfg: &OptimizerConfig,
    rng: &mut R,
) -> Result<VqeResult> {
    let bounds = vec![(0.0, 2.0 * PI); prob.num_params()];
    let f = |x: &[f64]| vqe_energy(prob, x).unwrap_or(f64::INFINITY);
    let m = minimize_multistart(f, &bounds, None, cfg, rng)?;
    Ok(VqeResult {
        energy: m.value,
        params: m.x,
        evals: m.evals,
        converged: m.converged,
    })
}
