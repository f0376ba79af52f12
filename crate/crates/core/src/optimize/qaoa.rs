use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;

use super::ising::IsingProblem;
use super::nelder_mead::{minimize_multistart, OptimizerConfig};
use crate::error::{QError, Result};
use crate::statevec::{bitstring, sample_from_probs, Circuit, QState, DEFAULT_QUBIT_CAP};

/// Cost and mixer angles, `γ_k` paired with `β_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(QError::SizeMismatch {
                expected: gammas.len(),
                got: betas.len(),
            });
        }
        if gammas.iter().chain(&betas).any(|v| !v.is_finite()) {
            return Err(QError::InvalidArgument("QAOA angles must be finite".into()));
        }
        Ok(Self { gammas, betas })
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    /// Flatten as `[γ_1..γ_p, β_1..β_p]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() % 2 != 0 {
            return Err(QError::InvalidArgument("QAOA parameter vector must have even length".into()));
        }
        let p = x.len() / 2;
        Self::new(x[..p].to_vec(), x[p..].to_vec())
    }

    /// Append a `γ = β = 0` layer, which acts as the identity.
    pub fn zero_padded(&self) -> Self {
        let mut out = self.clone();
        out.gammas.push(0.0);
        out.betas.push(0.0);
        out
    }

    /// Wrap `β` into `[0, π)` (always a symmetry up to global phase) and
    /// `γ` into `[0, 2π)` when every cost value is an integer.
    pub fn canonical(&self, integer_costs: bool) -> Self {
        let wrap = |v: f64, period: f64| v.rem_euclid(period);
        Self {
            gammas: self
                .gammas
                .iter()
                .map(|&g| if integer_costs { wrap(g, 2.0 * PI) } else { g })
                .collect(),
            betas: self.betas.iter().map(|&b| wrap(b, PI)).collect(),
        }
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > DEFAULT_QUBIT_CAP {
        return Err(QError::CapExceeded {
            requested: n,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    Ok(())
}

/// `Π_k e^{-iβ_k Σ X} e^{-iγ_k H_C} |+>^n` for a precomputed diagonal of `H_C`.
pub(crate) fn qaoa_state_from_diag(n: usize, diag: &[f64], params: &QaoaParams) -> Result<QState> {
    let mut s = QState::plus(n)?;
    for (&g, &b) in params.gammas.iter().zip(&params.betas) {
        s.apply_diagonal(|z| C64::from_polar(1.0, -g * diag[z]));
        for q in 0..n {
            s.apply_named("RX", &[q], &[2.0 * b])?;
        }
    }
    Ok(s)
}

pub fn qaoa_state(p: &IsingProblem, params: &QaoaParams) -> Result<QState> {
    check_cap(p.num_spins())?;
    qaoa_state_from_diag(p.num_spins(), &p.cost_diagonal(), params)
}

fn expectation_from_diag(state: &QState, diag: &[f64]) -> f64 {
    state
        .amplitudes()
        .iter()
        .zip(diag)
        .map(|(a, c)| a.norm_sqr() * c)
        .sum()
}

/// `Σ_z Prob_z C(z)` from the exact amplitudes.
pub fn qaoa_expectation(p: &IsingProblem, params: &QaoaParams) -> Result<f64> {
    check_cap(p.num_spins())?;
    let diag = p.cost_diagonal();
    let s = qaoa_state_from_diag(p.num_spins(), &diag, params)?;
    Ok(expectation_from_diag(&s, &diag))
}

/// Shot estimate of the cost expectation: mean and standard error.
pub fn qaoa_expectation_sampled<R: Rng + ?Sized>(
    p: &IsingProblem,
    params: &QaoaParams,
    shots: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if shots < 2 {
        return Err(QError::InvalidArgument("need at least two shots".into()));
    }
    let s = qaoa_state(p, params)?;
    let samples: Vec<f64> = s
        .sample_indices(shots, rng)
        .into_iter()
        .map(|z| p.energy_of_index(z))
        .collect();
    let mean = samples.iter().sum::<f64>() / shots as f64;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (shots - 1) as f64;
    Ok((mean, (var / shots as f64).sqrt()))
}

/// Gate-level QAOA over `{H, RX, RZ, CZ}`.
///
/// `e^{-iγJ Z_aZ_b}` is CNOT·RZ_b(2γJ)·CNOT with each CNOT written as
/// `H_b CZ H_b`; fields are `RZ(2γh)`; the offset is a global phase and
/// is dropped.
pub fn compile_qaoa_circuit(p: &IsingProblem, params: &QaoaParams) -> Result<Circuit> {
    let n = p.num_spins();
    check_cap(n)?;
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push("H", &[q], &[])?;
    }
    let pairs = p.pairs();
    for (&g, &b) in params.gammas.iter().zip(&params.betas) {
        for &(a, t, j) in &pairs {
            c.push("H", &[t], &[])?;
            c.push("CZ", &[a, t], &[])?;
            c.push("H", &[t], &[])?;
            c.push("RZ", &[t], &[2.0 * g * j])?;
            c.push("H", &[t], &[])?;
            c.push("CZ", &[a, t], &[])?;
            c.push("H", &[t], &[])?;
        }
        for (q, &h) in p.fields().iter().enumerate() {
            if h != 0.0 {
                c.push("RZ", &[q], &[2.0 * g * h])?;
            }
        }
        for q in 0..n {
            c.push("RX", &[q], &[2.0 * b])?;
        }
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QaoaOptions {
    pub optimizer: OptimizerConfig,
    /// Readouts drawn from the optimized state to pick the best bitstring.
    pub shots: usize,
    pub warm_start: Option<QaoaParams>,
}

impl Default for QaoaOptions {
    fn default() -> Self {
        Self {
            optimizer: OptimizerConfig::default(),
            shots: 1024,
            warm_start: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QaoaReport {
    pub params: QaoaParams,
    /// `<γ,β|H_C|γ,β>` in the problem's own units and sign.
    pub expectation: f64,
    pub best_bitstring: String,
    pub best_cost: f64,
    /// Brute-force optimum of the cost.
    pub optimum: f64,
    /// `C(z_best) / C_opt`; `None` when the optimum is 0.
    pub approximation_ratio: Option<f64>,
    /// Born probability of reading any optimal bitstring.
    pub success_probability: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Multi-start simplex minimization of the sense-adjusted expectation.
pub fn qaoa_optimize<R: Rng + ?Sized>(
    p: &IsingProblem,
    depth: usize,
    opts: &QaoaOptions,
    rng: &mut R,
) -> Result<QaoaReport> {
    if depth == 0 {
        return Err(QError::InvalidArgument("QAOA depth must be at least 1".into()));
    }
    if opts.shots == 0 {
        return Err(QError::InvalidArgument("shots must be at least 1".into()));
    }
    let n = p.num_spins();
    check_cap(n)?;
    let diag = p.cost_diagonal();
    let sign = p.sense().sign();
    let warm = match &opts.warm_start {
        Some(w) if w.depth() != depth => {
            return Err(QError::SizeMismatch {
                expected: depth,
                got: w.depth(),
            })
        }
        Some(w) => Some(w.to_vec()),
        None => None,
    };
    let objective = |x: &[f64]| -> f64 {
        let params = QaoaParams {
            gammas: x[..depth].to_vec(),
            betas: x[depth..].to_vec(),
        };
        match qaoa_state_from_diag(n, &diag, &params) {
            Ok(s) => sign * expectation_from_diag(&s, &diag),
            Err(_) => f64::INFINITY,
        }
    };
    let mut bounds = vec![(0.0, 2.0 * PI); depth];
    bounds.extend(vec![(0.0, PI); depth]);
    let best = minimize_multistart(objective, &bounds, warm.as_deref(), &opts.optimizer, rng)?;
    let integer_costs = diag.iter().all(|c| (c - c.round()).abs() < 1e-12);
    let params = QaoaParams::from_slice(&best.x)?.canonical(integer_costs);
    let state = qaoa_state_from_diag(n, &diag, &params)?;
    let probs = state.probabilities();
    let (optimum, optimizers) = p.optimizers_of(&diag);
    let success_probability = optimizers.iter().map(|&z| probs[z]).sum();
    let mut best_z = None::<usize>;
    for z in sample_from_probs(&probs, opts.shots, rng) {
        if best_z.is_none_or(|b| p.sense().better(diag[z], diag[b]) || (diag[z] == diag[b] && z < b)) {
            best_z = Some(z);
        }
    }
    let best_z = best_z.expect("at least one shot");
    let best_cost = diag[best_z];
    Ok(QaoaReport {
        expectation: expectation_from_diag(&state, &diag),
        params,
        best_bitstring: bitstring(best_z, n),
        best_cost,
        optimum,
        approximation_ratio: (optimum.abs() > 1e-12).then(|| best_cost / optimum),
        success_probability,
        evals: best.evals,
        converged: best.converged,
    })
}
