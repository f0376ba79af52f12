use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::ising::IsingProblem;
use super::qaoa::QaoaParams;
use crate::error::{QError, Result};
use crate::statevec::{QState, DEFAULT_QUBIT_CAP};

pub type ScheduleFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `H(s) = A(s)·H0 + B(s)·H_C` with `H0 = −Σ X`, run for total time `tau`
/// in `steps` Trotter steps.
#[derive(Clone)]
pub struct AnnealSchedule {
    pub a: ScheduleFn,
    pub b: ScheduleFn,
    pub tau: f64,
    pub steps: usize,
}

impl AnnealSchedule {
    pub fn new(a: ScheduleFn, b: ScheduleFn, tau: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(QError::InvalidArgument("need at least one Trotter step".into()));
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(QError::InvalidArgument(format!("total time must be ≥ 0, got {tau}")));
        }
        Ok(Self { a, b, tau, steps })
    }

    /// `A = 1 − s`, `B = s`.
    pub fn linear(tau: f64, steps: usize) -> Result<Self> {
        Self::new(Arc::new(|s| 1.0 - s), Arc::new(|s| s), tau, steps)
    }

    /// Trotter step `Δt = τ / steps`.
    pub fn step(&self) -> f64 {
        self.tau / self.steps as f64
    }

    /// Midpoints `s_n = (n − ½)/N`.
    pub fn midpoints(&self) -> Vec<f64> {
        midpoints(self.steps)
    }

    /// Equivalent QAOA angles for this schedule's step size.
    pub fn to_qaoa(&self) -> QaoaParams {
        qa_to_qaoa_angles(&*self.a, &*self.b, self.steps, self.step())
    }
}

impl fmt::Debug for AnnealSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnnealSchedule")
            .field("tau", &self.tau)
            .field("steps", &self.steps)
            .finish_non_exhaustive()
    }
}

fn midpoints(n: usize) -> Vec<f64> {
    (1..=n).map(|k| (k as f64 - 0.5) / n as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealResult {
    pub state: QState,
    /// Born probability of reading any optimal assignment.
    pub success_probability: f64,
}

/// Symmetric Trotter evolution from `|+>^n`:
/// `Π_n e^{+iΔA(s_n)ΣX/2} e^{-iΔB(s_n)H_C} e^{+iΔA(s_n)ΣX/2}`.
///
/// `H_C` is the sense-adjusted cost (negated for maximize problems) so the
/// anneal always heads for the optimum.
pub fn anneal_evolve(p: &IsingProblem, sched: &AnnealSchedule) -> Result<AnnealResult> {
    let n = p.num_spins();
    if n > DEFAULT_QUBIT_CAP {
        return Err(QError::CapExceeded {
            requested: n,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    let diag = p.cost_diagonal();
    let sign = p.sense().sign();
    let dt = sched.step();
    let mut s = QState::plus(n)?;
    for sn in sched.midpoints() {
        let (a, b) = ((sched.a)(sn), (sched.b)(sn));
        // e^{+iθX/2} = R_x(−θ)
        for q in 0..n {
            s.apply_named("RX", &[q], &[-dt * a])?;
        }
        s.apply_diagonal(|z| C64::from_polar(1.0, -dt * b * sign * diag[z]));
        for q in 0..n {
            s.apply_named("RX", &[q], &[-dt * a])?;
        }
    }
    let (_, optimizers) = p.optimizers_of(&diag);
    let success_probability = optimizers.iter().map(|&z| s.amplitude(z).norm_sqr()).sum();
    Ok(AnnealResult {
        state: s,
        success_probability,
    })
}

/// QAOA angles reproducing `n_steps` symmetric Trotter steps of size `tau`:
/// `γ_n = τB(s_n)`, `β_n = −τ(A(s_{n+1}) + A(s_n))/2`, `β_N = −τA(s_N)/2`.
///
/// The first half-step `e^{+iτA(s_1)ΣX/2}` only adds a global phase to
/// `|+>^n` and is dropped.
pub fn qa_to_qaoa_angles(
    a: &dyn Fn(f64) -> f64,
    b: &dyn Fn(f64) -> f64,
    n_steps: usize,
    tau: f64,
) -> QaoaParams {
    let s = midpoints(n_steps);
    let gammas = s.iter().map(|&x| tau * b(x)).collect();
    let betas = (0..n_steps)
        .map(|k| {
            if k + 1 < n_steps {
                -tau * (a(s[k + 1]) + a(s[k])) / 2.0
            } else {
                -tau * a(s[k]) / 2.0
            }
        })
        .collect();
    QaoaParams { gammas, betas }
}
