use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{QError, Result};

/// Derivative-free simplex minimizer settings.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Random restarts in addition to the warm start, if one is given.
    pub restarts: usize,
    /// Stop when every vertex is within this distance of the best one.
    pub tolerance: f64,
    pub max_evals: usize,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            restarts: 20,
            tolerance: 1e-8,
            max_evals: 5000,
            initial_step: 0.5,
        }
    }
}

impl OptimizerConfig {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// False when the evaluation budget ran out before the simplex shrank
    /// below tolerance.
    pub converged: bool,
}

/// One Nelder–Mead run from `x0`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], cfg: &OptimizerConfig) -> Minimum {
    let dim = x0.len();
    if dim == 0 {
        return Minimum {
            x: vec![],
            value: f(&[]),
            evals: 1,
            converged: true,
        };
    }
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += cfg.initial_step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    let mut converged = false;
    while evals.get() < cfg.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if size < cfg.tolerance {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let toward = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect()
        };
        let xr = toward(cfg.reflection);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = toward(cfg.reflection * cfg.expansion);
            let fe = eval(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        // contraction, outside if the reflection improved on the worst point
        let (xc, fc) = if fr < worst.1 {
            let x = toward(cfg.reflection * cfg.contraction);
            let v = eval(&x);
            (x, v)
        } else {
            let x = toward(-cfg.contraction);
            let v = eval(&x);
            (x, v)
        };
        if fc < worst.1.min(fr) {
            simplex[dim] = (xc, fc);
            continue;
        }
        for k in 1..=dim {
            let x: Vec<f64> = best
                .iter()
                .zip(&simplex[k].0)
                .map(|(b, v)| b + cfg.shrink * (v - b))
                .collect();
            let v = eval(&x);
            simplex[k] = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        evals: evals.get(),
        converged,
    }
}

/// Best of a warm start (if any) plus `cfg.restarts` runs from points drawn
/// uniformly in `bounds`. Restarts run in parallel, each on its own ChaCha
/// stream keyed from one draw of `rng`, so the result is deterministic.
pub fn minimize_multistart<F, R>(
    f: F,
    bounds: &[(f64, f64)],
    warm_start: Option<&[f64]>,
    cfg: &OptimizerConfig,
    rng: &mut R,
) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    if let Some(w) = warm_start {
        if w.len() != bounds.len() {
            return Err(QError::SizeMismatch {
                expected: bounds.len(),
                got: w.len(),
            });
        }
    }
    if warm_start.is_none() && cfg.restarts == 0 {
        return Err(QError::InvalidArgument("need a warm start or at least one restart".into()));
    }
    let seed: u64 = rng.random();
    let starts: Vec<Vec<f64>> = warm_start
        .map(|w| w.to_vec())
        .into_iter()
        .chain((0..cfg.restarts).map(|k| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(k as u64);
            bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * r.random::<f64>()).collect()
        }))
        .collect();
    let runs: Vec<Minimum> = starts.par_iter().map(|x0| nelder_mead(&f, x0, cfg)).collect();
    // first strict improvement wins, so ties keep the warm start
    let mut best: Option<Minimum> = None;
    let mut total = 0;
    for m in runs {
        total += m.evals;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let mut best = best.expect("at least one start");
    best.evals = total;
    Ok(best)
}
