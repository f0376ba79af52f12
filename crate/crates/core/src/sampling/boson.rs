use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::permanent::{permanent, PERMANENT_MAX};
use crate::error::{QError, Result};
use crate::statevec::sample_from_probs;

pub const UNITARITY_TOL: f64 = 1e-10;
/// Largest output space [`boson_distribution`] will enumerate.
pub const BOSON_MAX_CONFIGS: u128 = 100_000;

/// Linear-optical network `b = U a` on `M` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct Interferometer {
    u: DMatrix<C64>,
}

impl Interferometer {
    pub fn new(u: DMatrix<C64>) -> Result<Self> {
        if u.nrows() != u.ncols() || u.nrows() == 0 {
            return Err(QError::SizeMismatch {
                expected: u.nrows(),
                got: u.ncols(),
            });
        }
        let defect = (u.adjoint() * &u - DMatrix::identity(u.nrows(), u.nrows())).camax();
        if defect >= UNITARITY_TOL {
            return Err(QError::NotUnitary(defect));
        }
        Ok(Self { u })
    }

    pub fn modes(&self) -> usize {
        self.u.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.u
    }
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn random_interferometer<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Interferometer> {
    if m == 0 {
        return Err(QError::InvalidArgument("need at least one mode".into()));
    }
    let z = DMatrix::from_fn(m, m, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|v| *v *= phase);
    }
    Interferometer::new(q)
}

/// Photon numbers per mode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockConfig {
    occ: Vec<usize>,
}

impl FockConfig {
    pub fn new(occ: Vec<usize>) -> Result<Self> {
        if occ.is_empty() {
            return Err(QError::InvalidArgument("need at least one mode".into()));
        }
        Ok(Self { occ })
    }

    /// One photon in each of the first `n` of `m` modes.
    pub fn standard_input(n: usize, m: usize) -> Result<Self> {
        if n > m {
            return Err(QError::InvalidArgument(format!("{n} single photons do not fit in {m} modes")));
        }
        Self::new((0..m).map(|i| usize::from(i < n)).collect())
    }

    pub fn occupations(&self) -> &[usize] {
        &self.occ
    }

    pub fn modes(&self) -> usize {
        self.occ.len()
    }

    pub fn photons(&self) -> usize {
        self.occ.iter().sum()
    }

    /// Every configuration of `n` photons in `m` modes, lexicographic in
    /// the occupation tuple.
    pub fn enumerate(m: usize, n: usize) -> Result<Vec<FockConfig>> {
        let count = configuration_count(m, n);
        if count > BOSON_MAX_CONFIGS {
            return Err(QError::CombinatorialBlowup(count));
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut cur = vec![0; m];
        fill(&mut cur, 0, n, &mut out);
        Ok(out)
    }
}

fn fill(cur: &mut Vec<usize>, i: usize, left: usize, out: &mut Vec<FockConfig>) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(FockConfig { occ: cur.clone() });
        return;
    }
    for k in 0..=left {
        cur[i] = k;
        fill(cur, i + 1, left - k, out);
    }
}

/// `C(N + M − 1, N)`, saturating.
fn configuration_count(m: usize, n: usize) -> u128 {
    if m == 0 {
        return u128::from(n == 0);
    }
    let (top, k) = ((n + m - 1) as u128, n.min(m - 1) as u128);
    let mut c: u128 = 1;
    for i in 0..k {
        c = match c.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    c
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|v| (v as f64).ln()).sum()
}

fn check_pair(u: &Interferometer, input: &FockConfig, output: &FockConfig) -> Result<()> {
    let m = u.modes();
    for c in [input, output] {
        if c.modes() != m {
            return Err(QError::SizeMismatch {
                expected: m,
                got: c.modes(),
            });
        }
    }
    if input.occ.iter().any(|&k| k > 1) {
        return Err(QError::InvalidArgument("inputs carry at most one photon per mode".into()));
    }
    if input.photons() != output.photons() {
        return Err(QError::InvalidArgument(format!(
            "photon number changes from {} to {}",
            input.photons(),
            output.photons()
        )));
    }
    if input.photons() > PERMANENT_MAX {
        return Err(QError::CapExceeded {
            requested: input.photons(),
            cap: PERMANENT_MAX,
        });
    }
    Ok(())
}

/// `|Per(U_S)|² / Π S_i!`, with rows of `U_S` the occupied input modes and
/// output mode `i` repeated `S_i` times as a column.
pub fn boson_prob(u: &Interferometer, input: &FockConfig, output: &FockConfig) -> Result<f64> {
    check_pair(u, input, output)?;
    Ok(prob_unchecked(u, input, output))
}

fn prob_unchecked(u: &Interferometer, input: &FockConfig, output: &FockConfig) -> f64 {
    let rows: Vec<usize> = (0..u.modes()).filter(|&i| input.occ[i] == 1).collect();
    let cols: Vec<usize> = output
        .occ
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat_n(i, k))
        .collect();
    let n = rows.len();
    let sub = DMatrix::from_fn(n, n, |r, c| u.u[(rows[r], cols[c])]);
    let per = permanent(&sub).expect("size checked");
    if n > 10 {
        // log space keeps large factorial denominators tame
        let ln_den: f64 = output.occ.iter().map(|&k| ln_factorial(k)).sum();
        if per.norm() == 0.0 {
            return 0.0;
        }
        (2.0 * per.norm().ln() - ln_den).exp()
    } else {
        let den: f64 = output.occ.iter().map(|&k| ln_factorial(k).exp()).product();
        per.norm_sqr() / den
    }
}

/// Probability of every output configuration, in enumeration order.
pub fn boson_distribution(u: &Interferometer, input: &FockConfig) -> Result<Vec<(FockConfig, f64)>> {
    let outs = FockConfig::enumerate(u.modes(), input.photons())?;
    if let Some(first) = outs.first() {
        check_pair(u, input, first)?;
    }
    Ok(outs
        .into_par_iter()
        .map(|o| {
            let p = prob_unchecked(u, input, &o);
            (o, p)
        })
        .collect())
}

/// Exact-distribution sampling of output configurations.
pub fn boson_sample<R: Rng + ?Sized>(
    u: &Interferometer,
    input: &FockConfig,
    shots: usize,
    rng: &mut R,
) -> Result<(Vec<FockConfig>, Vec<(FockConfig, f64)>)> {
    let dist = boson_distribution(u, input)?;
    let probs: Vec<f64> = dist.iter().map(|(_, p)| *p).collect();
    let samples = sample_from_probs(&probs, shots, rng)
        .into_iter()
        .map(|k| dist[k].0.clone())
        .collect();
    Ok((samples, dist))
}
