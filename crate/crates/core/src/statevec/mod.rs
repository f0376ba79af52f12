//! Dense statevector engine.
//!
//! Qubit 0 is the leftmost ket factor and the most significant bit of the
//! basis index, so `|j1 j2 ... jn>` lives at `j1·2^(n-1) + ... + jn`.

mod circuit;
mod gate;

pub use circuit::{Circuit, Op};
pub use gate::{controlled, controlled_matrix, kron, unitarity_defect, GateSpec, MAX_GATE_ARITY};
pub(crate) use gate::c;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;

use crate::clifford::PauliString;
use crate::error::{QError, Result};

/// Default ceiling on register width (2^26 amplitudes is 1 GiB).
pub const DEFAULT_QUBIT_CAP: usize = 26;

/// Tolerance used when validating user-supplied normalization.
pub const NORM_TOL: f64 = 1e-9;

/// Two states are treated as equal when their fidelity is at least this.
pub const FIDELITY_TOL: f64 = 1e-9;

// Below this many amplitudes the rayon split costs more than it saves.
const PAR_THRESHOLD: usize = 1 << 14;

/// A normalized n-qubit pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    n: usize,
    cap: usize,
    amps: Vec<C64>,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(QError::InvalidArgument("a register needs at least one qubit".into()));
    }
    if n > cap {
        return Err(QError::CapExceeded { requested: n, cap });
    }
    Ok(())
}

/// Bit position of qubit `q` inside a basis index.
#[inline]
pub(crate) fn bit_of(n: usize, q: usize) -> usize {
    n - 1 - q
}

/// Render basis index `z` as a bitstring with qubit 0 first.
pub fn bitstring(z: usize, n: usize) -> String {
    (0..n)
        .map(|q| if (z >> bit_of(n, q)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parse a bitstring with qubit 0 first into a basis index.
pub fn parse_bitstring(s: &str) -> Result<usize> {
    let mut z = 0usize;
    for ch in s.chars() {
        z <<= 1;
        match ch {
            '0' => {}
            '1' => z |= 1,
            _ => return Err(QError::InvalidArgument(format!("bad bitstring `{s}`"))),
        }
    }
    Ok(z)
}

impl QState {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with_cap(n, DEFAULT_QUBIT_CAP)
    }

    pub fn zero_with_cap(n: usize, cap: usize) -> Result<Self> {
        Self::basis_with_cap(n, 0, cap)
    }

    /// Computational basis state with the given index.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Self::basis_with_cap(n, index, DEFAULT_QUBIT_CAP)
    }

    pub fn basis_with_cap(n: usize, index: usize, cap: usize) -> Result<Self> {
        check_cap(n, cap)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(QError::InvalidArgument(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, cap, amps })
    }

    /// `|+>^n`.
    pub fn plus(n: usize) -> Result<Self> {
        check_cap(n, DEFAULT_QUBIT_CAP)?;
        let dim = 1usize << n;
        let a = C64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            n,
            cap: DEFAULT_QUBIT_CAP,
            amps: vec![a; dim],
        })
    }

    /// Wrap an amplitude vector, rejecting anything not normalized to 1e-9.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(QError::InvalidArgument(format!(
                "amplitude vector length {dim} is not a power of two ≥ 2"
            )));
        }
        let n = dim.trailing_zeros() as usize;
        check_cap(n, DEFAULT_QUBIT_CAP.max(n))?;
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(QError::NotNormalized(norm2));
        }
        Ok(Self {
            n,
            cap: DEFAULT_QUBIT_CAP.max(n),
            amps,
        })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn from_unnormalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= f64::MIN_POSITIVE {
            return Err(QError::NotNormalized(norm2));
        }
        let s = norm2.sqrt().recip();
        amps.iter_mut().for_each(|a| *a *= s);
        Self::from_amplitudes(amps)
    }

    /// Single qubit `alpha|0> + beta|1>`.
    pub fn qubit(alpha: C64, beta: C64) -> Result<Self> {
        Self::from_amplitudes(vec![alpha, beta])
    }

    /// Haar-random state drawn from a complex Gaussian vector.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_cap(n, DEFAULT_QUBIT_CAP)?;
        let normal = rand_distr::StandardNormal;
        let amps = (0..1usize << n)
            .map(|_| {
                let re: f64 = rng.sample(normal);
                let im: f64 = rng.sample(normal);
                C64::new(re, im)
            })
            .collect();
        Self::from_unnormalized(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Raise or lower the width ceiling carried by this state.
    pub fn set_cap(&mut self, cap: usize) -> Result<()> {
        check_cap(self.n, cap)?;
        self.cap = cap;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n {
                return Err(QError::TargetOutOfRange {
                    index: t,
                    num_qubits: self.n,
                });
            }
            if targets[..i].contains(&t) {
                return Err(QError::DuplicateTarget(t));
            }
        }
        Ok(())
    }

    /// Apply a built-in or custom gate; the first target is the matrix MSB.
    pub fn apply_gate(&mut self, gate: &GateSpec, targets: &[usize]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(QError::ArityMismatch {
                gate: gate.name().to_string(),
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        self.apply_matrix(gate.matrix(), targets)
    }

    /// Shorthand for `apply_gate(GateSpec::named(name, params), targets)`.
    pub fn apply_named(&mut self, name: &str, targets: &[usize], params: &[f64]) -> Result<()> {
        self.apply_gate(&GateSpec::named(name, params)?, targets)
    }

    /// Apply a dense unitary of any width to the listed targets.
    ///
    /// Unitarity is the caller's responsibility here; `GateSpec` checks it.
    pub fn apply_matrix(&mut self, m: &DMatrix<C64>, targets: &[usize]) -> Result<()> {
        self.apply_controlled(&[], m, targets)
    }

    /// Apply `m` on `targets` only where every control qubit reads 1.
    pub fn apply_controlled(
        &mut self,
        controls: &[usize],
        m: &DMatrix<C64>,
        targets: &[usize],
    ) -> Result<()> {
        let all: Vec<usize> = controls.iter().chain(targets).copied().collect();
        self.check_targets(&all)?;
        let dim = 1usize << targets.len();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(QError::ArityMismatch {
                gate: format!("{}x{} matrix", m.nrows(), m.ncols()),
                expected: m.nrows().trailing_zeros() as usize,
                got: targets.len(),
            });
        }
        if targets.is_empty() {
            // A 1x1 matrix under controls is a controlled global phase.
            let phase = m[(0, 0)];
            let cmask = self.mask_of(controls);
            self.amps
                .iter_mut()
                .enumerate()
                .filter(|(z, _)| z & cmask == cmask)
                .for_each(|(_, a)| *a *= phase);
            return Ok(());
        }
        apply_dense(&mut self.amps, self.n, m, controls, targets);
        Ok(())
    }

    fn mask_of(&self, qubits: &[usize]) -> usize {
        qubits.iter().fold(0, |m, &q| m | (1 << bit_of(self.n, q)))
    }

    /// Multiply each amplitude by `phase(z)`; the caller keeps |phase| = 1.
    pub fn apply_diagonal<F>(&mut self, phase: F)
    where
        F: Fn(usize) -> C64 + Sync,
    {
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps
                .par_iter_mut()
                .enumerate()
                .for_each(|(z, a)| *a *= phase(z));
        } else {
            self.amps
                .iter_mut()
                .enumerate()
                .for_each(|(z, a)| *a *= phase(z));
        }
    }

    /// Elementwise update for norm-preserving maps such as Grover diffusion.
    pub(crate) fn map_amplitudes<F: Fn(C64) -> C64>(&mut self, f: F) {
        self.amps.iter_mut().for_each(|a| *a = f(*a));
    }

    /// Move amplitude `z` to `perm(z)`; `perm` must be a bijection on indices.
    pub fn apply_permutation<F>(&mut self, perm: F) -> Result<()>
    where
        F: Fn(usize) -> usize,
    {
        let dim = self.amps.len();
        let mut out = vec![C64::new(0.0, 0.0); dim];
        let mut seen = vec![false; dim];
        for (z, &a) in self.amps.iter().enumerate() {
            let w = perm(z);
            if w >= dim || seen[w] {
                return Err(QError::InvalidArgument(format!(
                    "index map is not a permutation (collision at {w})"
                )));
            }
            seen[w] = true;
            out[w] = a;
        }
        self.amps = out;
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() != self.n {
            return Err(QError::SizeMismatch {
                expected: self.n,
                got: circuit.num_qubits(),
            });
        }
        for op in circuit.ops() {
            self.apply_gate(&op.gate, &op.targets)?;
        }
        Ok(())
    }

    /// Apply a Pauli string including its phase.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.amps = apply_pauli_vec(self.n, p, &self.amps)?;
        Ok(())
    }

    fn pauli_masks(&self, p: &PauliString) -> Result<(usize, usize, C64)> {
        pauli_masks(self.n, p)
    }

    /// `<psi|P|psi>` as a complex number (phases included).
    pub fn pauli_overlap(&self, p: &PauliString) -> Result<C64> {
        let (xmask, zmask, coef) = self.pauli_masks(p)?;
        let term = |(z, a): (usize, &C64)| {
            let sign = if (z & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            self.amps[z ^ xmask].conj() * a * sign
        };
        let sum: C64 = if self.amps.len() >= PAR_THRESHOLD {
            // Fixed-size chunks keep the reduction order independent of threads.
            self.amps
                .par_chunks(PAR_THRESHOLD)
                .enumerate()
                .map(|(ci, chunk)| {
                    chunk
                        .iter()
                        .enumerate()
                        .map(|(j, a)| term((ci * PAR_THRESHOLD + j, a)))
                        .sum::<C64>()
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum()
        } else {
            self.amps.iter().enumerate().map(term).sum()
        };
        Ok(sum * coef)
    }

    /// Real expectation value of a Hermitian Pauli string.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<f64> {
        let v = self.pauli_overlap(p)?;
        if v.im.abs() > 1e-10 {
            return Err(QError::InvalidArgument(format!(
                "Pauli string {p} is not Hermitian (imaginary residue {:e})",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// Project onto the `±1` eigenspace of a Hermitian Pauli `G` with
    /// `(I ± G)/2`; `forced` picks the branch, otherwise it is sampled.
    ///
    /// Returns the eigenvalue and its Born probability.
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        g: &PauliString,
        forced: Option<i8>,
        rng: &mut R,
    ) -> Result<(i8, f64)> {
        let ev = self.expectation_pauli(g)?;
        let p_plus = ((1.0 + ev) / 2.0).clamp(0.0, 1.0);
        let outcome = match forced {
            Some(1) => 1,
            Some(-1) => -1,
            Some(v) => {
                return Err(QError::InvalidArgument(format!("eigenvalue must be ±1, got {v}")))
            }
            None if rng.random::<f64>() < p_plus => 1,
            None => -1,
        };
        let p = if outcome == 1 { p_plus } else { 1.0 - p_plus };
        if p < 1e-14 {
            return Err(QError::InvalidArgument(format!(
                "eigenvalue {outcome} of {g} has zero probability"
            )));
        }
        let gv = apply_pauli_vec(self.n, g, &self.amps)?;
        let s = f64::from(outcome) / (2.0 * p.sqrt());
        let k = 1.0 / (2.0 * p.sqrt());
        for (a, b) in self.amps.iter_mut().zip(gv) {
            *a = *a * k + b * s;
        }
        Ok((outcome, p))
    }

    /// Probability that qubit `q` reads 1.
    pub fn prob_one(&self, q: usize) -> Result<f64> {
        self.check_targets(&[q])?;
        let bit = 1 << bit_of(self.n, q);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(z, _)| z & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Project qubit `q` onto `outcome` and renormalize; returns the branch probability.
    pub fn project(&mut self, q: usize, outcome: u8) -> Result<f64> {
        let p1 = self.prob_one(q)?;
        let p = if outcome == 1 { p1 } else { 1.0 - p1 };
        if p < 1e-14 {
            return Err(QError::InvalidArgument(format!(
                "outcome {outcome} on qubit {q} has zero probability"
            )));
        }
        let bit = 1 << bit_of(self.n, q);
        let keep = if outcome == 1 { bit } else { 0 };
        let s = p.sqrt().recip();
        for (z, a) in self.amps.iter_mut().enumerate() {
            if z & bit == keep {
                *a *= s;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        Ok(p)
    }

    /// Computational-basis measurement of one qubit.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        let p1 = self.prob_one(q)?;
        let outcome = u8::from(rng.random::<f64>() < p1);
        self.project(q, outcome).map_err(|_| {
            QError::Internal(format!("sampled a zero-probability branch on qubit {q}"))
        })?;
        Ok(outcome)
    }

    /// Measure qubit `q`, or take the `forced` branch when one is given.
    ///
    /// Returns the outcome and its Born probability.
    pub fn measure_or_force<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        forced: Option<u8>,
        rng: &mut R,
    ) -> Result<(u8, f64)> {
        match forced {
            Some(b) => Ok((b, self.project(q, b)?)),
            None => {
                let p1 = self.prob_one(q)?;
                let b = self.measure_qubit(q, rng)?;
                Ok((b, if b == 1 { p1 } else { 1.0 - p1 }))
            }
        }
    }

    /// Condition qubit `q` on `outcome` and drop it from the register.
    pub fn project_remove(&self, q: usize, outcome: u8) -> Result<(f64, QState)> {
        self.check_targets(&[q])?;
        if self.n == 1 {
            return Err(QError::InvalidArgument("cannot remove the last qubit".into()));
        }
        let pos = bit_of(self.n, q);
        let low = (1usize << pos) - 1;
        let mut out = Vec::with_capacity(self.amps.len() / 2);
        for r in 0..self.amps.len() / 2 {
            let z = ((r & !low) << 1) | ((outcome as usize) << pos) | (r & low);
            out.push(self.amps[z]);
        }
        let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        if p < 1e-14 {
            return Err(QError::InvalidArgument(format!(
                "outcome {outcome} on qubit {q} has zero probability"
            )));
        }
        let s = p.sqrt().recip();
        out.iter_mut().for_each(|a| *a *= s);
        Ok((
            p,
            QState {
                n: self.n - 1,
                cap: self.cap,
                amps: out,
            },
        ))
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &QState) -> Result<QState> {
        let n = self.n + other.n;
        let cap = self.cap.max(other.cap);
        check_cap(n, cap)?;
        let mut amps = Vec::with_capacity(1usize << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(QState { n, cap, amps })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QState) -> Result<C64> {
        if self.n != other.n {
            return Err(QError::SizeMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &QState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Draw basis indices from the Born distribution.
    pub fn sample_indices<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Vec<usize> {
        sample_from_probs(&self.probabilities(), shots, rng)
    }

    /// Histogram of `shots` measurements of every qubit, keyed by bitstring.
    pub fn sample_counts<R: Rng + ?Sized>(
        &self,
        shots: usize,
        rng: &mut R,
    ) -> Result<BTreeMap<String, usize>> {
        if shots == 0 {
            return Err(QError::InvalidArgument("shots must be at least 1".into()));
        }
        let mut counts = BTreeMap::new();
        for z in self.sample_indices(shots, rng) {
            *counts.entry(bitstring(z, self.n)).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

// Index-space masks plus the scalar i^phase · i^(#Y) so that
// P|z> = coef · (-1)^{|z & zmask|} |z ^ xmask>.
fn pauli_masks(n: usize, p: &PauliString) -> Result<(usize, usize, C64)> {
    if p.num_qubits() != n {
        return Err(QError::SizeMismatch {
            expected: n,
            got: p.num_qubits(),
        });
    }
    let (mut xmask, mut zmask, mut ys) = (0usize, 0usize, 0u32);
    for q in 0..n {
        let (x, z) = (p.x(q), p.z(q));
        if x {
            xmask |= 1 << bit_of(n, q);
        }
        if z {
            zmask |= 1 << bit_of(n, q);
        }
        if x && z {
            ys += 1;
        }
    }
    let k = (p.phase() as u32 + ys) % 4;
    let coef = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][k as usize];
    Ok((xmask, zmask, coef))
}

/// `P·v` on a raw amplitude vector of length `2^n`.
pub(crate) fn apply_pauli_vec(n: usize, p: &PauliString, v: &[C64]) -> Result<Vec<C64>> {
    let (xmask, zmask, coef) = pauli_masks(n, p)?;
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for (z, a) in v.iter().enumerate() {
        let sign = if (z & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[z ^ xmask] = a * coef * sign;
    }
    Ok(out)
}

/// Inverse-CDF sampling from a (possibly slightly unnormalized) distribution.
pub fn sample_from_probs<R: Rng + ?Sized>(probs: &[f64], shots: usize, rng: &mut R) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    (0..shots)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            cdf.partition_point(|&c| c <= u).min(last_nonzero)
        })
        .collect()
}

fn apply_dense(amps: &mut [C64], n: usize, m: &DMatrix<C64>, controls: &[usize], targets: &[usize]) {
    let k = targets.len();
    let dim = 1usize << k;
    let pos: Vec<usize> = targets.iter().map(|&t| bit_of(n, t)).collect();
    let offsets: Vec<usize> = (0..dim)
        .map(|j| {
            (0..k)
                .filter(|&i| (j >> (k - 1 - i)) & 1 == 1)
                .fold(0, |o, i| o | (1 << pos[i]))
        })
        .collect();
    let tmask = offsets[dim - 1];
    let cmask = controls.iter().fold(0, |acc, &q| acc | (1 << bit_of(n, q)));
    let top = pos
        .iter()
        .chain(controls.iter().map(|&q| bit_of(n, q)).collect::<Vec<_>>().iter())
        .copied()
        .max()
        .unwrap_or(0);
    let chunk = 1usize << (top + 1);
    // Row-major copy so the inner loop walks contiguous memory.
    let rows: Vec<C64> = (0..dim)
        .flat_map(|r| (0..dim).map(move |col| (r, col)))
        .map(|(r, col)| m[(r, col)])
        .collect();

    let work = |block: &mut [C64]| {
        let mut buf = vec![C64::new(0.0, 0.0); dim];
        for base in 0..block.len() {
            if base & tmask != 0 || base & cmask != cmask {
                continue;
            }
            for (j, off) in offsets.iter().enumerate() {
                buf[j] = block[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let row = &rows[r * dim..(r + 1) * dim];
                block[base | off] = row.iter().zip(&buf).map(|(u, a)| u * a).sum();
            }
        }
    };
    // Amplitudes inside one chunk never mix with another chunk's.
    if amps.len() >= PAR_THRESHOLD && amps.len() / chunk >= 2 {
        amps.par_chunks_mut(chunk).for_each(work);
    } else {
        amps.chunks_mut(chunk).for_each(work);
    }
}

#[cfg(test)]
mod tests;
