use rand::Rng;

use super::{conjugate_in_place, CliffordOp, PauliString};
use crate::error::{QError, Result};
use crate::statevec::{apply_pauli_vec, QState};

/// Largest register `to_statevector` will expand.
pub const TABLEAU_DENSE_LIMIT: usize = 12;

/// Stabilizer tableau with destabilizers (rows `0..n`) and stabilizers (rows `n..2n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliString>,
}

/// Result of a computational-basis measurement on a tableau.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableauOutcome {
    pub bit: u8,
    pub deterministic: bool,
}

impl Tableau {
    /// `|0...0>`: stabilizers `Z_i`, destabilizers `X_i`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(QError::InvalidArgument("tableau needs at least one qubit".into()));
        }
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(PauliString::single(n, q, super::Pauli::X)?);
        }
        for q in 0..n {
            rows.push(PauliString::single(n, q, super::Pauli::Z)?);
        }
        Ok(Self { n, rows })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.rows[self.n..]
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.rows[..self.n]
    }

    /// Conjugate every row by `op`.
    pub fn apply(&mut self, op: &CliffordOp) -> Result<()> {
        op.check_range(self.n)?;
        for row in &mut self.rows {
            conjugate_in_place(op, row);
        }
        Ok(())
    }

    pub fn apply_all(&mut self, ops: &[CliffordOp]) -> Result<()> {
        ops.iter().try_for_each(|op| self.apply(op))
    }

    /// Measure `Z_q`.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<TableauOutcome> {
        self.measure_or_force(q, None, rng)
    }

    /// Measure `Z_q`, taking `forced` as the outcome when it is random.
    ///
    /// Forcing a deterministic measurement to the wrong value is an error.
    pub fn measure_or_force<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        forced: Option<u8>,
        rng: &mut R,
    ) -> Result<TableauOutcome> {
        if q >= self.n {
            return Err(QError::TargetOutOfRange {
                index: q,
                num_qubits: self.n,
            });
        }
        let n = self.n;
        // Lowest anticommuting stabilizer is the pivot.
        if let Some(p) = (n..2 * n).find(|&i| self.rows[i].x(q)) {
            let pivot = self.rows[p].clone();
            for i in 0..2 * n {
                if i != p && self.rows[i].x(q) {
                    self.rows[i].mul_assign_right(&pivot);
                }
            }
            let bit = match forced {
                Some(b) => b & 1,
                None => u8::from(rng.random::<bool>()),
            };
            self.rows[p - n] = pivot;
            let mut zq = PauliString::single(n, q, super::Pauli::Z)?;
            if bit == 1 {
                zq.flip_sign();
            }
            self.rows[p] = zq;
            return Ok(TableauOutcome {
                bit,
                deterministic: false,
            });
        }
        let mut scratch = PauliString::identity(n);
        for i in 0..n {
            if self.rows[i].x(q) {
                scratch.mul_assign_right(&self.rows[n + i]);
            }
        }
        let bit = match scratch.phase() {
            0 => 0,
            2 => 1,
            k => return Err(QError::Internal(format!("measurement scratch has phase i^{k}"))),
        };
        if let Some(b) = forced {
            if b & 1 != bit {
                return Err(QError::InvalidArgument(format!(
                    "qubit {q} is deterministically {bit}, cannot force {b}"
                )));
            }
        }
        Ok(TableauOutcome {
            bit,
            deterministic: true,
        })
    }

    /// Commutation structure and full symplectic rank.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let s_s = self.rows[n + i].commutes_unchecked(&self.rows[n + j]);
                let d_s = self.rows[i].commutes_unchecked(&self.rows[n + j]);
                if !s_s {
                    return Err(QError::Internal(format!("stabilizers {i} and {j} anticommute")));
                }
                if d_s == (i == j) {
                    return Err(QError::Internal(format!(
                        "destabilizer {i} vs stabilizer {j} has wrong commutation"
                    )));
                }
            }
            if !self.rows[n + i].is_hermitian() {
                return Err(QError::Internal(format!("stabilizer {i} is not Hermitian")));
            }
        }
        if binary_rank(&self.rows, n) != 2 * n {
            return Err(QError::Internal("tableau rows are dependent".into()));
        }
        Ok(())
    }

    /// Dense state stabilized by every stabilizer row (up to global phase).
    pub fn to_statevector(&self) -> Result<QState> {
        if self.n > TABLEAU_DENSE_LIMIT {
            return Err(QError::CapExceeded {
                requested: self.n,
                cap: TABLEAU_DENSE_LIMIT,
            });
        }
        let dim = 1usize << self.n;
        // A stabilizer state has |<z|psi>|² ∈ {0, 2^-k}, so the first basis
        // vector with a nonzero projection has norm² ≥ 2^-n.
        for z in 0..dim {
            let mut v = QState::basis(self.n, z)?.into_amplitudes();
            for g in self.stabilizers() {
                let gv = apply_pauli_vec(self.n, g, &v)?;
                for (a, b) in v.iter_mut().zip(gv) {
                    *a = (*a + b) * 0.5;
                }
            }
            let norm2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            if norm2 * dim as f64 > 0.5 {
                return QState::from_unnormalized(v);
            }
        }
        Err(QError::Internal("stabilizer projector annihilated every basis state".into()))
    }
}

fn binary_rank(rows: &[PauliString], n: usize) -> usize {
    let mut m: Vec<Vec<bool>> = rows
        .iter()
        .map(|r| (0..n).map(|q| r.x(q)).chain((0..n).map(|q| r.z(q))).collect())
        .collect();
    let cols = 2 * n;
    let mut rank = 0;
    for col in 0..cols {
        if let Some(p) = (rank..m.len()).find(|&r| m[r][col]) {
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && m[r][col] {
                    let pivot = m[rank].clone();
                    for (a, b) in m[r].iter_mut().zip(pivot) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}
