use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{GateSpec, QState};
use crate::error::{QError, Result};

/// One gate application.
#[derive(Clone, Debug, PartialEq)]
pub struct Op {
    pub gate: GateSpec,
    pub targets: Vec<usize>,
}

/// Ordered gate list over a fixed register width.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            ops: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Validate and append a gate.
    pub fn push_gate(&mut self, gate: GateSpec, targets: &[usize]) -> Result<&mut Self> {
        if targets.len() != gate.arity() {
            return Err(QError::ArityMismatch {
                gate: gate.name().to_string(),
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.num_qubits {
                return Err(QError::TargetOutOfRange {
                    index: t,
                    num_qubits: self.num_qubits,
                });
            }
            if targets[..i].contains(&t) {
                return Err(QError::DuplicateTarget(t));
            }
        }
        self.ops.push(Op {
            gate,
            targets: targets.to_vec(),
        });
        Ok(self)
    }

    /// Append a built-in gate by name.
    pub fn push(&mut self, name: &str, targets: &[usize], params: &[f64]) -> Result<&mut Self> {
        self.push_gate(GateSpec::named(name, params)?, targets)
    }

    /// Append all ops of `other`, which must have the same width.
    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.num_qubits != self.num_qubits {
            return Err(QError::SizeMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(self)
    }

    /// Reversed circuit of adjoint gates.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            ops: self
                .ops
                .iter()
                .rev()
                .map(|op| Op {
                    gate: op.gate.adjoint(),
                    targets: op.targets.clone(),
                })
                .collect(),
        }
    }

    /// Count ops whose gate name is in `names`.
    pub fn count_named(&self, names: &[&str]) -> usize {
        self.ops
            .iter()
            .filter(|op| names.contains(&op.gate.name()))
            .count()
    }

    /// Run on `|0...0>`.
    pub fn simulate(&self) -> Result<QState> {
        let mut s = QState::zero(self.num_qubits)?;
        s.apply_circuit(self)?;
        Ok(s)
    }

    /// Dense unitary built column by column (keep `num_qubits` small).
    pub fn unitary(&self) -> Result<DMatrix<C64>> {
        if self.num_qubits > 12 {
            return Err(QError::CapExceeded {
                requested: self.num_qubits,
                cap: 12,
            });
        }
        let dim = 1usize << self.num_qubits;
        let mut u = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut s = QState::basis(self.num_qubits, col)?;
            s.apply_circuit(self)?;
            for (row, a) in s.amplitudes().iter().enumerate() {
                u[(row, col)] = *a;
            }
        }
        Ok(u)
    }
}
