//! Pauli algebra and stabilizer-tableau simulation of Clifford circuits.

mod pauli;
mod tableau;

pub use pauli::{Pauli, PauliString};
pub use tableau::{Tableau, TableauOutcome, TABLEAU_DENSE_LIMIT};

use rand::Rng;

use crate::error::{QError, Result};
use crate::statevec::GateSpec;

/// Clifford generators understood by the tableau engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordOp {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
}

impl CliffordOp {
    pub fn targets(&self) -> Vec<usize> {
        match *self {
            CliffordOp::H(q)
            | CliffordOp::S(q)
            | CliffordOp::X(q)
            | CliffordOp::Y(q)
            | CliffordOp::Z(q) => vec![q],
            CliffordOp::Cnot(a, b) | CliffordOp::Cz(a, b) => vec![a, b],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliffordOp::H(_) => "H",
            CliffordOp::S(_) => "S",
            CliffordOp::X(_) => "X",
            CliffordOp::Y(_) => "Y",
            CliffordOp::Z(_) => "Z",
            CliffordOp::Cnot(..) => "CNOT",
            CliffordOp::Cz(..) => "CZ",
        }
    }

    /// The same gate for the statevector engine.
    pub fn gate(&self) -> GateSpec {
        GateSpec::named(self.name(), &[]).expect("Clifford names are built-in gates")
    }

    pub(crate) fn check_range(&self, n: usize) -> Result<()> {
        let t = self.targets();
        for &q in &t {
            if q >= n {
                return Err(QError::TargetOutOfRange {
                    index: q,
                    num_qubits: n,
                });
            }
        }
        if t.len() == 2 && t[0] == t[1] {
            return Err(QError::DuplicateTarget(t[0]));
        }
        Ok(())
    }

    /// Uniformly chosen generator on `n` qubits.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let kinds = if n >= 2 { 7 } else { 5 };
        let q = rng.random_range(0..n);
        let kind = rng.random_range(0..kinds);
        let mut other = || {
            let mut b = rng.random_range(0..n - 1);
            if b >= q {
                b += 1;
            }
            b
        };
        match kind {
            0 => CliffordOp::H(q),
            1 => CliffordOp::S(q),
            2 => CliffordOp::X(q),
            3 => CliffordOp::Y(q),
            4 => CliffordOp::Z(q),
            5 => CliffordOp::Cnot(q, other()),
            _ => CliffordOp::Cz(q, other()),
        }
    }
}

/// `UPU†` with exact phase tracking.
pub fn conjugate_clifford(op: &CliffordOp, p: &PauliString) -> Result<PauliString> {
    op.check_range(p.num_qubits())?;
    let mut out = p.clone();
    conjugate_in_place(op, &mut out);
    Ok(out)
}

// Sign-flip rules for the letter basis (x, z) with (1, 1) = Y.
pub(crate) fn conjugate_in_place(op: &CliffordOp, p: &mut PauliString) {
    match *op {
        CliffordOp::H(q) => {
            let (x, z) = (p.x(q), p.z(q));
            if x && z {
                p.flip_sign();
            }
            p.set_x(q, z);
            p.set_z(q, x);
        }
        CliffordOp::S(q) => {
            let (x, z) = (p.x(q), p.z(q));
            if x && z {
                p.flip_sign();
            }
            p.set_z(q, z ^ x);
        }
        CliffordOp::X(q) => {
            if p.z(q) {
                p.flip_sign();
            }
        }
        CliffordOp::Y(q) => {
            if p.x(q) ^ p.z(q) {
                p.flip_sign();
            }
        }
        CliffordOp::Z(q) => {
            if p.x(q) {
                p.flip_sign();
            }
        }
        CliffordOp::Cnot(a, b) => {
            let (xa, za, xb, zb) = (p.x(a), p.z(a), p.x(b), p.z(b));
            if xa && zb && !(xb ^ za) {
                p.flip_sign();
            }
            p.set_x(b, xb ^ xa);
            p.set_z(a, za ^ zb);
        }
        CliffordOp::Cz(a, b) => {
            let (xa, za, xb, zb) = (p.x(a), p.z(a), p.x(b), p.z(b));
            if xa && xb && (za ^ zb) {
                p.flip_sign();
            }
            p.set_z(a, za ^ xb);
            p.set_z(b, zb ^ xa);
        }
    }
}

/// True iff `p` and `q` commute.
pub fn pauli_commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.commutes(q)
}
