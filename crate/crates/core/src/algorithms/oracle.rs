use num_complex::Complex64 as C64;

use crate::error::{QError, Result};
use crate::statevec::QState;

/// Largest input width accepted for truth-table oracles.
pub const ORACLE_MAX_BITS: usize = 20;

/// Promise a Boolean oracle is constructed under.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Promise {
    ConstantOrBalanced,
    SingleMarked,
    General,
}

/// Truth table of `f: {0,1}^n -> {0,1}`, indexed with qubit 0 as the MSB.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanOracle {
    n: usize,
    table: Vec<bool>,
    promise: Promise,
}

impl BooleanOracle {
    /// Tabulate `f` and check the promise eagerly.
    pub fn new<F: Fn(usize) -> bool>(n: usize, f: F, promise: Promise) -> Result<Self> {
        if n == 0 {
            return Err(QError::InvalidArgument("oracle needs at least one input bit".into()));
        }
        if n > ORACLE_MAX_BITS {
            return Err(QError::CapExceeded {
                requested: n,
                cap: ORACLE_MAX_BITS,
            });
        }
        let table: Vec<bool> = (0..1usize << n).map(f).collect();
        let ones = table.iter().filter(|&&b| b).count();
        let size = table.len();
        match promise {
            Promise::ConstantOrBalanced if ones != 0 && ones != size && 2 * ones != size => {
                return Err(QError::PromiseViolation(format!(
                    "f has {ones} ones out of {size}: neither constant nor balanced"
                )));
            }
            Promise::SingleMarked if ones != 1 => {
                return Err(QError::PromiseViolation(format!(
                    "expected exactly one marked input, found {ones}"
                )));
            }
            _ => {}
        }
        Ok(Self { n, table, promise })
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::new(n, |_| value, Promise::ConstantOrBalanced)
    }

    /// Oracle marking exactly `x0`.
    pub fn marked(n: usize, x0: usize) -> Result<Self> {
        Self::new(n, |x| x == x0, Promise::SingleMarked)
    }

    pub fn num_bits(&self) -> usize {
        self.n
    }

    pub fn promise(&self) -> Promise {
        self.promise
    }

    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn marked_inputs(&self) -> Vec<usize> {
        (0..self.table.len()).filter(|&x| self.table[x]).collect()
    }

    /// `|x> -> (-1)^{f(x)} |x>` on an `n`-qubit state.
    pub fn apply_phase(&self, state: &mut QState) -> Result<()> {
        if state.num_qubits() != self.n {
            return Err(QError::SizeMismatch {
                expected: self.n,
                got: state.num_qubits(),
            });
        }
        let table = &self.table;
        state.apply_diagonal(|z| {
            if table[z] {
                C64::new(-1.0, 0.0)
            } else {
                C64::new(1.0, 0.0)
            }
        });
        Ok(())
    }

    /// `|x>|y> -> |x>|y ⊕ f(x)>` with the ancilla as the last qubit.
    ///
    /// With the ancilla in `|->` this reduces to `apply_phase`.
    pub fn apply_xor(&self, state: &mut QState) -> Result<()> {
        if state.num_qubits() != self.n + 1 {
            return Err(QError::SizeMismatch {
                expected: self.n + 1,
                got: state.num_qubits(),
            });
        }
        let table = &self.table;
        state.apply_permutation(|z| if table[z >> 1] { z ^ 1 } else { z })
    }
}
