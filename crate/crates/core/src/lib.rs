//! Desk-scale discrete-variable quantum computing toolkit.
//!
//! Two exact engines (a dense statevector and a stabilizer tableau) plus the
//! algorithms, codes and sampling models built on top of them.

pub mod algorithms;
pub mod clifford;
pub mod error;
pub mod mbqc;
pub mod optimize;
pub mod qec;
pub mod sampling;
pub mod shor;
pub mod statevec;

pub use clifford::{CliffordOp, Pauli, PauliString, Tableau};
pub use error::{QError, Result};
pub use statevec::{Circuit, GateSpec, QState};
