//! Seeded fixtures shared by the benchmarks.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdesk_core::CliffordOp;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `len` uniformly drawn Clifford generators on `n` qubits.
pub fn clifford_ops(n: usize, len: usize, seed: u64) -> Vec<CliffordOp> {
    let mut r = rng(seed);
    (0..len).map(|_| CliffordOp::random(n, &mut r)).collect()
}

/// Complex Gaussian-ish matrix with entries in the unit square.
pub fn random_matrix(n: usize, seed: u64) -> DMatrix<C64> {
    let mut r = rng(seed);
    DMatrix::from_fn(n, n, |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}
