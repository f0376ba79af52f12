use crate::error::{QError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapNetwork {
    pub n: usize,
    /// Each layer is a set of disjoint `(i, i+1)` swaps.
    pub layers: Vec<Vec<(usize, usize)>>,
    /// `final_position[token]` is the wire a logical qubit ends on.
    pub final_position: Vec<usize>,
}

impl SwapNetwork {
    /// Run the schedule on tokens and return every unordered pair that
    /// sat on neighbouring wires at some point, including before layer 1.
    pub fn adjacent_pairs(&self) -> std::collections::BTreeSet<(usize, usize)> {
        let mut wire: Vec<usize> = (0..self.n).collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut record = |wire: &[usize]| {
            for w in wire.windows(2) {
                seen.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
        };
        record(&wire);
        for layer in &self.layers {
            for &(a, b) in layer {
                wire.swap(a, b);
            }
            record(&wire);
        }
        seen
    }
}

/// Odd-even transposition network on a line of `n` wires: layer `k` swaps
/// `(i, i+1)` for every `i ≡ k (mod 2)`. After `n` layers the order is
/// reversed and every pair has met.
pub fn swap_network_linear(n: usize) -> Result<SwapNetwork> {
    if n < 2 {
        return Err(QError::InvalidArgument(format!("need at least two qubits, got {n}")));
    }
    let layers: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|k| (k % 2..n - 1).step_by(2).map(|i| (i, i + 1)).collect::<Vec<_>>())
        .filter(|l| !l.is_empty())
        .collect();
    let mut wire: Vec<usize> = (0..n).collect();
    for layer in &layers {
        for &(a, b) in layer {
            wire.swap(a, b);
        }
    }
    let mut final_position = vec![0; n];
    for (w, &t) in wire.iter().enumerate() {
        final_position[t] = w;
    }
    Ok(SwapNetwork {
        n,
        layers,
        final_position,
    })
}
