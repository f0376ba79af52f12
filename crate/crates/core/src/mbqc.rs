//! Measurement-based computation on cluster states.
//!
//! Measuring a cluster qubit in the basis `|φ±> = (|0> ± e^{iφ}|1>)/√2`
//! teleports its neighbour's input as `X^m H R_z(−φ)|ψ>`. The chain
//! routines take the angle `θ` of the rotation to implement and measure at
//! `φ = −θ`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::clifford::{Pauli, PauliString};
use crate::error::{QError, Result};
use crate::statevec::{QState, DEFAULT_QUBIT_CAP};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    inputs: Vec<usize>,
}

impl ClusterGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, inputs: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(QError::InvalidArgument("a cluster needs at least one node".into()));
        }
        if n > DEFAULT_QUBIT_CAP {
            return Err(QError::CapExceeded {
                requested: n,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(QError::TargetOutOfRange { index: a.max(b), num_qubits: n });
            }
            if a == b {
                return Err(QError::InvalidArgument(format!("self-loop on node {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(QError::InvalidArgument(format!("repeated edge ({a}, {b})")));
            }
        }
        let mut ins = BTreeSet::new();
        for &i in &inputs {
            if i >= n {
                return Err(QError::TargetOutOfRange { index: i, num_qubits: n });
            }
            if !ins.insert(i) {
                return Err(QError::DuplicateTarget(i));
            }
        }
        Ok(Self { n, edges, inputs })
    }

    /// Path `0 − 1 − … − (n−1)`, optionally with node 0 as the input.
    pub fn line(n: usize, with_input: bool) -> Result<Self> {
        let edges = (1..n).map(|k| (k - 1, k)).collect();
        Self::new(n, edges, if with_input { vec![0] } else { vec![] })
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// `K_i = X_i Π_{k ∈ N(i)} Z_k`.
    pub fn nullifier(&self, i: usize) -> Result<PauliString> {
        let mut p = PauliString::single(self.n, i, Pauli::X)?;
        for k in self.neighbours(i) {
            p = p.mul(&PauliString::single(self.n, k, Pauli::Z)?)?;
        }
        Ok(p)
    }

    pub fn with_edge_order(mut self, order: &[usize]) -> Result<Self> {
        if order.len() != self.edges.len() || order.iter().collect::<BTreeSet<_>>().len() != order.len() {
            return Err(QError::InvalidArgument("edge order must be a permutation".into()));
        }
        self.edges = order.iter().map(|&k| self.edges[k]).collect();
        Ok(self)
    }
}

/// Input qubits at their node ids, `|+>` elsewhere, then CZ on every edge.
///
/// `inputs` are consumed in order and their qubits assigned to the graph's
/// input nodes in order, so one joint state or several factors both work.
pub fn build_cluster(g: &ClusterGraph, inputs: &[QState]) -> Result<QState> {
    let k: usize = inputs.iter().map(QState::num_qubits).sum();
    if k != g.inputs.len() {
        return Err(QError::SizeMismatch {
            expected: g.inputs.len(),
            got: k,
        });
    }
    let joint = match inputs.split_first() {
        None => None,
        Some((first, rest)) => Some(rest.iter().try_fold(first.clone(), |acc, s| acc.tensor(s))?),
    };
    let n = g.n;
    let plus = (0.5f64).sqrt().powi((n - k) as i32);
    let amps = (0..1usize << n)
        .map(|z| {
            let a = match &joint {
                None => C64::new(1.0, 0.0),
                Some(j) => {
                    let idx = g
                        .inputs
                        .iter()
                        .fold(0usize, |acc, &node| acc << 1 | (z >> (n - 1 - node) & 1));
                    j.amplitude(idx)
                }
            };
            a * plus
        })
        .collect();
    let mut s = QState::from_amplitudes(amps)?;
    for &(a, b) in &g.edges {
        s.apply_named("CZ", &[a, b], &[])?;
    }
    Ok(s)
}

/// `V = H·diag(1, e^{-iφ})` maps `|φ+> → |0>` and `|φ-> → |1>`.
fn basis_change(phi: f64) -> DMatrix<C64> {
    let r = C64::new(0.5f64.sqrt(), 0.0);
    let e = C64::from_polar(1.0, -phi);
    DMatrix::from_row_slice(2, 2, &[r, r * e, r, -r * e])
}

/// Measure `σ_φ = cos φ X + sin φ Y` on qubit `q`; `m = 0` is the `+1`
/// outcome. The returned state keeps qubit `q`, collapsed onto `|φ±>`.
pub fn measure_rotated<R: Rng + ?Sized>(
    state: &QState,
    q: usize,
    phi: f64,
    forced: Option<u8>,
    rng: &mut R,
) -> Result<(u8, QState)> {
    let v = basis_change(phi);
    let mut s = state.clone();
    s.apply_matrix(&v, &[q])?;
    let (m, _) = s.measure_or_force(q, forced, rng)?;
    s.apply_matrix(&v.adjoint(), &[q])?;
    Ok((m, s))
}

/// Like [`measure_rotated`] but drops the measured qubit; also returns the
/// branch probability.
pub fn measure_rotated_remove<R: Rng + ?Sized>(
    state: &QState,
    q: usize,
    phi: f64,
    forced: Option<u8>,
    rng: &mut R,
) -> Result<(u8, f64, QState)> {
    let mut s = state.clone();
    s.apply_matrix(&basis_change(phi), &[q])?;
    let m = match forced {
        Some(m) => m,
        None => u8::from(rng.random::<f64>() < s.prob_one(q)?),
    };
    let (p, out) = s.project_remove(q, m)?;
    Ok((m, p, out))
}

/// Pauli frame left on gadget outputs: output `= X^x Z^z · target` per
/// qubit, with `Z` applied first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ByproductRecord {
    pub outcomes: Vec<u8>,
    pub x: Vec<u8>,
    pub z: Vec<u8>,
}

/// Undo a byproduct frame: apply `X^x` then `Z^z`.
pub fn apply_corrections(state: &QState, rec: &ByproductRecord) -> Result<QState> {
    let n = state.num_qubits();
    if rec.x.len() != n || rec.z.len() != n {
        return Err(QError::SizeMismatch {
            expected: n,
            got: rec.x.len(),
        });
    }
    let mut s = state.clone();
    for q in 0..n {
        if rec.x[q] == 1 {
            s.apply_named("X", &[q], &[])?;
        }
    }
    for q in 0..n {
        if rec.z[q] == 1 {
            s.apply_named("Z", &[q], &[])?;
        }
    }
    Ok(s)
}

fn forced_at(forced: Option<&[u8]>, k: usize) -> Option<u8> {
    forced.and_then(|f| f.get(k).copied())
}

/// One teleportation step through a two-node cluster, measuring the input
/// at angle `phi`. Output is `X^m H R_z(−φ)|ψ>`.
pub fn teleport_step<R: Rng + ?Sized>(
    psi: &QState,
    phi: f64,
    forced: Option<u8>,
    rng: &mut R,
) -> Result<(QState, u8)> {
    if psi.num_qubits() != 1 {
        return Err(QError::SizeMismatch {
            expected: 1,
            got: psi.num_qubits(),
        });
    }
    let s = build_cluster(&ClusterGraph::line(2, true)?, std::slice::from_ref(psi))?;
    let (m, _, out) = measure_rotated_remove(&s, 0, phi, forced, rng)?;
    Ok((out, m))
}

/// Non-adaptive chain: implements `Π_k X^{m_k} H R_z(θ_k)` (first angle
/// applied first) on a line of `len + 1` nodes. Returns the outcomes.
pub fn mbqc_chain<R: Rng + ?Sized>(
    psi: &QState,
    thetas: &[f64],
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<(QState, Vec<u8>)> {
    chain(psi, thetas.len(), |k, _| thetas[k], forced, rng)
}

fn chain<R, F>(psi: &QState, len: usize, angle: F, forced: Option<&[u8]>, rng: &mut R) -> Result<(QState, Vec<u8>)>
where
    R: Rng + ?Sized,
    F: Fn(usize, &[u8]) -> f64,
{
    if psi.num_qubits() != 1 {
        return Err(QError::SizeMismatch {
            expected: 1,
            got: psi.num_qubits(),
        });
    }
    let mut s = build_cluster(&ClusterGraph::line(len + 1, true)?, std::slice::from_ref(psi))?;
    let mut ms = Vec::with_capacity(len);
    for k in 0..len {
        let theta = angle(k, &ms);
        // the measured node is always the leading qubit
        let (m, _, out) = measure_rotated_remove(&s, 0, -theta, forced_at(forced, k), rng)?;
        ms.push(m);
        s = out;
    }
    Ok((s, ms))
}

/// Adaptive three-step chain for `R_z(γ) R_x(β) R_z(α)`: rotation angles
/// `α`, `(−1)^{m1} β`, `(−1)^{m2} γ`. The output is
/// `X^{m3} Z^{m2} X^{m1} · H R_z(γ) R_x(β) R_z(α)|ψ>` and the record holds
/// `x = m1 ⊕ m3`, `z = m2`; corrections are not applied.
pub fn mbqc_single_qubit<R: Rng + ?Sized>(
    psi: &QState,
    alpha: f64,
    beta: f64,
    gamma: f64,
    forced: Option<[u8; 3]>,
    rng: &mut R,
) -> Result<(QState, ByproductRecord)> {
    let sign = |m: u8| if m == 1 { -1.0 } else { 1.0 };
    let (out, ms) = chain(
        psi,
        3,
        |k, ms| match k {
            0 => alpha,
            1 => sign(ms[0]) * beta,
            _ => sign(ms[1]) * gamma,
        },
        forced.as_ref().map(|f| &f[..]),
        rng,
    )?;
    let rec = ByproductRecord {
        x: vec![ms[0] ^ ms[2]],
        z: vec![ms[1]],
        outcomes: ms,
    };
    Ok((out, rec))
}

/// CNOT gadget on four nodes: inputs on 0 (control) and 1 (target),
/// ancillas 2 and 3, edges `(2,3), (0,2), (1,2)`; nodes 1 and 2 are read in
/// the X basis. Output on (control, node 3) is
/// `X_t^{m(2)} (Z_c Z_t)^{m(1)} · CNOT|ψ>`.
pub fn mbqc_cnot<R: Rng + ?Sized>(
    psi: &QState,
    forced: Option<[u8; 2]>,
    rng: &mut R,
) -> Result<(QState, ByproductRecord)> {
    if psi.num_qubits() != 2 {
        return Err(QError::SizeMismatch {
            expected: 2,
            got: psi.num_qubits(),
        });
    }
    let g = ClusterGraph::new(4, vec![(2, 3), (0, 2), (1, 2)], vec![0, 1])?;
    let s = build_cluster(&g, std::slice::from_ref(psi))?;
    let f = forced.as_ref().map(|f| &f[..]);
    // node 1 goes first; node 2 then sits at index 1 of the reduced register
    let (m1, _, s) = measure_rotated_remove(&s, 1, 0.0, forced_at(f, 0), rng)?;
    let (m2, _, out) = measure_rotated_remove(&s, 1, 0.0, forced_at(f, 1), rng)?;
    let rec = ByproductRecord {
        outcomes: vec![m1, m2],
        x: vec![0, m2],
        z: vec![m1, m1],
    };
    Ok((out, rec))
}
