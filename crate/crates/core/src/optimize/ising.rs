use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{QError, Result};

/// Largest problem `brute_force_ground` will enumerate.
pub const BRUTE_FORCE_MAX_SPINS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// `+1` for minimize, `-1` for maximize: multiply a cost by this to get
    /// a quantity to minimize.
    pub fn sign(self) -> f64 {
        match self {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        }
    }

    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }
}

/// `E(s) = Σ_{i<j} J_ij s_i s_j + Σ_i h_i s_i + offset` with `s_i = ±1`.
///
/// Basis index `z` encodes spin `i` in the bit of qubit `i` (qubit 0 is the
/// MSB) with `z_i = (1 - s_i)/2`, so bit 0 means spin up.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingProblem {
    n: usize,
    j: DMatrix<f64>,
    h: Vec<f64>,
    offset: f64,
    sense: Sense,
}

impl IsingProblem {
    /// `j` is folded to upper-triangular form (`J_ij + J_ji` for `i < j`);
    /// its diagonal must vanish.
    pub fn new(j: DMatrix<f64>, h: Vec<f64>, offset: f64, sense: Sense) -> Result<Self> {
        let n = h.len();
        if n == 0 {
            return Err(QError::InvalidArgument("an Ising problem needs at least one spin".into()));
        }
        if j.nrows() != n || j.ncols() != n {
            return Err(QError::SizeMismatch {
                expected: n,
                got: j.nrows(),
            });
        }
        let mut upper = DMatrix::zeros(n, n);
        for a in 0..n {
            if j[(a, a)] != 0.0 {
                return Err(QError::InvalidArgument(format!(
                    "diagonal coupling J[{a}][{a}] only shifts the energy; fold it into the offset"
                )));
            }
            for b in a + 1..n {
                upper[(a, b)] = j[(a, b)] + j[(b, a)];
            }
        }
        if upper.iter().chain(&h).chain([&offset]).any(|v| !v.is_finite()) {
            return Err(QError::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(Self {
            n,
            j: upper,
            h,
            offset,
            sense,
        })
    }

    pub fn num_spins(&self) -> usize {
        self.n
    }

    /// Upper-triangular couplings.
    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn fields(&self) -> &[f64] {
        &self.h
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn with_sense(mut self, sense: Sense) -> Self {
        self.sense = sense;
        self
    }

    /// Same landscape with every coefficient negated and the sense flipped.
    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            j: -&self.j,
            h: self.h.iter().map(|v| -v).collect(),
            offset: -self.offset,
            sense: match self.sense {
                Sense::Minimize => Sense::Maximize,
                Sense::Maximize => Sense::Minimize,
            },
        }
    }

    /// Nonzero couplings as `(i, j, J_ij)` with `i < j`.
    pub fn pairs(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.j[(a, b)] != 0.0 {
                    out.push((a, b, self.j[(a, b)]));
                }
            }
        }
        out
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.n {
            return Err(QError::SizeMismatch {
                expected: self.n,
                got: spins.len(),
            });
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(QError::InvalidArgument("spins must be ±1".into()));
        }
        Ok(self.energy_unchecked(|i| f64::from(spins[i])))
    }

    fn energy_unchecked<F: Fn(usize) -> f64>(&self, s: F) -> f64 {
        let mut e = self.offset;
        for a in 0..self.n {
            let sa = s(a);
            e += self.h[a] * sa;
            for b in a + 1..self.n {
                let jab = self.j[(a, b)];
                if jab != 0.0 {
                    e += jab * sa * s(b);
                }
            }
        }
        e
    }

    /// Energy of basis index `z`.
    pub fn energy_of_index(&self, z: usize) -> f64 {
        let n = self.n;
        self.energy_unchecked(|i| if z >> (n - 1 - i) & 1 == 1 { -1.0 } else { 1.0 })
    }

    /// Spins of basis index `z`.
    pub fn spins_of_index(&self, z: usize) -> Vec<i8> {
        (0..self.n)
            .map(|i| if z >> (self.n - 1 - i) & 1 == 1 { -1 } else { 1 })
            .collect()
    }

    /// Energies of every basis index, the diagonal of `H_C`.
    pub fn cost_diagonal(&self) -> Vec<f64> {
        (0..1usize << self.n)
            .into_par_iter()
            .map(|z| self.energy_of_index(z))
            .collect()
    }

    /// Basis indices attaining the optimum (for the problem's sense) of a
    /// precomputed diagonal, with a relative tolerance of 1e-9.
    pub fn optimizers_of(&self, diag: &[f64]) -> (f64, Vec<usize>) {
        let best = diag.iter().copied().fold(f64::NAN, |acc, e| {
            if acc.is_nan() || self.sense.better(e, acc) {
                e
            } else {
                acc
            }
        });
        let tol = 1e-9 * best.abs().max(1.0);
        let opt = (0..diag.len()).filter(|&z| (diag[z] - best).abs() <= tol).collect();
        (best, opt)
    }
}

/// Exhaustive optimum and every optimizing basis index.
pub fn brute_force_ground(p: &IsingProblem) -> Result<(f64, Vec<usize>)> {
    if p.n > BRUTE_FORCE_MAX_SPINS {
        return Err(QError::CapExceeded {
            requested: p.n,
            cap: BRUTE_FORCE_MAX_SPINS,
        });
    }
    Ok(p.optimizers_of(&p.cost_diagonal()))
}

fn nonempty(nums: &[i64]) -> Result<()> {
    if nums.is_empty() {
        return Err(QError::InvalidArgument("the number set is empty".into()));
    }
    Ok(())
}

/// Subset sum as `(Σ n_i z_i − m)²`.
pub fn encode_subset_sum(nums: &[i64], m: i64) -> Result<IsingProblem> {
    nonempty(nums)?;
    let n = nums.len();
    let f: Vec<f64> = nums.iter().map(|&v| v as f64).collect();
    let c = f.iter().sum::<f64>() / 2.0 - m as f64;
    let mut j = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a + 1..n {
            j[(a, b)] = f[a] * f[b] / 2.0;
        }
    }
    let h = f.iter().map(|v| -c * v).collect();
    let offset = c * c + f.iter().map(|v| v * v).sum::<f64>() / 4.0;
    IsingProblem::new(j, h, offset, Sense::Minimize)
}

/// Number partitioning as `(Σ n_i s_i)²`.
pub fn encode_number_partition(nums: &[i64]) -> Result<IsingProblem> {
    nonempty(nums)?;
    let n = nums.len();
    let f: Vec<f64> = nums.iter().map(|&v| v as f64).collect();
    let mut j = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a + 1..n {
            j[(a, b)] = 2.0 * f[a] * f[b];
        }
    }
    let offset = f.iter().map(|v| v * v).sum();
    IsingProblem::new(j, vec![0.0; n], offset, Sense::Minimize)
}

/// Undirected weighted graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(u, v, w) in &edges {
            if u >= n || v >= n {
                return Err(QError::InvalidArgument(format!("edge ({u}, {v}) outside {n} vertices")));
            }
            if u == v {
                return Err(QError::InvalidArgument(format!("self-loop on vertex {u}")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(QError::InvalidArgument(format!("edge ({u}, {v}) has weight {w}; weights must be ≥ 0")));
            }
        }
        Ok(Self { n, edges })
    }

    /// Total weight of edges whose endpoints get different bits in `z`.
    pub fn cut_value(&self, z: usize) -> f64 {
        let bit = |v: usize| z >> (self.n - 1 - v) & 1;
        self.edges
            .iter()
            .filter(|&&(u, v, _)| bit(u) != bit(v))
            .map(|&(_, _, w)| w)
            .sum()
    }
}

/// Max-Cut as `½ Σ w_ij (1 − s_i s_j)`, to be maximized.
pub fn encode_maxcut(g: &Graph) -> Result<IsingProblem> {
    if g.n == 0 {
        return Err(QError::InvalidArgument("graph has no vertices".into()));
    }
    let mut j = DMatrix::zeros(g.n, g.n);
    let mut offset = 0.0;
    for &(u, v, w) in &g.edges {
        if w < 0.0 {
            return Err(QError::InvalidArgument(format!("negative weight {w}")));
        }
        let (a, b) = (u.min(v), u.max(v));
        j[(a, b)] -= w / 2.0;
        offset += w / 2.0;
    }
    IsingProblem::new(j, vec![0.0; g.n], offset, Sense::Maximize)
}

/// `q(z) = Σ_j Q_jj z_j + Σ_{j<k} Q_jk z_j z_k + constant` over `z_j ∈ {0,1}`.
/// Converters emit upper-triangular `Q`; a lower entry is added to its mirror.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboProblem {
    pub q: DMatrix<f64>,
    pub constant: f64,
    pub sense: Sense,
}

impl QuboProblem {
    pub fn num_vars(&self) -> usize {
        self.q.nrows()
    }

    pub fn value(&self, bits: &[u8]) -> f64 {
        let n = self.num_vars();
        let mut v = self.constant;
        for a in 0..n {
            if bits[a] == 0 {
                continue;
            }
            v += self.q[(a, a)];
            for b in a + 1..n {
                if bits[b] != 0 {
                    v += self.q[(a, b)] + self.q[(b, a)];
                }
            }
        }
        v
    }
}

/// Substitute `s = 1 − 2z`.
pub fn ising_to_qubo(p: &IsingProblem) -> QuboProblem {
    let n = p.n;
    let mut q = DMatrix::zeros(n, n);
    let mut constant = p.offset;
    for a in 0..n {
        q[(a, a)] -= 2.0 * p.h[a];
        constant += p.h[a];
    }
    for (a, b, jab) in p.pairs() {
        q[(a, b)] += 4.0 * jab;
        q[(a, a)] -= 2.0 * jab;
        q[(b, b)] -= 2.0 * jab;
        constant += jab;
    }
    QuboProblem {
        q,
        constant,
        sense: p.sense,
    }
}

/// Substitute `z = (1 − s)/2`.
pub fn qubo_to_ising(qp: &QuboProblem) -> Result<IsingProblem> {
    let n = qp.num_vars();
    let mut j = DMatrix::zeros(n, n);
    let mut h = vec![0.0; n];
    let mut offset = qp.constant;
    for a in 0..n {
        h[a] -= qp.q[(a, a)] / 2.0;
        offset += qp.q[(a, a)] / 2.0;
        for b in a + 1..n {
            let qab = qp.q[(a, b)] + qp.q[(b, a)];
            j[(a, b)] = qab / 4.0;
            h[a] -= qab / 4.0;
            h[b] -= qab / 4.0;
            offset += qab / 4.0;
        }
    }
    IsingProblem::new(j, h, offset, qp.sense)
}
