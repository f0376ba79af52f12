use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::clifford::PauliString;
use crate::error::{QError, Result};
use crate::statevec::QState;

/// Largest register `PauliSum::to_matrix` and `gap_scan` will diagonalize.
pub const DENSE_SPECTRUM_MAX_QUBITS: usize = 10;

/// `H = Σ_α h_α P_α` with Hermitian Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn new(n: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if n == 0 {
            return Err(QError::InvalidArgument("a Hamiltonian needs at least one qubit".into()));
        }
        for (c, p) in &terms {
            if p.num_qubits() != n {
                return Err(QError::SizeMismatch {
                    expected: n,
                    got: p.num_qubits(),
                });
            }
            if !p.is_hermitian() {
                return Err(QError::InvalidArgument(format!("term {p} is not Hermitian")));
            }
            if !c.is_finite() {
                return Err(QError::InvalidArgument(format!("coefficient {c} of {p} is not finite")));
            }
        }
        Ok(Self { n, terms })
    }

    /// Build from `(coefficient, "XZI")` pairs.
    pub fn parse_terms(terms: &[(f64, &str)]) -> Result<Self> {
        let parsed: Vec<(f64, PauliString)> = terms
            .iter()
            .map(|(c, s)| s.parse().map(|p| (*c, p)))
            .collect::<Result<_>>()?;
        let n = parsed.first().map(|(_, p)| p.num_qubits()).unwrap_or(0);
        Self::new(n, parsed)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn expectation(&self, state: &QState) -> Result<f64> {
        self.terms
            .iter()
            .map(|(c, p)| state.expectation_pauli(p).map(|v| c * v))
            .sum()
    }

    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        if self.n > DENSE_SPECTRUM_MAX_QUBITS {
            return Err(QError::CapExceeded {
                requested: self.n,
                cap: DENSE_SPECTRUM_MAX_QUBITS,
            });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, p) in &self.terms {
            m += p.to_matrix() * C64::new(*c, 0.0);
        }
        Ok(m)
    }

    /// `(1-s)·self + s·other`.
    pub fn interpolate(&self, other: &PauliSum, s: f64) -> Result<PauliSum> {
        if self.n != other.n {
            return Err(QError::SizeMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(c, p)| ((1.0 - s) * c, p.clone()))
            .chain(other.terms.iter().map(|(c, p)| (s * c, p.clone())))
            .collect();
        Ok(PauliSum { n: self.n, terms })
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigenvalues(h: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapScan {
    pub min_gap: f64,
    pub s_at_min: f64,
    /// `(s, E1 - E0)` on the grid.
    pub curve: Vec<(f64, f64)>,
}

/// `E1 − E0` of `(1−s)H0 + sH1` on `s = k/resolution`, `k = 0..=resolution`.
///
/// Eigenvalues are counted with multiplicity, so a degenerate ground level
/// has gap 0.
pub fn gap_scan(h0: &PauliSum, h1: &PauliSum, resolution: usize) -> Result<GapScan> {
    if resolution == 0 {
        return Err(QError::InvalidArgument("resolution must be at least 1".into()));
    }
    if h0.n != h1.n {
        return Err(QError::SizeMismatch {
            expected: h0.n,
            got: h1.n,
        });
    }
    let (m0, m1) = (h0.to_matrix()?, h1.to_matrix()?);
    if m0.nrows() < 2 {
        return Err(QError::InvalidArgument("need at least two levels".into()));
    }
    let mut curve = Vec::with_capacity(resolution + 1);
    for k in 0..=resolution {
        let s = k as f64 / resolution as f64;
        let h = &m0 * C64::new(1.0 - s, 0.0) + &m1 * C64::new(s, 0.0);
        let ev = eigenvalues(&h);
        curve.push((s, ev[1] - ev[0]));
    }
    let (s_at_min, min_gap) = curve
        .iter()
        .copied()
        .fold((0.0, f64::INFINITY), |acc, (s, g)| if g < acc.1 { (s, g) } else { acc });
    Ok(GapScan {
        min_gap,
        s_at_min,
        curve,
    })
}

/// `T99 = m·τ` with `m = ln(0.01)/ln(1−p)`, clamped below at one run.
pub fn time_to_solution(p_success: f64, tau: f64) -> Result<f64> {
    if !(p_success > 0.0 && p_success <= 1.0) {
        return Err(QError::InvalidArgument(format!(
            "success probability must be in (0, 1], got {p_success}"
        )));
    }
    if p_success >= 0.99 {
        return Ok(tau);
    }
    let m = 0.01f64.ln() / (1.0 - p_success).ln();
    Ok(m.max(1.0) * tau)
}
