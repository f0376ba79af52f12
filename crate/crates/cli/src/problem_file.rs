//! Problem files for `qaoa`/`anneal` (JSON) and Hamiltonian files for
//! `vqe`/`gap-scan` (one `coefficient PAULIS` term per line).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use qdesk_core::optimize::{
    encode_maxcut, encode_number_partition, encode_subset_sum, Graph, IsingProblem, PauliSum, Sense,
};
use qdesk_core::{PauliString, QError};

use crate::circuit_file::ParseError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SenseTag {
    #[default]
    Minimize,
    Maximize,
}

/// Optimization problem description, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemFile {
    /// `E(s) = Σ J_ab s_a s_b + Σ h_a s_a + offset` with couplings as `[a, b, J]`.
    Ising {
        spins: usize,
        #[serde(default)]
        couplings: Vec<(usize, usize, f64)>,
        #[serde(default)]
        fields: Vec<f64>,
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        sense: SenseTag,
    },
    Maxcut {
        nodes: usize,
        edges: Vec<(usize, usize, f64)>,
    },
    SubsetSum {
        numbers: Vec<i64>,
        target: i64,
    },
    NumberPartition {
        numbers: Vec<i64>,
    },
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, QError> {
        serde_json::from_str(text).map_err(|e| QError::InvalidArgument(format!("problem file: {e}")))
    }

    pub fn to_ising(&self) -> Result<IsingProblem, QError> {
        match self {
            ProblemFile::Ising {
                spins,
                couplings,
                fields,
                offset,
                sense,
            } => {
                let n = *spins;
                if n == 0 {
                    return Err(QError::InvalidArgument("problem needs at least one spin".into()));
                }
                let mut j = DMatrix::zeros(n, n);
                for &(a, b, v) in couplings {
                    let far = a.max(b);
                    if far >= n {
                        return Err(QError::TargetOutOfRange {
                            index: far,
                            num_qubits: n,
                        });
                    }
                    j[(a, b)] += v;
                }
                let h = if fields.is_empty() { vec![0.0; n] } else { fields.clone() };
                if h.len() != n {
                    return Err(QError::SizeMismatch {
                        expected: n,
                        got: h.len(),
                    });
                }
                let sense = match sense {
                    SenseTag::Minimize => Sense::Minimize,
                    SenseTag::Maximize => Sense::Maximize,
                };
                IsingProblem::new(j, h, *offset, sense)
            }
            ProblemFile::Maxcut { nodes, edges } => encode_maxcut(&Graph::new(*nodes, edges.clone())?),
            ProblemFile::SubsetSum { numbers, target } => encode_subset_sum(numbers, *target),
            ProblemFile::NumberPartition { numbers } => encode_number_partition(numbers),
        }
    }
}

/// Parse `coefficient LABEL` lines, e.g. `0.5 XI`; `#` starts a comment.
pub fn parse_hamiltonian(text: &str) -> Result<PauliSum, ParseError> {
    let mut terms: Vec<(f64, PauliString)> = Vec::new();
    let mut width = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |error| ParseError { line, error };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let (Some(coef), Some(label), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(err(QError::InvalidArgument(format!("expected `coefficient PAULIS`, got `{body}`"))));
        };
        let c: f64 = coef
            .parse()
            .map_err(|_| err(QError::InvalidArgument(format!("malformed coefficient `{coef}`"))))?;
        let p: PauliString = label.parse().map_err(err)?;
        if *width.get_or_insert(p.num_qubits()) != p.num_qubits() {
            return Err(err(QError::SizeMismatch {
                expected: width.unwrap_or(0),
                got: p.num_qubits(),
            }));
        }
        terms.push((c, p));
    }
    let Some(n) = width else {
        return Err(ParseError {
            line: 0,
            error: QError::InvalidArgument("Hamiltonian file has no terms".into()),
        });
    };
    PauliSum::new(n, terms).map_err(|error| ParseError { line: 0, error })
}
