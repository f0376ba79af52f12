use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{QError, Result};

/// Largest arity accepted for dense gate matrices.
pub const MAX_GATE_ARITY: usize = 3;

const UNITARY_TOL: f64 = 1e-12;

/// A named dense gate acting on 1 to 3 qubits.
///
/// The first target of an application is the most significant bit of the
/// matrix index, so for `CNOT` the first target is the control.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    name: String,
    params: Vec<f64>,
    matrix: DMatrix<C64>,
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn mat(dim: usize, entries: &[C64]) -> DMatrix<C64> {
    DMatrix::from_row_slice(dim, dim, entries)
}

fn diag(entries: &[C64]) -> DMatrix<C64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(entries))
}

fn permutation(dim: usize, image: impl Fn(usize) -> usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(image(col), col)] = c(1.0, 0.0);
    }
    m
}

/// Maximum absolute entry of `U†U − I`.
pub fn unitarity_defect(m: &DMatrix<C64>) -> f64 {
    let prod = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - c(expected, 0.0)).norm());
        }
    }
    worst
}

fn param_count(name: &str) -> Option<usize> {
    Some(match name {
        "I" | "X" | "Y" | "Z" | "H" | "S" | "SDG" | "T" | "TDG" | "CNOT" | "CZ" | "CY" | "SWAP"
        | "SQRTCZ" | "TOFFOLI" | "FREDKIN" | "CCZ" => 0,
        "RX" | "RY" | "RZ" | "P" | "RK" | "RKDG" | "CP" | "CRK" | "CRKDG" | "CRZ" => 1,
        _ => return None,
    })
}

fn canonical_name(name: &str) -> String {
    let upper = name.to_ascii_uppercase();
    match upper.as_str() {
        "CX" => "CNOT".into(),
        "CCX" | "CCNOT" => "TOFFOLI".into(),
        "CSWAP" => "FREDKIN".into(),
        "ID" => "I".into(),
        _ => upper,
    }
}

fn rk_phase(k: f64) -> Result<f64> {
    if k.fract() != 0.0 || k < 0.0 {
        return Err(QError::InvalidArgument(format!(
            "R_k needs a nonnegative integer k, got {k}"
        )));
    }
    Ok(2.0 * PI / 2f64.powi(k as i32))
}

impl GateSpec {
    /// Resolve a built-in gate by name (case-insensitive, with common aliases).
    pub fn named(name: &str, params: &[f64]) -> Result<Self> {
        let name = canonical_name(name);
        let expected = param_count(&name).ok_or_else(|| QError::UnknownGate(name.clone()))?;
        if params.len() != expected {
            return Err(QError::InvalidArgument(format!(
                "gate `{name}` takes {expected} parameter(s), got {}",
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(QError::InvalidArgument(format!(
                "gate `{name}` has a non-finite parameter"
            )));
        }
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let h = FRAC_1_SQRT_2;
        let matrix = match name.as_str() {
            "I" => DMatrix::identity(2, 2),
            "X" => mat(2, &[zero, one, one, zero]),
            "Y" => mat(2, &[zero, -i, i, zero]),
            "Z" => diag(&[one, -one]),
            "H" => mat(2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
            "S" => diag(&[one, i]),
            "SDG" => diag(&[one, -i]),
            "T" => diag(&[one, C64::from_polar(1.0, PI / 4.0)]),
            "TDG" => diag(&[one, C64::from_polar(1.0, -PI / 4.0)]),
            "RX" => {
                let (s, co) = (params[0] / 2.0).sin_cos();
                mat(2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
            }
            "RY" => {
                let (s, co) = (params[0] / 2.0).sin_cos();
                mat(2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
            }
            "RZ" => diag(&[
                C64::from_polar(1.0, -params[0] / 2.0),
                C64::from_polar(1.0, params[0] / 2.0),
            ]),
            "P" => diag(&[one, C64::from_polar(1.0, params[0])]),
            "RK" => diag(&[one, C64::from_polar(1.0, rk_phase(params[0])?)]),
            "RKDG" => diag(&[one, C64::from_polar(1.0, -rk_phase(params[0])?)]),
            "CNOT" => permutation(4, |b| if b >= 2 { b ^ 1 } else { b }),
            "CY" => {
                let mut m = DMatrix::identity(4, 4);
                m[(2, 2)] = zero;
                m[(3, 3)] = zero;
                m[(2, 3)] = -i;
                m[(3, 2)] = i;
                m
            }
            "CZ" => diag(&[one, one, one, -one]),
            "SQRTCZ" => diag(&[one, one, one, i]),
            "CP" => diag(&[one, one, one, C64::from_polar(1.0, params[0])]),
            "CRZ" => diag(&[
                one,
                one,
                C64::from_polar(1.0, -params[0] / 2.0),
                C64::from_polar(1.0, params[0] / 2.0),
            ]),
            "CRK" => diag(&[one, one, one, C64::from_polar(1.0, rk_phase(params[0])?)]),
            "CRKDG" => diag(&[one, one, one, C64::from_polar(1.0, -rk_phase(params[0])?)]),
            "SWAP" => permutation(4, |b| ((b & 1) << 1) | (b >> 1)),
            "TOFFOLI" => permutation(8, |b| if b >= 6 { b ^ 1 } else { b }),
            "FREDKIN" => permutation(8, |b| match b {
                5 => 6,
                6 => 5,
                other => other,
            }),
            "CCZ" => {
                let mut d = vec![one; 8];
                d[7] = -one;
                diag(&d)
            }
            _ => unreachable!("param_count covers every name"),
        };
        Ok(Self {
            name,
            params: params.to_vec(),
            matrix,
        })
    }

    /// Wrap an arbitrary unitary as a gate.
    pub fn custom(name: impl Into<String>, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || !dim.is_power_of_two() || dim < 2 {
            return Err(QError::InvalidArgument(format!(
                "gate matrix must be square with power-of-two size, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if dim > 1 << MAX_GATE_ARITY {
            return Err(QError::InvalidArgument(format!(
                "gate arity {} exceeds {MAX_GATE_ARITY}",
                dim.trailing_zeros()
            )));
        }
        let defect = unitarity_defect(&matrix);
        if defect >= 1e-10 {
            return Err(QError::NotUnitary(defect));
        }
        Ok(Self {
            name: name.into(),
            params: Vec::new(),
            matrix,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn arity(&self) -> usize {
        self.matrix.nrows().trailing_zeros() as usize
    }

    /// True when the gate is one of the parsable built-ins.
    pub fn is_builtin(&self) -> bool {
        param_count(&self.name).is_some()
    }

    pub fn is_unitary(&self) -> bool {
        unitarity_defect(&self.matrix) < UNITARY_TOL
    }

    /// Conjugate transpose, renamed with a `†` suffix for custom gates.
    pub fn adjoint(&self) -> GateSpec {
        let inverse_name = match self.name.as_str() {
            "S" => Some(("SDG", vec![])),
            "SDG" => Some(("S", vec![])),
            "T" => Some(("TDG", vec![])),
            "TDG" => Some(("T", vec![])),
            "RK" => Some(("RKDG", self.params.clone())),
            "RKDG" => Some(("RK", self.params.clone())),
            "CRK" => Some(("CRKDG", self.params.clone())),
            "CRKDG" => Some(("CRK", self.params.clone())),
            "RX" | "RY" | "RZ" | "P" | "CP" | "CRZ" => {
                Some((self.name.as_str(), vec![-self.params[0]]))
            }
            "I" | "X" | "Y" | "Z" | "H" | "CNOT" | "CY" | "CZ" | "SWAP" | "TOFFOLI"
            | "FREDKIN" | "CCZ" => Some((self.name.as_str(), vec![])),
            _ => None,
        };
        if let Some((name, params)) = inverse_name {
            if let Ok(g) = GateSpec::named(name, &params) {
                return g;
            }
        }
        GateSpec {
            name: format!("{}†", self.name),
            params: Vec::new(),
            matrix: self.matrix.adjoint(),
        }
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for p in &self.params {
            write!(f, "({p})")?;
        }
        Ok(())
    }
}

/// Block-diagonal `diag(I, U)`: the first target becomes the control.
pub fn controlled(gate: &GateSpec) -> Result<GateSpec> {
    if gate.arity() + 1 > MAX_GATE_ARITY {
        return Err(QError::InvalidArgument(format!(
            "controlled({}) would have arity {} > {MAX_GATE_ARITY}",
            gate.name,
            gate.arity() + 1
        )));
    }
    Ok(GateSpec {
        name: format!("C{}", gate.name),
        params: gate.params.clone(),
        matrix: controlled_matrix(&gate.matrix),
    })
}

/// `diag(I, U)` without any arity cap.
pub fn controlled_matrix(u: &DMatrix<C64>) -> DMatrix<C64> {
    let d = u.nrows();
    let mut m = DMatrix::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(u);
    m
}

/// Kronecker product with `a` acting on the more significant qubits.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}
