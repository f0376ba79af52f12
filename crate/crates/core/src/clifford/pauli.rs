use std::fmt;
use std::str::FromStr;

use crate::error::{QError, Result};

/// Phase-tracked Pauli string `i^phase · P_0 ⊗ P_1 ⊗ ... ⊗ P_{n-1}`.
///
/// Each factor is stored by its `(x, z)` bits with `(1, 1)` meaning the
/// Hermitian letter `Y = iXZ`, so `phase ∈ {0, 2}` exactly for Hermitian
/// strings and the operator `Y` has phase 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        match ch.to_ascii_uppercase() {
            'I' | '_' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            phase: 0,
        }
    }

    /// A single letter on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Result<Self> {
        let mut s = Self::identity(n);
        s.set(q, p)?;
        Ok(s)
    }

    /// Product of the same letter on each listed qubit.
    pub fn on(n: usize, qubits: &[usize], p: Pauli) -> Result<Self> {
        let mut s = Self::identity(n);
        for &q in qubits {
            s.set(q, p)?;
        }
        Ok(s)
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut s = Self::identity(letters.len());
        for (q, &p) in letters.iter().enumerate() {
            s.put(q, p);
        }
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Exponent `k` of the leading `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, k: u8) -> Self {
        self.phase = k % 4;
        self
    }

    pub fn negated(self) -> Self {
        let k = self.phase + 2;
        self.with_phase(k)
    }

    /// `+1` or `-1` for Hermitian strings.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn x(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn z(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x(q), self.z(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) -> Result<()> {
        if q >= self.n {
            return Err(QError::TargetOutOfRange {
                index: q,
                num_qubits: self.n,
            });
        }
        self.put(q, p);
        Ok(())
    }

    fn put(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.set_x(q, x);
        self.set_z(q, z);
    }

    pub(crate) fn set_x(&mut self, q: usize, v: bool) {
        let m = 1u64 << (q % 64);
        if v {
            self.x[q / 64] |= m;
        } else {
            self.x[q / 64] &= !m;
        }
    }

    pub(crate) fn set_z(&mut self, q: usize, v: bool) {
        let m = 1u64 << (q % 64);
        if v {
            self.z[q / 64] |= m;
        } else {
            self.z[q / 64] &= !m;
        }
    }

    pub(crate) fn flip_sign(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.weight() == 0
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x(q) || self.z(q)).collect()
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(QError::SizeMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    /// Symplectic test: commute iff the count of anticommuting factors is even.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_size(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        parity == 0
    }

    /// Operator product `self · other` with exact phase.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let mut out = self.clone();
        out.mul_assign_right(other);
        Ok(out)
    }

    /// `self ← self · other`; sizes must already agree.
    pub(crate) fn mul_assign_right(&mut self, other: &Self) {
        let mut k = self.phase as i64 + other.phase as i64;
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            // σ_a σ_b = i^{±1} σ_c for distinct non-identity letters, cyclic in X→Y→Z.
            let plus = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
            let minus = (x1 & !z1 & !x2 & z2) | (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2);
            k += plus.count_ones() as i64 - minus.count_ones() as i64;
            self.x[w] = x1 ^ x2;
            self.z[w] = z1 ^ z2;
        }
        self.phase = k.rem_euclid(4) as u8;
    }

    /// Dense `2^n × 2^n` matrix with qubit 0 as the most significant factor.
    pub fn to_matrix(&self) -> nalgebra::DMatrix<num_complex::Complex64> {
        use num_complex::Complex64 as C64;
        let single = |p: Pauli| -> nalgebra::DMatrix<C64> {
            let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
            let e = match p {
                Pauli::I => [o, z, z, o],
                Pauli::X => [z, o, o, z],
                Pauli::Y => [z, -i, i, z],
                Pauli::Z => [o, z, z, -o],
            };
            nalgebra::DMatrix::from_row_slice(2, 2, &e)
        };
        let mut m = nalgebra::DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for q in 0..self.n {
            m = m.kronecker(&single(self.letter(q)));
        }
        let k = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        m * k[self.phase as usize]
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}")?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QError;

    /// Accepts an optional `+`, `-`, `i`, `+i` or `-i` prefix then letters `IXYZ`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (phase, body) = if let Some(r) = t.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = t.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (0, r)
        } else {
            (0, t)
        };
        if body.is_empty() {
            return Err(QError::InvalidArgument(format!("empty Pauli string `{s}`")));
        }
        let letters = body
            .chars()
            .map(|ch| {
                Pauli::from_char(ch).ok_or_else(|| {
                    QError::InvalidArgument(format!("bad Pauli letter `{ch}` in `{s}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(&letters).with_phase(phase))
    }
}
