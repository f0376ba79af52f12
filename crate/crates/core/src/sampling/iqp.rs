use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::seq::index::sample;
use rand::Rng;

use crate::error::{QError, Result};
use crate::mbqc::measure_rotated_remove;
use crate::statevec::{sample_from_probs, GateSpec, QState, DEFAULT_QUBIT_CAP};

/// Diagonal gates allowed between the two Hadamard layers.
#[derive(Clone, Debug, PartialEq)]
pub enum IqpGate {
    /// `diag(1, 1, 1, i)`.
    SqrtCz(usize, usize),
    /// `T^k = diag(1, e^{iπk/4})`.
    TPow { qubit: usize, k: u8 },
    Z(usize),
    Cz(usize, usize),
    Ccz(usize, usize, usize),
}

impl IqpGate {
    pub fn targets(&self) -> Vec<usize> {
        match *self {
            IqpGate::SqrtCz(a, b) | IqpGate::Cz(a, b) => vec![a, b],
            IqpGate::TPow { qubit, .. } | IqpGate::Z(qubit) => vec![qubit],
            IqpGate::Ccz(a, b, c) => vec![a, b, c],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            IqpGate::SqrtCz(..) => "SQRTCZ",
            IqpGate::TPow { .. } => "TPOW",
            IqpGate::Z(_) => "Z",
            IqpGate::Cz(..) => "CZ",
            IqpGate::Ccz(..) => "CCZ",
        }
    }

    /// Phase picked up by basis index `z` of an `n`-qubit register.
    pub fn phase(&self, z: usize, n: usize) -> C64 {
        let bit = |q: usize| z >> (n - 1 - q) & 1 == 1;
        let one = C64::new(1.0, 0.0);
        match *self {
            IqpGate::SqrtCz(a, b) if bit(a) && bit(b) => C64::new(0.0, 1.0),
            IqpGate::TPow { qubit, k } if bit(qubit) => C64::from_polar(1.0, PI * f64::from(k) / 4.0),
            IqpGate::Z(q) if bit(q) => -one,
            IqpGate::Cz(a, b) if bit(a) && bit(b) => -one,
            IqpGate::Ccz(a, b, c) if bit(a) && bit(b) && bit(c) => -one,
            _ => one,
        }
    }

    /// The same gate as a statevector gate acting on [`targets`](Self::targets).
    pub fn gate_spec(&self) -> Result<GateSpec> {
        match *self {
            IqpGate::SqrtCz(..) => GateSpec::named("SQRTCZ", &[]),
            IqpGate::TPow { k, .. } => {
                let m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    C64::new(1.0, 0.0),
                    C64::from_polar(1.0, PI * f64::from(k) / 4.0),
                ]));
                GateSpec::custom(format!("T^{k}"), m)
            }
            IqpGate::Z(_) => GateSpec::named("Z", &[]),
            IqpGate::Cz(..) => GateSpec::named("CZ", &[]),
            IqpGate::Ccz(..) => GateSpec::named("CCZ", &[]),
        }
    }
}

/// Gate set 1 is `{√CZ, T^k}`, gate set 2 is `{Z, CZ, CCZ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IqpGateSet {
    SqrtCzT,
    ZCzCcz,
}

impl IqpGateSet {
    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            1 => Ok(IqpGateSet::SqrtCzT),
            2 => Ok(IqpGateSet::ZCzCcz),
            _ => Err(QError::InvalidArgument(format!("IQP gate set must be 1 or 2, got {tag}"))),
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            IqpGateSet::SqrtCzT => 1,
            IqpGateSet::ZCzCcz => 2,
        }
    }

    pub fn allows(self, g: &IqpGate) -> bool {
        matches!(
            (self, g),
            (IqpGateSet::SqrtCzT, IqpGate::SqrtCz(..) | IqpGate::TPow { .. })
                | (IqpGateSet::ZCzCcz, IqpGate::Z(_) | IqpGate::Cz(..) | IqpGate::Ccz(..))
        )
    }
}

impl FromStr for IqpGateSet {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<u8>()
            .map_err(|_| QError::InvalidArgument(format!("IQP gate set must be 1 or 2, got {s:?}")))
            .and_then(Self::from_tag)
    }
}

impl fmt::Display for IqpGateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

/// `H^⊗n D H^⊗n` with `D` a product of diagonal gates.
#[derive(Clone, Debug, PartialEq)]
pub struct IqpCircuit {
    n: usize,
    gates: Vec<IqpGate>,
    gateset: IqpGateSet,
}

impl IqpCircuit {
    pub fn new(n: usize, gates: Vec<IqpGate>, gateset: IqpGateSet) -> Result<Self> {
        if n == 0 {
            return Err(QError::InvalidArgument("need at least one qubit".into()));
        }
        for g in &gates {
            if !gateset.allows(g) {
                return Err(QError::InvalidArgument(format!(
                    "{} is not in gate set {gateset}",
                    g.name()
                )));
            }
            if let IqpGate::TPow { k, .. } = g {
                if *k >= 8 {
                    return Err(QError::InvalidArgument(format!("T power {k} is not reduced mod 8")));
                }
            }
            let t = g.targets();
            for (i, &q) in t.iter().enumerate() {
                if q >= n {
                    return Err(QError::TargetOutOfRange {
                        index: q,
                        num_qubits: n,
                    });
                }
                if t[..i].contains(&q) {
                    return Err(QError::DuplicateTarget(q));
                }
            }
        }
        Ok(Self { n, gates, gateset })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[IqpGate] {
        &self.gates
    }

    pub fn gateset(&self) -> IqpGateSet {
        self.gateset
    }

    pub fn state(&self) -> Result<QState> {
        if self.n > DEFAULT_QUBIT_CAP {
            return Err(QError::CapExceeded {
                requested: self.n,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        let n = self.n;
        let mut s = QState::plus(n)?;
        s.apply_diagonal(|z| self.gates.iter().map(|g| g.phase(z, n)).product());
        for q in 0..n {
            s.apply_named("H", &[q], &[])?;
        }
        Ok(s)
    }

    /// `P_x = |<x|H^⊗n D H^⊗n|0…0>|²`.
    pub fn distribution(&self) -> Result<Vec<f64>> {
        Ok(self.state()?.probabilities())
    }
}

/// `depth` gates drawn uniformly from the gate set, each on uniformly
/// chosen distinct qubits; gates that do not fit on `n` qubits are skipped
/// in the draw.
pub fn iqp_random<R: Rng + ?Sized>(
    n: usize,
    gateset: IqpGateSet,
    depth: usize,
    rng: &mut R,
) -> Result<IqpCircuit> {
    if n == 0 {
        return Err(QError::InvalidArgument("need at least one qubit".into()));
    }
    let kinds: &[usize] = match (gateset, n) {
        (IqpGateSet::SqrtCzT, 1) => &[1],
        (IqpGateSet::SqrtCzT, _) => &[2, 1],
        (IqpGateSet::ZCzCcz, 1) => &[1],
        (IqpGateSet::ZCzCcz, 2) => &[1, 2],
        (IqpGateSet::ZCzCcz, _) => &[1, 2, 3],
    };
    let mut gates = Vec::with_capacity(depth);
    for _ in 0..depth {
        let arity = kinds[rng.random_range(0..kinds.len())];
        let t = sample(rng, n, arity).into_vec();
        gates.push(match (gateset, arity) {
            (IqpGateSet::SqrtCzT, 1) => IqpGate::TPow {
                qubit: t[0],
                k: rng.random_range(1..8),
            },
            (IqpGateSet::SqrtCzT, _) => IqpGate::SqrtCz(t[0], t[1]),
            (IqpGateSet::ZCzCcz, 1) => IqpGate::Z(t[0]),
            (IqpGateSet::ZCzCcz, 2) => IqpGate::Cz(t[0], t[1]),
            (IqpGateSet::ZCzCcz, _) => IqpGate::Ccz(t[0], t[1], t[2]),
        });
    }
    IqpCircuit::new(n, gates, gateset)
}

/// Sampled basis indices and the exact distribution they came from.
pub fn iqp_sample<R: Rng + ?Sized>(c: &IqpCircuit, shots: usize, rng: &mut R) -> Result<(Vec<usize>, Vec<f64>)> {
    let dist = c.distribution()?;
    Ok((sample_from_probs(&dist, shots, rng), dist))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadgetOutcome {
    /// Probability of reading `+` on the data qubit.
    pub p_plus: f64,
    /// Output conditioned on `+`: `H|ψ>`.
    pub plus_state: QState,
    /// Output conditioned on `−`: `XH|ψ>`.
    pub minus_state: QState,
    /// One sampled outcome, 0 for `+`.
    pub sampled: u8,
}

/// Hadamard gadget: ancilla `|+>`, CZ with the data qubit, X-basis readout
/// of the data qubit.
pub fn hadamard_gadget<R: Rng + ?Sized>(psi: &QState, rng: &mut R) -> Result<GadgetOutcome> {
    if psi.num_qubits() != 1 {
        return Err(QError::SizeMismatch {
            expected: 1,
            got: psi.num_qubits(),
        });
    }
    let mut s = psi.tensor(&QState::plus(1)?)?;
    s.apply_named("CZ", &[0, 1], &[])?;
    let (_, p_plus, plus_state) = measure_rotated_remove(&s, 0, 0.0, Some(0), rng)?;
    let (_, _, minus_state) = measure_rotated_remove(&s, 0, 0.0, Some(1), rng)?;
    let sampled = u8::from(rng.random::<f64>() >= p_plus);
    Ok(GadgetOutcome {
        p_plus,
        plus_state,
        minus_state,
        sampled,
    })
}
