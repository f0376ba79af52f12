//! Small stabilizer codes: encoding, projective syndrome extraction,
//! lookup-table recovery and Monte-Carlo logical error rates.
//!
//! Qubits are numbered from 0, so the textbook `Z₁Z₂` is `ZZI` here.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::clifford::{Pauli, PauliString};
use crate::error::{QError, Result};
use crate::statevec::{Circuit, GateSpec, QState, NORM_TOL};

/// Fidelity below which a Monte-Carlo trial counts as a logical failure.
pub const LOGICAL_FAILURE_TOL: f64 = 1e-6;

/// Syndrome as a list of generator eigenvalues, `+1` or `-1`.
pub type Syndrome = Vec<i8>;

/// An `[[n, k, d]]` stabilizer code with a lookup decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerCode {
    name: String,
    n: usize,
    k: usize,
    d: usize,
    generators: Vec<PauliString>,
    logical_x: PauliString,
    logical_z: PauliString,
    encoder: Circuit,
    table: BTreeMap<Syndrome, PauliString>,
}

/// Syndrome of a Pauli error by commutation with each generator.
fn pauli_syndrome(generators: &[PauliString], e: &PauliString) -> Syndrome {
    generators
        .iter()
        .map(|g| if g.commutes_unchecked(e) { 1 } else { -1 })
        .collect()
}

impl StabilizerCode {
    /// Build a code from its generators. `corrections` seeds the decoder:
    /// each one is filed under the syndrome it produces, earlier entries
    /// winning, so list them by increasing weight.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        n: usize,
        k: usize,
        d: usize,
        generators: Vec<PauliString>,
        logical_x: PauliString,
        logical_z: PauliString,
        encoder: Circuit,
        corrections: &[PauliString],
    ) -> Result<Self> {
        if k == 0 || k > n || generators.len() != n - k {
            return Err(QError::InvalidArgument(format!(
                "an [[{n},{k}]] code needs {} generators, got {}",
                n.saturating_sub(k),
                generators.len()
            )));
        }
        if k != 1 {
            return Err(QError::InvalidArgument("only single-logical-qubit codes are supported".into()));
        }
        if encoder.num_qubits() != n {
            return Err(QError::SizeMismatch {
                expected: n,
                got: encoder.num_qubits(),
            });
        }
        let all = generators.iter().chain([&logical_x, &logical_z]);
        for p in all.clone().chain(corrections) {
            if p.num_qubits() != n {
                return Err(QError::SizeMismatch {
                    expected: n,
                    got: p.num_qubits(),
                });
            }
        }
        for p in all {
            if !p.is_hermitian() {
                return Err(QError::InvalidArgument(format!("{p} is not Hermitian")));
            }
        }
        for (i, g) in generators.iter().enumerate() {
            for h in &generators[i + 1..] {
                if !g.commutes_unchecked(h) {
                    return Err(QError::InvalidArgument(format!("generators {g} and {h} anticommute")));
                }
            }
            if !g.commutes_unchecked(&logical_x) || !g.commutes_unchecked(&logical_z) {
                return Err(QError::InvalidArgument(format!(
                    "generator {g} does not commute with the logical operators"
                )));
            }
        }
        if logical_x.commutes_unchecked(&logical_z) {
            return Err(QError::InvalidArgument("logical X and Z must anticommute".into()));
        }
        let mut table = BTreeMap::new();
        table.insert(vec![1; n - k], PauliString::identity(n));
        for c in corrections {
            table.entry(pauli_syndrome(&generators, c)).or_insert_with(|| c.clone());
        }
        Ok(Self {
            name: name.to_string(),
            n,
            k,
            d,
            generators,
            logical_x,
            logical_z,
            encoder,
            table,
        })
    }

    /// Three-qubit bit-flip code: `α|000> + β|111>`.
    pub fn bit_flip() -> Self {
        let mut enc = Circuit::new(3);
        enc.push("CNOT", &[0, 1], &[]).expect("valid");
        enc.push("CNOT", &[0, 2], &[]).expect("valid");
        let gens = vec![p("ZZI"), p("IZZ")];
        let fixes: Vec<_> = (0..3).map(|q| single(3, q, Pauli::X)).collect();
        Self::new("bitflip", 3, 1, 1, gens, p("XXX"), p("ZII"), enc, &fixes).expect("valid code")
    }

    /// Three-qubit phase-flip code: `α|+++> + β|--->`.
    pub fn phase_flip() -> Self {
        let mut enc = Circuit::new(3);
        enc.push("CNOT", &[0, 1], &[]).expect("valid");
        enc.push("CNOT", &[0, 2], &[]).expect("valid");
        for q in 0..3 {
            enc.push("H", &[q], &[]).expect("valid");
        }
        let gens = vec![p("XXI"), p("IXX")];
        let fixes: Vec<_> = (0..3).map(|q| single(3, q, Pauli::Z)).collect();
        Self::new("phaseflip", 3, 1, 1, gens, p("ZZZ"), p("XII"), enc, &fixes).expect("valid code")
    }

    /// Nine-qubit Shor code: phase-flip code with each qubit bit-flip encoded.
    ///
    /// The decoder pairs a bit-flip fix inside a block with a phase fix on a
    /// whole block, `Z_aZ_bZ_c`.
    pub fn shor9() -> Self {
        let mut enc = Circuit::new(9);
        enc.push("CNOT", &[0, 3], &[]).expect("valid");
        enc.push("CNOT", &[0, 6], &[]).expect("valid");
        for b in [0, 3, 6] {
            enc.push("H", &[b], &[]).expect("valid");
        }
        for b in [0, 3, 6] {
            enc.push("CNOT", &[b, b + 1], &[]).expect("valid");
            enc.push("CNOT", &[b, b + 2], &[]).expect("valid");
        }
        let gens = vec![
            p("ZZIIIIIII"),
            p("IZZIIIIII"),
            p("IIIZZIIII"),
            p("IIIIZZIII"),
            p("IIIIIIZZI"),
            p("IIIIIIIZZ"),
            p("XXXXXXIII"),
            p("IIIXXXXXX"),
        ];
        let mut phase_fixes = vec![PauliString::identity(9)];
        for b in [0, 3, 6] {
            phase_fixes.push(PauliString::on(9, &[b, b + 1, b + 2], Pauli::Z).expect("valid"));
        }
        let mut bit_fixes = vec![PauliString::identity(9)];
        bit_fixes.extend((0..9).map(|q| single(9, q, Pauli::X)));
        let mut fixes = Vec::new();
        for z in &phase_fixes {
            for x in &bit_fixes {
                fixes.push(z.mul(x).expect("same size"));
            }
        }
        fixes.sort_by_key(|f| f.weight());
        Self::new("shor9", 9, 1, 3, gens, p("ZZZZZZZZZ"), p("XXXXXXXXX"), enc, &fixes)
            .expect("valid code")
    }

    /// Built-in code by name: `bitflip`, `phaseflip` or `shor9`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "bitflip" | "bit" | "3bit" => Ok(Self::bit_flip()),
            "phaseflip" | "phase" | "3phase" => Ok(Self::phase_flip()),
            "shor9" | "shor" | "9" => Ok(Self::shor9()),
            _ => Err(QError::InvalidArgument(format!(
                "unknown code `{name}` (expected bitflip, phaseflip or shor9)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Declared distance. The three-qubit codes are distance 1 against
    /// arbitrary Paulis but correct any single error of their own type.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    pub fn encoder(&self) -> &Circuit {
        &self.encoder
    }

    pub fn decoder_table(&self) -> &BTreeMap<Syndrome, PauliString> {
        &self.table
    }

    /// Syndrome a Pauli error would produce, from commutation alone.
    pub fn syndrome_of(&self, e: &PauliString) -> Result<Syndrome> {
        if e.num_qubits() != self.n {
            return Err(QError::SizeMismatch {
                expected: self.n,
                got: e.num_qubits(),
            });
        }
        Ok(pauli_syndrome(&self.generators, e))
    }

    /// All `2^(n-k)` elements of the stabilizer group with exact signs.
    pub fn stabilizer_group(&self) -> Vec<PauliString> {
        let mut group = vec![PauliString::identity(self.n)];
        for g in &self.generators {
            let more: Vec<_> = group.iter().map(|s| s.mul(g).expect("same size")).collect();
            group.extend(more);
        }
        group
    }
}

fn p(s: &str) -> PauliString {
    s.parse().expect("valid Pauli literal")
}

fn single(n: usize, q: usize, l: Pauli) -> PauliString {
    PauliString::single(n, q, l).expect("in range")
}

/// `α|0_L> + β|1_L>` through the code's encoder.
pub fn encode(code: &StabilizerCode, alpha: C64, beta: C64) -> Result<QState> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(QError::NotNormalized(norm));
    }
    let mut s = QState::qubit(alpha, beta)?;
    if code.n > 1 {
        s = s.tensor(&QState::zero(code.n - 1)?)?;
    }
    s.apply_circuit(&code.encoder)?;
    Ok(s)
}

/// Measure every generator in order as a Hermitian observable.
pub fn syndrome_extract<R: Rng + ?Sized>(
    code: &StabilizerCode,
    state: &QState,
    rng: &mut R,
) -> Result<(Syndrome, QState)> {
    if state.num_qubits() != code.n {
        return Err(QError::SizeMismatch {
            expected: code.n,
            got: state.num_qubits(),
        });
    }
    let mut post = state.clone();
    let mut syndrome = Vec::with_capacity(code.generators.len());
    for g in &code.generators {
        syndrome.push(post.measure_pauli(g, None, rng)?.0);
    }
    Ok((syndrome, post))
}

/// Decoder lookup.
pub fn recover(code: &StabilizerCode, syndrome: &[i8]) -> Result<PauliString> {
    if syndrome.len() != code.generators.len() {
        return Err(QError::SizeMismatch {
            expected: code.generators.len(),
            got: syndrome.len(),
        });
    }
    code.table
        .get(syndrome)
        .cloned()
        .ok_or_else(|| QError::UnknownSyndrome(syndrome.to_vec()))
}

/// A disturbance applied between encoding and syndrome extraction.
#[derive(Clone, Debug, PartialEq)]
pub enum ErrorEvent {
    Pauli(PauliString),
    /// An arbitrary one-qubit gate such as `R_x(θ)`.
    Gate { qubit: usize, gate: GateSpec },
}

impl ErrorEvent {
    pub fn rx(qubit: usize, theta: f64) -> Result<Self> {
        Ok(Self::Gate {
            qubit,
            gate: GateSpec::named("RX", &[theta])?,
        })
    }

    pub fn rz(qubit: usize, theta: f64) -> Result<Self> {
        Ok(Self::Gate {
            qubit,
            gate: GateSpec::named("RZ", &[theta])?,
        })
    }

    fn apply(&self, state: &mut QState) -> Result<()> {
        match self {
            ErrorEvent::Pauli(e) => state.apply_pauli(e),
            ErrorEvent::Gate { qubit, gate } => state.apply_gate(gate, &[*qubit]),
        }
    }
}

impl fmt::Display for ErrorEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorEvent::Pauli(e) => write!(f, "{e}"),
            ErrorEvent::Gate { qubit, gate } => write!(f, "{gate} on qubit {qubit}"),
        }
    }
}

/// Everything one correction cycle produced.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleOutcome {
    pub syndrome: Syndrome,
    pub correction: PauliString,
    pub state: QState,
}

/// Error, extract, look up, correct. No restriction on the error; an
/// unknown syndrome surfaces as `UnknownSyndrome`.
pub fn run_cycle<R: Rng + ?Sized>(
    code: &StabilizerCode,
    state: &QState,
    error: &ErrorEvent,
    rng: &mut R,
) -> Result<CycleOutcome> {
    let mut s = state.clone();
    error.apply(&mut s)?;
    let (syndrome, mut post) = syndrome_extract(code, &s, rng)?;
    let correction = recover(code, &syndrome)?;
    post.apply_pauli(&correction)?;
    Ok(CycleOutcome {
        syndrome,
        correction,
        state: post,
    })
}

/// One correction cycle for an error on at most one qubit.
pub fn correct_cycle<R: Rng + ?Sized>(
    code: &StabilizerCode,
    state: &QState,
    error: &ErrorEvent,
    rng: &mut R,
) -> Result<QState> {
    match error {
        ErrorEvent::Pauli(e) if e.weight() > 1 => {
            return Err(QError::Uncorrectable(format!(
                "{e} acts on {} qubits; the cycle handles single-qubit errors",
                e.weight()
            )));
        }
        ErrorEvent::Gate { gate, .. } if gate.arity() != 1 => {
            return Err(QError::Uncorrectable(format!("{gate} is not a single-qubit error")));
        }
        _ => {}
    }
    Ok(run_cycle(code, state, error, rng)?.state)
}

/// Independent per-qubit Pauli noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    BitFlip,
    PhaseFlip,
    /// X, Y and Z each with probability `p/3`.
    Depolarizing,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliErrorModel {
    pub p: f64,
    pub kind: NoiseKind,
}

impl PauliErrorModel {
    pub fn new(p: f64, kind: NoiseKind) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(QError::InvalidArgument(format!("error probability must be in [0, 1], got {p}")));
        }
        Ok(Self { p, kind })
    }

    /// Per-qubit letter probabilities `(I, X, Y, Z)`.
    fn letter_probs(&self) -> [(Pauli, f64); 4] {
        let p = self.p;
        match self.kind {
            NoiseKind::BitFlip => [(Pauli::I, 1.0 - p), (Pauli::X, p), (Pauli::Y, 0.0), (Pauli::Z, 0.0)],
            NoiseKind::PhaseFlip => [(Pauli::I, 1.0 - p), (Pauli::X, 0.0), (Pauli::Y, 0.0), (Pauli::Z, p)],
            NoiseKind::Depolarizing => [
                (Pauli::I, 1.0 - p),
                (Pauli::X, p / 3.0),
                (Pauli::Y, p / 3.0),
                (Pauli::Z, p / 3.0),
            ],
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> PauliString {
        let probs = self.letter_probs();
        let letters: Vec<Pauli> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(l, w) in &probs[1..] {
                    acc += w;
                    if u < acc {
                        return l;
                    }
                }
                Pauli::I
            })
            .collect();
        PauliString::from_letters(&letters)
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bitflip" | "bit" | "x" => Ok(NoiseKind::BitFlip),
            "phaseflip" | "phase" | "z" => Ok(NoiseKind::PhaseFlip),
            "depolarizing" | "depol" => Ok(NoiseKind::Depolarizing),
            _ => Err(QError::InvalidArgument(format!("unknown noise model `{s}`"))),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseKind::BitFlip => "bitflip",
            NoiseKind::PhaseFlip => "phaseflip",
            NoiseKind::Depolarizing => "depolarizing",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalErrorEstimate {
    pub rate: f64,
    pub stderr: f64,
    pub failures: usize,
    pub trials: usize,
}

/// Logical state used by the Monte-Carlo: generic enough that neither
/// logical X nor logical Z leaves it invariant.
pub fn probe_amplitudes() -> (C64, C64) {
    (
        C64::new(0.4_f64.cos(), 0.0),
        C64::from_polar(0.4_f64.sin(), 0.9),
    )
}

const TRIALS_PER_STREAM: usize = 4096;

/// Monte-Carlo logical error rate: each trial samples iid Pauli noise,
/// runs a full cycle on the statevector and fails when the fidelity with
/// the encoded probe drops below `1 - 1e-6` or the syndrome is unknown.
///
/// Trials run in fixed blocks, each on its own ChaCha stream keyed from
/// one draw of `rng`, so results do not depend on the thread count.
pub fn logical_error_rate<R: Rng + ?Sized>(
    code: &StabilizerCode,
    model: &PauliErrorModel,
    trials: usize,
    rng: &mut R,
) -> Result<LogicalErrorEstimate> {
    if trials == 0 {
        return Err(QError::InvalidArgument("trials must be at least 1".into()));
    }
    let (alpha, beta) = probe_amplitudes();
    let reference = encode(code, alpha, beta)?;
    let base: u64 = rng.random();
    let blocks = trials.div_ceil(TRIALS_PER_STREAM);
    let counts: Vec<Result<usize>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = ChaCha8Rng::seed_from_u64(base);
            r.set_stream(b as u64);
            let count = TRIALS_PER_STREAM.min(trials - b * TRIALS_PER_STREAM);
            let mut failures = 0;
            for _ in 0..count {
                let e = model.sample(code.n, &mut r);
                if e.weight() == 0 {
                    continue;
                }
                match run_cycle(code, &reference, &ErrorEvent::Pauli(e), &mut r) {
                    Ok(out) => {
                        if out.state.fidelity(&reference)? < 1.0 - LOGICAL_FAILURE_TOL {
                            failures += 1;
                        }
                    }
                    Err(QError::UnknownSyndrome(_)) => failures += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(failures)
        })
        .collect();
    let mut failures = 0;
    for c in counts {
        failures += c?;
    }
    let rate = failures as f64 / trials as f64;
    Ok(LogicalErrorEstimate {
        rate,
        stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
        failures,
        trials,
    })
}

/// Exact logical failure probability by enumerating every Pauli error
/// pattern. Uses the stabilizer algebra rather than the statevector: the
/// residual `correction · error` fails iff it anticommutes with a logical
/// operator or its syndrome is missing from the table.
pub fn exact_logical_error_rate(code: &StabilizerCode, model: &PauliErrorModel) -> Result<f64> {
    let probs: Vec<(Pauli, f64)> = model
        .letter_probs()
        .into_iter()
        .filter(|&(_, w)| w > 0.0)
        .collect();
    let patterns = (probs.len() as u128).pow(code.n as u32);
    if patterns > 1 << 22 {
        return Err(QError::CombinatorialBlowup(patterns));
    }
    let mut total = 0.0;
    let mut letters = vec![Pauli::I; code.n];
    for idx in 0..patterns as usize {
        let mut rest = idx;
        let mut w = 1.0;
        for l in letters.iter_mut() {
            let (letter, pl) = probs[rest % probs.len()];
            rest /= probs.len();
            *l = letter;
            w *= pl;
        }
        let e = PauliString::from_letters(&letters);
        let fails = match code.table.get(&pauli_syndrome(&code.generators, &e)) {
            None => true,
            Some(c) => {
                let residual = c.mul(&e)?;
                !residual.commutes_unchecked(&code.logical_x)
                    || !residual.commutes_unchecked(&code.logical_z)
            }
        };
        if fails {
            total += w;
        }
    }
    Ok(total)
}

/// Least-squares `c` in `rate ≈ c·p²`.
pub fn fit_quadratic_constant(points: &[(f64, f64)]) -> f64 {
    let num: f64 = points.iter().map(|(p, r)| r * p * p).sum();
    let den: f64 = points.iter().map(|(p, _)| p.powi(4)).sum();
    num / den
}

/// Check that every product `E_j†E_k` of the error set either anticommutes
/// with some generator or is an element of the stabilizer group.
pub fn knill_laflamme_holds(code: &StabilizerCode, errors: &[PauliString]) -> Result<bool> {
    let group = code.stabilizer_group();
    for ej in errors {
        let ej_dag = ej.clone().with_phase((4 - ej.phase()) % 4);
        for ek in errors {
            let prod = ej_dag.mul(ek)?;
            let detected = code.generators.iter().any(|g| !g.commutes_unchecked(&prod));
            if !detected && !group.contains(&prod) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
