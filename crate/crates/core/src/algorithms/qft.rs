use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{QError, Result};
use crate::statevec::{Circuit, QState};

/// Textbook QFT: H and controlled-R_k ladders, then the qubit-reversal swaps.
///
/// The dense unitary has entries `e^{2πi jk/2^n}/√(2^n)`.
pub fn qft_circuit(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(QError::InvalidArgument("QFT needs at least one qubit".into()));
    }
    let mut c = Circuit::new(n);
    for j in 0..n {
        c.push("H", &[j], &[])?;
        for k in 2..=(n - j) {
            c.push("CRK", &[j + k - 1, j], &[k as f64])?;
        }
    }
    for i in 0..n / 2 {
        c.push("SWAP", &[i, n - 1 - i], &[])?;
    }
    Ok(c)
}

/// Inverse QFT: the reversed circuit with every phase conjugated.
pub fn inverse_qft_circuit(n: usize) -> Result<Circuit> {
    Ok(qft_circuit(n)?.inverse())
}

/// Apply the (inverse) QFT to the leading `t` qubits with an FFT per
/// trailing-register value. Equivalent to the circuit, O(2^n · t).
pub fn apply_qft_leading(state: &QState, t: usize, inverse: bool) -> Result<QState> {
    let n = state.num_qubits();
    if t == 0 || t > n {
        return Err(QError::InvalidArgument(format!(
            "register of {t} qubits does not fit in {n}"
        )));
    }
    let q = 1usize << t;
    let rest = 1usize << (n - t);
    let mut planner = FftPlanner::<f64>::new();
    // rustfft's forward transform carries e^{-2πi jk/N}, i.e. the inverse QFT.
    let fft = if inverse {
        planner.plan_fft_forward(q)
    } else {
        planner.plan_fft_inverse(q)
    };
    let amps = state.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    let scale = (q as f64).sqrt().recip();
    let mut buf = vec![C64::new(0.0, 0.0); q];
    for y in 0..rest {
        for (k, b) in buf.iter_mut().enumerate() {
            *b = amps[k * rest + y];
        }
        fft.process(&mut buf);
        for (j, b) in buf.iter().enumerate() {
            out[j * rest + y] = b * scale;
        }
    }
    QState::from_unnormalized(out).and_then(|mut s| {
        s.set_cap(state.cap())?;
        Ok(s)
    })
}
