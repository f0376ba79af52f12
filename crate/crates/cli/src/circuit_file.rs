//! Line-oriented circuit files: `GATE target [target ...] [param]`, `#`
//! comments, blank lines ignored.

use std::fmt::Write as _;

use qdesk_core::statevec::DEFAULT_QUBIT_CAP;
use qdesk_core::{Circuit, GateSpec, QError};

/// A parse failure pinned to a 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub error: QError,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.error)
    }
}

impl std::error::Error for ParseError {}

struct Line {
    number: usize,
    gate: GateSpec,
    targets: Vec<usize>,
}

fn parse_line(number: usize, text: &str) -> Result<Option<Line>, ParseError> {
    let err = |error| ParseError { line: number, error };
    let body = text.split('#').next().unwrap_or("").trim();
    let mut tokens = body.split_whitespace();
    let Some(name) = tokens.next() else {
        return Ok(None);
    };
    let mut rest: Vec<&str> = tokens.collect();
    // Built-in gates take zero or one parameter, so the name decides whether
    // the last token is an angle.
    let gate = match GateSpec::named(name, &[]) {
        Ok(g) => g,
        Err(QError::UnknownGate(g)) => return Err(err(QError::UnknownGate(g))),
        Err(_) => {
            let Some(raw) = rest.pop() else {
                return Err(err(QError::InvalidArgument(format!("gate `{name}` needs a parameter"))));
            };
            let value: f64 = raw
                .parse()
                .map_err(|_| err(QError::InvalidArgument(format!("malformed parameter `{raw}`"))))?;
            GateSpec::named(name, &[value]).map_err(err)?
        }
    };
    let targets = rest
        .iter()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| err(QError::InvalidArgument(format!("malformed target `{t}`"))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if targets.len() != gate.arity() {
        return Err(err(QError::ArityMismatch {
            gate: gate.name().to_string(),
            expected: gate.arity(),
            got: targets.len(),
        }));
    }
    Ok(Some(Line { number, gate, targets }))
}

/// Parse a circuit whose width is one more than its largest target.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    parse_circuit_with_width(text, None)
}

/// Parse with an explicit register width; targets must fit inside it.
pub fn parse_circuit_with_width(text: &str, width: Option<usize>) -> Result<Circuit, ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if let Some(l) = parse_line(i + 1, raw)? {
            lines.push(l);
        }
    }
    let cap = width.unwrap_or(DEFAULT_QUBIT_CAP);
    for l in &lines {
        if let Some(&t) = l.targets.iter().find(|&&t| t >= cap) {
            return Err(ParseError {
                line: l.number,
                error: QError::TargetOutOfRange {
                    index: t,
                    num_qubits: cap,
                },
            });
        }
    }
    let n = width.unwrap_or_else(|| {
        lines
            .iter()
            .flat_map(|l| l.targets.iter().copied())
            .max()
            .map_or(1, |m| m + 1)
    });
    let mut c = Circuit::new(n);
    for l in lines {
        c.push_gate(l.gate, &l.targets).map_err(|error| ParseError { line: l.number, error })?;
    }
    Ok(c)
}

/// Inverse of [`parse_circuit`] for circuits of built-in gates.
pub fn serialize_circuit(c: &Circuit) -> Result<String, QError> {
    let mut out = String::new();
    for op in c.ops() {
        let g = &op.gate;
        // custom matrices have no textual form
        if GateSpec::named(g.name(), g.params()).ok().as_ref() != Some(g) {
            return Err(QError::InvalidArgument(format!("gate `{}` has no text form", g.name())));
        }
        out.push_str(g.name());
        for t in &op.targets {
            write!(out, " {t}").expect("writing to a String");
        }
        for p in g.params() {
            write!(out, " {p}").expect("writing to a String");
        }
        out.push('\n');
    }
    Ok(out)
}
