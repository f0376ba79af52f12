//! Command-line front end: argument definitions, report documents and the
//! dispatcher shared by the `qdesk` binary and its tests.

pub mod circuit_file;
mod commands;
pub mod problem_file;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use qdesk_core::QError;

pub use circuit_file::{parse_circuit, parse_circuit_with_width, serialize_circuit, ParseError};
pub use problem_file::{parse_hamiltonian, ProblemFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME_LIMIT: i32 = 3;
pub const EXIT_ALGORITHM_FAILURE: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "qdesk", version, about = "Desk-scale quantum computing experiments")]
pub struct Cli {
    /// Seed for every random draw; echoed in the report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Measurement shots for sampled outputs.
    #[arg(long, global = true, default_value_t = 1024)]
    pub shots: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Leave out the wall-time field so repeated runs compare byte for byte.
    #[arg(long, global = true)]
    pub omit_wall_time: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a circuit file and sample it.
    Run {
        file: PathBuf,
        /// Register width; defaults to one more than the largest target.
        #[arg(long)]
        qubits: Option<usize>,
    },
    /// Grover search for a single marked item.
    Grover {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        marked: usize,
        /// Defaults to the optimal count.
        #[arg(long)]
        iterations: Option<u64>,
    },
    /// Factor a composite with simulated order finding.
    Shor {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 10)]
        max_attempts: usize,
        #[arg(long)]
        counting_qubits: Option<usize>,
    },
    /// Monte-Carlo logical error rate of a small code.
    Qec {
        /// bitflip, phaseflip or shor9.
        #[arg(long)]
        code: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Defaults to the noise the code is built for.
        #[arg(long, value_enum)]
        noise: Option<Noise>,
    },
    /// Optimize QAOA angles for a problem file.
    Qaoa {
        #[arg(long)]
        problem_file: PathBuf,
        #[arg(long, default_value_t = 1)]
        p_depth: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
    /// Trotterized linear anneal.
    Anneal {
        #[arg(long, default_value_t = 10.0)]
        tau: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Defaults to the five-vertex Max-Cut demo graph.
        #[arg(long)]
        problem_file: Option<PathBuf>,
    },
    /// Variational ground-energy search.
    Vqe {
        #[arg(long)]
        hamiltonian_file: PathBuf,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, value_enum, default_value_t = EntanglerArg::Line)]
        entangler: EntanglerArg,
    },
    /// Measurement-based single-qubit rotation and CNOT gadgets.
    MbqcDemo {
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.7, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, default_value_t = 1.1, allow_negative_numbers = true)]
        gamma: f64,
    },
    /// Sample an IQP circuit or a boson-sampling interferometer.
    Sample(SampleArgs),
    /// Spectral gap along `H(s) = (1−s)H0 + sH1`.
    GapScan {
        /// Hamiltonian file for H0; defaults to −X.
        #[arg(long)]
        h0: Option<PathBuf>,
        /// Hamiltonian file for H1; defaults to −Z.
        #[arg(long)]
        h1: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
    },
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(subcommand)]
    pub model: SampleModel,
}

#[derive(Debug, Subcommand)]
pub enum SampleModel {
    Iqp {
        #[arg(long)]
        qubits: usize,
        /// 1 for {√CZ, T^k}, 2 for {Z, CZ, CCZ}.
        #[arg(long, default_value_t = 1)]
        gateset: u8,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    Boson {
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        photons: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Noise {
    Bitflip,
    Phaseflip,
    Depolarizing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EntanglerArg {
    Line,
    Ring,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Run { .. } => "run",
            Command::Grover { .. } => "grover",
            Command::Shor { .. } => "shor",
            Command::Qec { .. } => "qec",
            Command::Qaoa { .. } => "qaoa",
            Command::Anneal { .. } => "anneal",
            Command::Vqe { .. } => "vqe",
            Command::MbqcDemo { .. } => "mbqc-demo",
            Command::Sample(SampleArgs { model: SampleModel::Iqp { .. } }) => "sample-iqp",
            Command::Sample(SampleArgs { model: SampleModel::Boson { .. } }) => "sample-boson",
            Command::GapScan { .. } => "gap-scan",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Core(QError),
}

impl From<QError> for CliError {
    fn from(e: QError) -> Self {
        CliError::Core(e)
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        if e.line == 0 {
            CliError::Core(e.error)
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Core(e) if e.is_resource_limit() => EXIT_RUNTIME_LIMIT,
            CliError::Core(e) if e.is_algorithm_failure() => EXIT_ALGORITHM_FAILURE,
            CliError::Core(_) => EXIT_VALIDATION,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_RUNTIME_LIMIT => "runtime_limit",
            EXIT_ALGORITHM_FAILURE => "algorithm_failure",
            _ => "validation",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Validation(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }

    /// Machine-readable error document.
    pub fn to_json(&self, command: Option<&str>, seed: Option<u64>) -> Value {
        let mut err = Map::new();
        err.insert("kind".into(), json!(self.kind()));
        err.insert("message".into(), json!(self.message()));
        err.insert("exit_code".into(), json!(self.exit_code()));
        let mut doc = Map::new();
        doc.insert("error".into(), Value::Object(err));
        if let Some(c) = command {
            doc.insert("command".into(), json!(c));
        }
        if let Some(s) = seed {
            doc.insert("seed".into(), json!(s));
        }
        Value::Object(doc)
    }
}

/// What one subcommand produced, before rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub shots: usize,
    pub inputs: Value,
    pub results: Value,
    pub wall_time_s: Option<f64>,
    /// Human-readable table.
    pub text: String,
    /// Plot-ready rows, for commands with a histogram or curve.
    pub csv: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("command".into(), json!(self.command));
        doc.insert("seed".into(), json!(self.seed));
        doc.insert("shots".into(), json!(self.shots));
        doc.insert("inputs".into(), self.inputs.clone());
        doc.insert("results".into(), self.results.clone());
        if let Some(t) = self.wall_time_s {
            doc.insert("wall_time_s".into(), json!(t));
        }
        Value::Object(doc)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("reports serialize");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.csv.clone().ok_or_else(|| {
                CliError::Validation(format!(
                    "`{}` has no CSV form; CSV covers histograms and gap curves",
                    self.command
                ))
            }),
            Format::Text => {
                let mut s = format!("{} (seed {})\n", self.command, self.seed);
                s.push_str(&self.text);
                if let Some(t) = self.wall_time_s {
                    s.push_str(&format!("wall time: {t:.3} s\n"));
                }
                Ok(s)
            }
        }
    }
}

/// Run one configured experiment.
pub fn run_experiment(cli: &Cli) -> Result<Report, CliError> {
    if cli.shots == 0 {
        return Err(CliError::Validation("--shots must be at least 1".into()));
    }
    let start = Instant::now();
    let mut report = commands::dispatch(cli)?;
    if !cli.omit_wall_time {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

/// Parse, run and render; returns the text to print and the exit code.
pub fn main_with_args<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (e.to_string(), EXIT_OK);
            }
            let err = CliError::Validation(e.to_string().trim().to_string());
            return (json_line(&err.to_json(None, None)), EXIT_VALIDATION);
        }
    };
    let outcome = run_experiment(&cli).and_then(|r| r.render(cli.format));
    match outcome {
        Ok(s) => (s, EXIT_OK),
        Err(e) => (
            json_line(&e.to_json(Some(cli.command.name()), Some(cli.seed))),
            e.exit_code(),
        ),
    }
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("errors serialize");
    s.push('\n');
    s
}

/// Bitstring histogram of sampled basis indices.
pub(crate) fn histogram(samples: &[usize], n: usize) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for &z in samples {
        *h.entry(qdesk_core::statevec::bitstring(z, n)).or_insert(0) += 1;
    }
    h
}
