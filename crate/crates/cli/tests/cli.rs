use std::path::{Path, PathBuf};
use std::process::Command as Process;

use proptest::prelude::*;
use serde_json::Value;

use qdesk_cli::{
    main_with_args, parse_circuit, parse_circuit_with_width, parse_hamiltonian, serialize_circuit, ProblemFile,
    EXIT_ALGORITHM_FAILURE, EXIT_OK, EXIT_RUNTIME_LIMIT, EXIT_VALIDATION,
};
use qdesk_core::QError;

fn run(args: &[&str]) -> (String, i32) {
    main_with_args(std::iter::once("qdesk").chain(args.iter().copied()))
}

fn run_json(args: &[&str]) -> Value {
    let (out, code) = run(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {out}");
    serde_json::from_str(&out).unwrap()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn validate(schema: &str, doc: &Value) {
    let path = schema_dir().join(format!("{schema}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{}: {errors:?}\n{doc:#}", path.display());
}

struct Fixtures {
    _dir: tempfile::TempDir,
    bell: String,
    problem: String,
    hamiltonian: String,
    h_x: String,
    h_z: String,
}

fn fixtures() -> Fixtures {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.display().to_string()
    };
    Fixtures {
        bell: write("bell.qc", "# Bell pair\nH 0\n\nCNOT 0 1\n"),
        problem: write(
            "triangle.json",
            r#"{"kind": "maxcut", "nodes": 3, "edges": [[0, 1, 1.0], [1, 2, 1.0], [0, 2, 1.0]]}"#,
        ),
        hamiltonian: write("h.txt", "1.0 ZZ\n0.5 XI  # transverse\n"),
        h_x: write("hx.txt", "-1 X\n"),
        h_z: write("hz.txt", "-1 Z\n"),
        _dir: dir,
    }
}

fn all_commands(f: &Fixtures) -> Vec<(&'static str, Vec<String>)> {
    let v = |a: &[&str]| a.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    vec![
        ("run", v(&["run", &f.bell])),
        ("grover", v(&["grover", "--qubits", "4", "--marked", "9"])),
        ("shor", v(&["shor", "--n", "15"])),
        ("qec", v(&["qec", "--code", "bitflip", "--p", "0.1", "--trials", "2000"])),
        ("qaoa", v(&["qaoa", "--problem-file", &f.problem, "--p-depth", "1", "--restarts", "4"])),
        ("anneal", v(&["anneal", "--tau", "5", "--steps", "20"])),
        ("vqe", v(&["vqe", "--hamiltonian-file", &f.hamiltonian, "--depth", "1", "--restarts", "4"])),
        ("mbqc-demo", v(&["mbqc-demo"])),
        ("sample-iqp", v(&["sample", "iqp", "--qubits", "3"])),
        ("sample-boson", v(&["sample", "boson", "--modes", "3", "--photons", "2"])),
        ("gap-scan", v(&["gap-scan", "--h0", &f.h_x, "--h1", &f.h_z, "--resolution", "20"])),
    ]
}

// circuit files

#[test]
fn bell_circuit_parses() {
    let c = parse_circuit("H 0\nCNOT 0 1").unwrap();
    assert_eq!(c.num_qubits(), 2);
    assert_eq!(c.len(), 2);
    let s = c.simulate().unwrap();
    assert!((s.amplitude(0).norm_sqr() - 0.5).abs() < 1e-12);
    assert!((s.amplitude(3).norm_sqr() - 0.5).abs() < 1e-12);
}

#[test]
fn rotation_parameter_parses() {
    let c = parse_circuit("RZ 0 0.5").unwrap();
    assert_eq!(c.num_qubits(), 1);
    assert_eq!(c.ops()[0].gate.name(), "RZ");
    assert_eq!(c.ops()[0].gate.params(), &[0.5]);
}

#[test]
fn unknown_gate_names_line() {
    let e = parse_circuit("FOO 0").unwrap_err();
    assert_eq!(e.line, 1);
    assert_eq!(e.error, QError::UnknownGate("FOO".into()));
    assert!(e.to_string().contains("line 1") && e.to_string().contains("FOO"));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let e = parse_circuit("H 0\n# note\nCNOT 0\n").unwrap_err();
    assert_eq!(e.line, 3);
    assert!(matches!(e.error, QError::ArityMismatch { .. }));

    let e = parse_circuit("H 0\nRZ 0 abc").unwrap_err();
    assert_eq!(e.line, 2);
    assert!(matches!(e.error, QError::InvalidArgument(_)));

    let e = parse_circuit("RZ 0").unwrap_err();
    assert!(matches!(e.error, QError::ArityMismatch { .. } | QError::InvalidArgument(_)));

    let e = parse_circuit_with_width("H 0\nX 4", Some(3)).unwrap_err();
    assert_eq!(e.line, 2);
    assert!(matches!(e.error, QError::TargetOutOfRange { index: 4, num_qubits: 3 }));

    let e = parse_circuit("CNOT 1 1").unwrap_err();
    assert!(matches!(e.error, QError::DuplicateTarget(1)));
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let c = parse_circuit("\n  # header\nH 0 # trailing\n\n").unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(parse_circuit("# nothing").unwrap().len(), 0);
}

const GATES: &[(&str, usize, bool)] = &[
    ("H", 1, false),
    ("X", 1, false),
    ("S", 1, false),
    ("T", 1, false),
    ("RX", 1, true),
    ("RZ", 1, true),
    ("CNOT", 2, false),
    ("CZ", 2, false),
    ("SWAP", 2, false),
    ("CP", 2, true),
    ("TOFFOLI", 3, false),
    ("FREDKIN", 3, false),
];

proptest! {
    #[test]
    fn circuit_text_round_trips(
        ops in prop::collection::vec((0..GATES.len(), prop::collection::vec(0usize..6, 3), -10.0f64..10.0), 0..30)
    ) {
        let mut text = String::new();
        for (g, qs, theta) in &ops {
            let (name, arity, param) = GATES[*g];
            let mut distinct: Vec<usize> = Vec::new();
            for &q in qs.iter().chain(&[0, 1, 2, 3, 4, 5]) {
                if !distinct.contains(&q) {
                    distinct.push(q);
                }
            }
            let targets: Vec<String> = distinct[..arity].iter().map(|q| q.to_string()).collect();
            text.push_str(&format!("{name} {}", targets.join(" ")));
            if param {
                text.push_str(&format!(" {theta}"));
            }
            text.push('\n');
        }
        let c = parse_circuit(&text).unwrap();
        let again = parse_circuit(&serialize_circuit(&c).unwrap()).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert_eq!(serialize_circuit(&again).unwrap(), serialize_circuit(&c).unwrap());
    }
}

// problem and Hamiltonian files

#[test]
fn problem_file_kinds() {
    let maxcut = ProblemFile::parse(r#"{"kind":"maxcut","nodes":2,"edges":[[0,1,1.0]]}"#).unwrap();
    assert_eq!(maxcut.to_ising().unwrap().num_spins(), 2);
    let ss = ProblemFile::parse(r#"{"kind":"subset_sum","numbers":[-5,-3,1,4,9],"target":7}"#).unwrap();
    assert_eq!(ss.to_ising().unwrap().num_spins(), 5);
    let np = ProblemFile::parse(r#"{"kind":"number_partition","numbers":[1,2,3]}"#).unwrap();
    assert_eq!(np.to_ising().unwrap().num_spins(), 3);
    let ising = ProblemFile::parse(
        r#"{"kind":"ising","spins":2,"couplings":[[0,1,-1.0]],"fields":[0.5,0.0],"sense":"maximize"}"#,
    )
    .unwrap();
    let p = ising.to_ising().unwrap();
    assert_eq!(p.couplings()[(0, 1)], -1.0);
    assert_eq!(p.fields(), &[0.5, 0.0]);

    assert!(ProblemFile::parse(r#"{"kind":"tsp"}"#).is_err());
    assert!(ProblemFile::parse("not json").is_err());
    let bad = ProblemFile::parse(r#"{"kind":"ising","spins":2,"couplings":[[0,5,1.0]]}"#).unwrap();
    assert!(bad.to_ising().is_err());
}

#[test]
fn hamiltonian_file_parsing() {
    let h = parse_hamiltonian("# H\n1.0 ZZ\n0.5 XI\n").unwrap();
    assert_eq!(h.num_qubits(), 2);
    assert_eq!(h.terms().len(), 2);
    assert_eq!(parse_hamiltonian("1 ZZ\n2 X\n").unwrap_err().line, 2);
    assert_eq!(parse_hamiltonian("1 ZZ\nabc XI\n").unwrap_err().line, 2);
    assert_eq!(parse_hamiltonian("1 ZQ\n").unwrap_err().line, 1);
    assert!(parse_hamiltonian("# empty\n").is_err());
}

// worked examples

#[test]
fn shor_fifteen_seed_seven() {
    let doc = run_json(&["shor", "--n", "15", "--seed", "7"]);
    assert_eq!(doc["results"]["factors"], serde_json::json!([3, 5]));
    assert_eq!(doc["seed"], 7);
    assert!(doc["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn bitflip_rate_near_closed_form() {
    let doc = run_json(&["qec", "--code", "bitflip", "--p", "0.05", "--trials", "100000"]);
    let rate = doc["results"]["rate"].as_f64().unwrap();
    let exact = 3.0 * 0.05f64.powi(2) * 0.95 + 0.05f64.powi(3);
    assert!((exact - 0.00725).abs() < 1e-12);
    let sigma = (exact * (1.0 - exact) / 1e5).sqrt();
    assert!((rate - exact).abs() < 4.0 * sigma, "{rate}");
    assert!((doc["results"]["exact_rate"].as_f64().unwrap() - exact).abs() < 1e-12);
}

#[test]
fn boson_distribution_is_normalized() {
    let doc = run_json(&["sample", "boson", "--modes", "3", "--photons", "2", "--seed", "1"]);
    let dist = doc["results"]["distribution"].as_array().unwrap();
    assert_eq!(dist.len(), 6);
    let total: f64 = dist.iter().map(|d| d["probability"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let shots: u64 = doc["results"]["counts"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(shots, 1024);
}

#[test]
fn bell_run_samples_only_correlated_outcomes() {
    let f = fixtures();
    let doc = run_json(&["run", &f.bell, "--shots", "500", "--seed", "3"]);
    let counts = doc["results"]["counts"].as_object().unwrap();
    assert!(counts.keys().all(|k| k == "00" || k == "11"));
    assert_eq!(counts.values().map(|v| v.as_u64().unwrap()).sum::<u64>(), 500);
    assert!((doc["results"]["probabilities"]["11"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn gap_scan_default_is_transverse_to_longitudinal() {
    let doc = run_json(&["gap-scan"]);
    assert!((doc["results"]["min_gap"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-9);
    assert!((doc["results"]["s_at_min"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn vqe_reaches_ground_energy() {
    let f = fixtures();
    let doc = run_json(&["vqe", "--hamiltonian-file", &f.hamiltonian]);
    let e = doc["results"]["energy"].as_f64().unwrap();
    let exact = doc["results"]["exact_ground_energy"].as_f64().unwrap();
    assert!((e - exact).abs() < 1e-6, "{e} vs {exact}");
    assert_eq!(doc["results"]["num_params"], 10);
}

#[test]
fn mbqc_demo_corrects_both_gadgets() {
    for seed in ["0", "1", "2"] {
        let doc = run_json(&["mbqc-demo", "--seed", seed]);
        for g in ["rotation", "cnot"] {
            assert!(doc["results"][g]["corrected_fidelity"].as_f64().unwrap() > 1.0 - 1e-9);
        }
    }
}

// invariants

#[test]
fn identical_flags_give_identical_bytes() {
    let f = fixtures();
    for (name, args) in all_commands(&f) {
        let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
        a.extend(["--seed", "11", "--omit-wall-time"]);
        let (x, cx) = run(&a);
        let (y, cy) = run(&a);
        assert_eq!((cx, cy), (EXIT_OK, EXIT_OK), "{name}: {x}");
        assert_eq!(x, y, "{name} is not deterministic");
        assert!(!x.contains("wall_time_s"));

        // with timing, documents agree once the wall time is dropped
        a.pop();
        let strip = |s: &str| {
            let mut v: Value = serde_json::from_str(s).unwrap();
            v.as_object_mut().unwrap().remove("wall_time_s");
            v
        };
        assert_eq!(strip(&run(&a).0), strip(&x), "{name}");
    }
}

#[test]
fn seed_changes_sampled_output() {
    let a = run_json(&["grover", "--qubits", "3", "--marked", "1", "--iterations", "0", "--seed", "1"]);
    let b = run_json(&["grover", "--qubits", "3", "--marked", "1", "--iterations", "0", "--seed", "2"]);
    assert_ne!(a["results"]["counts"], b["results"]["counts"]);
    assert_eq!(a["results"]["success_probability"], b["results"]["success_probability"]);
}

#[test]
fn every_report_matches_its_schema() {
    let f = fixtures();
    for (name, args) in all_commands(&f) {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let doc = run_json(&a);
        assert_eq!(doc["command"], name);
        validate(name, &doc);
    }
    validate("anneal", &run_json(&["anneal", "--problem-file", &f.problem, "--steps", "5"]));
    validate("sample-iqp", &run_json(&["sample", "iqp", "--qubits", "4", "--gateset", "2"]));
}

#[test]
fn error_documents_match_schema() {
    for args in [
        vec!["shor", "--n", "13"],
        vec!["frobnicate"],
        vec!["qec", "--code", "steane", "--p", "0.1"],
        vec!["grover", "--qubits", "30", "--marked", "1"],
        vec!["shor", "--n", "15", "--max-attempts", "0"],
    ] {
        let (out, code) = run(&args);
        assert_ne!(code, EXIT_OK);
        let doc: Value = serde_json::from_str(&out).unwrap();
        validate("error", &doc);
        assert_eq!(doc["error"]["exit_code"], code);
    }
}

#[test]
fn exit_codes() {
    let f = fixtures();
    // validation
    for args in [
        vec!["shor", "--n", "13"],
        vec!["qec", "--code", "bitflip", "--p", "1.5"],
        vec!["grover", "--qubits", "3", "--marked", "8"],
        vec!["run", "/definitely/not/here.qc"],
        vec!["shor", "--n", "15", "--format", "csv"],
        vec!["sample", "iqp", "--qubits", "2", "--gateset", "7"],
        vec!["grover", "--qubits", "3", "--marked", "1", "--shots", "0"],
        vec!["qaoa", "--problem-file", &f.hamiltonian],
        vec!["unknown-command"],
    ] {
        assert_eq!(run(&args).1, EXIT_VALIDATION, "{args:?}");
    }
    // size caps
    let wide = f.bell.replace("bell.qc", "wide.qc");
    std::fs::write(&wide, "H 0\n").unwrap();
    for args in [
        vec!["run", &wide, "--qubits", "30"],
        vec!["grover", "--qubits", "30", "--marked", "1"],
        vec!["sample", "boson", "--modes", "30", "--photons", "10"],
    ] {
        assert_eq!(run(&args).1, EXIT_RUNTIME_LIMIT, "{args:?}");
    }
    // the factoring driver gives up
    assert_eq!(run(&["shor", "--n", "15", "--max-attempts", "0"]).1, EXIT_ALGORITHM_FAILURE);
}

#[test]
fn csv_limited_to_histograms_and_curves() {
    let (csv, code) = run(&["gap-scan", "--resolution", "4", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "s,gap");
    assert_eq!(lines.len(), 6);
    let (csv, _) = run(&["grover", "--qubits", "2", "--marked", "3", "--format", "csv"]);
    assert_eq!(csv.lines().next(), Some("outcome,count,probability"));
    assert_eq!(run(&["mbqc-demo", "--format", "csv"]).1, EXIT_VALIDATION);
}

#[test]
fn text_mode_prints_transcript_table() {
    let (text, code) = run(&["shor", "--n", "21", "--seed", "3", "--format", "text"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.starts_with("shor (seed 3)"));
    assert!(text.contains("x   k   r   branch"));
    assert!(text.contains("21 = 3 × 7"));
}

#[test]
fn binary_exit_status_and_stdout() {
    let exe = env!("CARGO_BIN_EXE_qdesk");
    let out = Process::new(exe).args(["shor", "--n", "15", "--seed", "7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["factors"], serde_json::json!([3, 5]));

    let out = Process::new(exe).args(["shor", "--n", "15", "--max-attempts", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_ALGORITHM_FAILURE));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["error"]["kind"], "algorithm_failure");

    let out = Process::new(exe).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
}

#[test]
fn schemas_reject_malformed_reports() {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_dir().join("shor.schema.json")).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let good = run_json(&["shor", "--n", "15"]);
    assert!(v.is_valid(&good));
    let mut missing = good.clone();
    missing.as_object_mut().unwrap().remove("results");
    assert!(!v.is_valid(&missing));
    let mut wrong = good.clone();
    wrong["command"] = "grover".into();
    assert!(!v.is_valid(&wrong));
    let mut extra = good;
    extra["results"]["bogus"] = 1.into();
    assert!(!v.is_valid(&extra));
}
