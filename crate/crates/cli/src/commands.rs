use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qdesk_core::algorithms::{grover_angle, grover_iterations, grover_state, BooleanOracle};
use qdesk_core::mbqc::{apply_corrections, mbqc_cnot, mbqc_single_qubit};
use qdesk_core::optimize::{
    anneal_evolve, demo_maxcut_graph, eigenvalues, encode_maxcut, gap_scan, qaoa_optimize, qaoa_state,
    time_to_solution, vqe_energy_sampled, vqe_optimize, AnnealSchedule, Entangler, IsingProblem,
    OptimizerConfig, PauliSum, QaoaOptions, VqeProblem, DENSE_SPECTRUM_MAX_QUBITS,
};
use qdesk_core::qec::{exact_logical_error_rate, logical_error_rate, NoiseKind, PauliErrorModel, StabilizerCode};
use qdesk_core::sampling::{
    boson_sample, iqp_random, iqp_sample, random_interferometer, FockConfig, IqpGate, IqpGateSet,
};
use qdesk_core::shor::factor_with_t;
use qdesk_core::statevec::{bitstring, sample_from_probs};
use qdesk_core::{GateSpec, QState};

use crate::{
    histogram, parse_circuit_with_width, parse_hamiltonian, Cli, CliError, Command, EntanglerArg, Noise,
    ProblemFile, Report, SampleArgs, SampleModel,
};

/// Full probability tables are reported up to this width.
const TABLE_MAX_QUBITS: usize = 12;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<(ProblemFile, IsingProblem), CliError> {
    let spec = ProblemFile::parse(&read(path)?)?;
    let ising = spec.to_ising()?;
    Ok((spec, ising))
}

fn load_hamiltonian(path: &Path) -> Result<PauliSum, CliError> {
    Ok(parse_hamiltonian(&read(path)?)?)
}

fn hamiltonian_json(h: &PauliSum) -> Value {
    json!(h.terms().iter().map(|(c, p)| json!([c, p.to_string()])).collect::<Vec<_>>())
}

fn histogram_text(h: &BTreeMap<String, usize>) -> String {
    let mut s = String::from("outcome  count\n");
    for (k, v) in h {
        writeln!(s, "{k}  {v}").expect("writing to a String");
    }
    s
}

fn histogram_csv(h: &BTreeMap<String, usize>, probs: Option<&[f64]>) -> String {
    let mut s = String::from(if probs.is_some() { "outcome,count,probability\n" } else { "outcome,count\n" });
    for (k, v) in h {
        match probs {
            Some(p) => {
                let z = qdesk_core::statevec::parse_bitstring(k).expect("histogram keys are bitstrings");
                writeln!(s, "{k},{v},{}", p[z])
            }
            None => writeln!(s, "{k},{v}"),
        }
        .expect("writing to a String");
    }
    s
}

fn nonzero_table(probs: &[f64], n: usize) -> Value {
    if n > TABLE_MAX_QUBITS {
        return Value::Null;
    }
    let map: serde_json::Map<String, Value> = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 1e-12)
        .map(|(z, &p)| (bitstring(z, n), json!(p)))
        .collect();
    Value::Object(map)
}

pub(crate) fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let shots = cli.shots;
    let (inputs, results, text, csv) = match &cli.command {
        Command::Run { file, qubits } => {
            let circuit = parse_circuit_with_width(&read(file)?, *qubits)?;
            let n = circuit.num_qubits();
            let state = circuit.simulate()?;
            let probs = state.probabilities();
            let counts = histogram(&sample_from_probs(&probs, shots, &mut rng), n);
            (
                json!({ "file": file.display().to_string(), "qubits": qubits }),
                json!({
                    "num_qubits": n,
                    "num_ops": circuit.len(),
                    "probabilities": nonzero_table(&probs, n),
                    "counts": counts,
                }),
                histogram_text(&counts),
                Some(histogram_csv(&counts, Some(&probs))),
            )
        }
        Command::Grover {
            qubits,
            marked,
            iterations,
        } => {
            let oracle = BooleanOracle::marked(*qubits, *marked)?;
            let big_n = 1u64 << qubits;
            let k = match iterations {
                Some(k) => *k,
                None => grover_iterations(big_n, 1)?,
            };
            let state = grover_state(&oracle, k as usize)?;
            let p = state.amplitude(*marked).norm_sqr();
            let theta = grover_angle(big_n, 1);
            let predicted = ((k as f64 + 0.5) * theta).sin().powi(2);
            let counts = histogram(&state.sample_indices(shots, &mut rng), *qubits);
            let text = format!(
                "iterations {k}, P(success) = {p:.6} (predicted {predicted:.6})\n{}",
                histogram_text(&counts)
            );
            (
                json!({ "qubits": qubits, "marked": marked, "iterations": iterations }),
                json!({
                    "marked_bitstring": bitstring(*marked, *qubits),
                    "iterations": k,
                    "theta": theta,
                    "success_probability": p,
                    "predicted_success": predicted,
                    "counts": counts,
                }),
                text,
                Some(histogram_csv(&counts, Some(&state.probabilities()))),
            )
        }
        Command::Shor {
            n,
            max_attempts,
            counting_qubits,
        } => {
            let r = factor_with_t(*n, *counting_qubits, &mut rng, *max_attempts)?;
            let mut f = [r.factors.0, r.factors.1];
            f.sort_unstable();
            let transcript: Vec<Value> = r
                .transcript
                .iter()
                .map(|a| json!({ "x": a.x, "k": a.k, "r": a.r, "branch": a.branch.to_string() }))
                .collect();
            let mut text = String::from("x   k   r   branch\n");
            let dash = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
            for a in &r.transcript {
                writeln!(text, "{}   {}   {}   {}", dash(a.x), dash(a.k), dash(a.r), a.branch)
                    .expect("writing to a String");
            }
            writeln!(text, "{} = {} × {}", n, f[0], f[1]).expect("writing to a String");
            (
                json!({ "n": n, "max_attempts": max_attempts, "counting_qubits": counting_qubits }),
                json!({ "factors": f, "attempts": r.attempts, "transcript": transcript }),
                text,
                None,
            )
        }
        Command::Qec { code, p, trials, noise } => {
            let c = StabilizerCode::by_name(code)?;
            let noise = noise.unwrap_or(match c.name() {
                "phaseflip" => Noise::Phaseflip,
                "shor9" => Noise::Depolarizing,
                _ => Noise::Bitflip,
            });
            let kind = match noise {
                Noise::Bitflip => NoiseKind::BitFlip,
                Noise::Phaseflip => NoiseKind::PhaseFlip,
                Noise::Depolarizing => NoiseKind::Depolarizing,
            };
            let model = PauliErrorModel::new(*p, kind)?;
            let est = logical_error_rate(&c, &model, *trials, &mut rng)?;
            let exact = exact_logical_error_rate(&c, &model).ok();
            let noise_name = format!("{noise:?}").to_lowercase();
            let mut text = format!(
                "{} code, {noise_name} noise p = {p}\nlogical rate {:.6} ± {:.6} ({} / {} trials)\n",
                c.name(),
                est.rate,
                est.stderr,
                est.failures,
                est.trials
            );
            if let Some(e) = exact {
                writeln!(text, "exact enumeration {e:.6}").expect("writing to a String");
            }
            (
                json!({ "code": c.name(), "p": p, "trials": trials, "noise": noise_name }),
                json!({
                    "rate": est.rate,
                    "stderr": est.stderr,
                    "failures": est.failures,
                    "trials": est.trials,
                    "exact_rate": exact,
                }),
                text,
                None,
            )
        }
        Command::Qaoa {
            problem_file,
            p_depth,
            restarts,
        } => {
            let (spec, problem) = load_problem(problem_file)?;
            if *p_depth == 0 {
                return Err(CliError::Validation("--p-depth must be at least 1".into()));
            }
            let opts = QaoaOptions {
                optimizer: OptimizerConfig::default().with_restarts(*restarts),
                shots,
                warm_start: None,
            };
            let rep = qaoa_optimize(&problem, *p_depth, &opts, &mut rng)?;
            let state = qaoa_state(&problem, &rep.params)?;
            let n = problem.num_spins();
            let counts = histogram(&state.sample_indices(shots, &mut rng), n);
            let text = format!(
                "depth {p_depth}: <C> = {:.6}, optimum {}, best sample {} (cost {}), P(opt) = {:.4}\ngamma {:?}\nbeta  {:?}\n{}",
                rep.expectation,
                rep.optimum,
                rep.best_bitstring,
                rep.best_cost,
                rep.success_probability,
                rep.params.gammas,
                rep.params.betas,
                histogram_text(&counts)
            );
            (
                json!({ "problem": spec, "p_depth": p_depth, "restarts": restarts }),
                json!({
                    "expectation": rep.expectation,
                    "gammas": rep.params.gammas,
                    "betas": rep.params.betas,
                    "best_bitstring": rep.best_bitstring,
                    "best_cost": rep.best_cost,
                    "optimum": rep.optimum,
                    "approximation_ratio": rep.approximation_ratio,
                    "success_probability": rep.success_probability,
                    "evals": rep.evals,
                    "converged": rep.converged,
                    "counts": counts,
                }),
                text,
                Some(histogram_csv(&counts, Some(&state.probabilities()))),
            )
        }
        Command::Anneal {
            tau,
            steps,
            problem_file,
        } => {
            let (spec, problem) = match problem_file {
                Some(path) => {
                    let (s, p) = load_problem(path)?;
                    (serde_json::to_value(s).expect("problem serializes"), p)
                }
                None => (json!("demo-maxcut"), encode_maxcut(&demo_maxcut_graph())?),
            };
            let sched = AnnealSchedule::linear(*tau, *steps)?;
            let res = anneal_evolve(&problem, &sched)?;
            let tts = time_to_solution(res.success_probability, *tau).ok();
            let n = problem.num_spins();
            let counts = histogram(&res.state.sample_indices(shots, &mut rng), n);
            let text = format!(
                "tau {tau}, {steps} steps: P(opt) = {:.6}, T99 = {}\n{}",
                res.success_probability,
                tts.map_or("n/a".to_string(), |t| format!("{t:.3}")),
                histogram_text(&counts)
            );
            (
                json!({ "tau": tau, "steps": steps, "problem": spec }),
                json!({
                    "success_probability": res.success_probability,
                    "time_to_solution": tts,
                    "counts": counts,
                }),
                text,
                Some(histogram_csv(&counts, Some(&res.state.probabilities()))),
            )
        }
        Command::Vqe {
            hamiltonian_file,
            depth,
            restarts,
            entangler,
        } => {
            let h = load_hamiltonian(hamiltonian_file)?;
            let ent = match entangler {
                EntanglerArg::Line => Entangler::CzLine,
                EntanglerArg::Ring => Entangler::CzRing,
            };
            let prob = VqeProblem::new(h.clone(), *depth)?.with_entangler(ent);
            let cfg = OptimizerConfig::default().with_restarts(*restarts);
            let res = vqe_optimize(&prob, &cfg, &mut rng)?;
            let sampled = vqe_energy_sampled(&prob, &res.params, shots as u64, &mut rng)?;
            let exact = (h.num_qubits() <= DENSE_SPECTRUM_MAX_QUBITS)
                .then(|| h.to_matrix().map(|m| eigenvalues(&m)[0]))
                .transpose()?;
            let mut text = format!(
                "energy {:.8} ({} params, {} evals), sampled {:.6}\n",
                res.energy,
                prob.num_params(),
                res.evals,
                sampled
            );
            if let Some(e) = exact {
                writeln!(text, "exact ground energy {e:.8}").expect("writing to a String");
            }
            (
                json!({
                    "hamiltonian": hamiltonian_json(&h),
                    "depth": depth,
                    "restarts": restarts,
                    "entangler": format!("{entangler:?}").to_lowercase(),
                }),
                json!({
                    "energy": res.energy,
                    "sampled_energy": sampled,
                    "exact_ground_energy": exact,
                    "num_params": prob.num_params(),
                    "params": res.params,
                    "evals": res.evals,
                    "converged": res.converged,
                }),
                text,
                None,
            )
        }
        Command::MbqcDemo { alpha, beta, gamma } => {
            let psi = QState::random(1, &mut rng)?;
            let (out, rec) = mbqc_single_qubit(&psi, *alpha, *beta, *gamma, None, &mut rng)?;
            let fixed = apply_corrections(&out, &rec)?;
            let mut target = psi.clone();
            for (name, angle) in [("RZ", *alpha), ("RX", *beta), ("RZ", *gamma)] {
                target.apply_named(name, &[0], &[angle])?;
            }
            target.apply_named("H", &[0], &[])?;
            let chain_fid = fixed.fidelity(&target)?;

            let psi2 = QState::random(2, &mut rng)?;
            let (out2, rec2) = mbqc_cnot(&psi2, None, &mut rng)?;
            let fixed2 = apply_corrections(&out2, &rec2)?;
            let mut want2 = psi2.clone();
            want2.apply_gate(&GateSpec::named("CNOT", &[])?, &[0, 1])?;
            let cnot_fid = fixed2.fidelity(&want2)?;
            let text = format!(
                "rotation chain: outcomes {:?}, byproduct X^{:?} Z^{:?}, corrected fidelity {chain_fid:.12}\n\
                 CNOT gadget: outcomes {:?}, byproduct X^{:?} Z^{:?}, corrected fidelity {cnot_fid:.12}\n",
                rec.outcomes, rec.x, rec.z, rec2.outcomes, rec2.x, rec2.z
            );
            (
                json!({ "alpha": alpha, "beta": beta, "gamma": gamma }),
                json!({
                    "rotation": {
                        "outcomes": rec.outcomes,
                        "byproduct_x": rec.x,
                        "byproduct_z": rec.z,
                        "corrected_fidelity": chain_fid,
                    },
                    "cnot": {
                        "outcomes": rec2.outcomes,
                        "byproduct_x": rec2.x,
                        "byproduct_z": rec2.z,
                        "corrected_fidelity": cnot_fid,
                    },
                }),
                text,
                None,
            )
        }
        Command::Sample(SampleArgs { model }) => match model {
            SampleModel::Iqp { qubits, gateset, depth } => {
                let set = IqpGateSet::from_tag(*gateset)?;
                let c = iqp_random(*qubits, set, *depth, &mut rng)?;
                let (samples, dist) = iqp_sample(&c, shots, &mut rng)?;
                let gates: Vec<String> = c.gates().iter().map(describe_iqp_gate).collect();
                let counts = histogram(&samples, *qubits);
                (
                    json!({ "qubits": qubits, "gateset": gateset, "depth": depth }),
                    json!({
                        "gates": gates,
                        "probabilities": nonzero_table(&dist, *qubits),
                        "counts": counts,
                    }),
                    format!("gates: {}\n{}", gates.join(", "), histogram_text(&counts)),
                    Some(histogram_csv(&counts, Some(&dist))),
                )
            }
            SampleModel::Boson { modes, photons } => {
                let input = FockConfig::standard_input(*photons, *modes)?;
                let u = random_interferometer(*modes, &mut rng)?;
                let (samples, dist) = boson_sample(&u, &input, shots, &mut rng)?;
                let key = |f: &FockConfig| {
                    f.occupations().iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
                };
                let mut counts: BTreeMap<String, usize> = BTreeMap::new();
                for s in &samples {
                    *counts.entry(key(s)).or_insert(0) += 1;
                }
                let total: f64 = dist.iter().map(|(_, p)| p).sum();
                let table: Vec<Value> = dist
                    .iter()
                    .map(|(f, p)| json!({ "occupations": f.occupations(), "probability": p }))
                    .collect();
                let mut text = String::from("occupations  probability  count\n");
                let mut csv = String::from("occupations,count,probability\n");
                for (f, p) in &dist {
                    let k = key(f);
                    let cnt = counts.get(&k).copied().unwrap_or(0);
                    writeln!(text, "({k})  {p:.6}  {cnt}").expect("writing to a String");
                    writeln!(csv, "\"{k}\",{cnt},{p}").expect("writing to a String");
                }
                writeln!(text, "total probability {total:.12}").expect("writing to a String");
                (
                    json!({ "modes": modes, "photons": photons, "input": input.occupations() }),
                    json!({ "distribution": table, "total_probability": total, "counts": counts }),
                    text,
                    Some(csv),
                )
            }
        },
        Command::GapScan { h0, h1, resolution } => {
            let h0 = match h0 {
                Some(p) => load_hamiltonian(p)?,
                None => PauliSum::parse_terms(&[(-1.0, "X")])?,
            };
            let h1 = match h1 {
                Some(p) => load_hamiltonian(p)?,
                None => PauliSum::parse_terms(&[(-1.0, "Z")])?,
            };
            let scan = gap_scan(&h0, &h1, *resolution)?;
            let mut csv = String::from("s,gap\n");
            for (s, g) in &scan.curve {
                writeln!(csv, "{s},{g}").expect("writing to a String");
            }
            let text = format!("minimum gap {:.9} at s = {:.6}\n", scan.min_gap, scan.s_at_min);
            (
                json!({ "h0": hamiltonian_json(&h0), "h1": hamiltonian_json(&h1), "resolution": resolution }),
                json!({
                    "min_gap": scan.min_gap,
                    "s_at_min": scan.s_at_min,
                    "curve": scan.curve.iter().map(|&(s, g)| json!([s, g])).collect::<Vec<_>>(),
                }),
                text,
                Some(csv),
            )
        }
    };
    Ok(Report {
        command: cli.command.name().to_string(),
        seed: cli.seed,
        shots,
        inputs,
        results,
        wall_time_s: None,
        text,
        csv,
    })
}

fn describe_iqp_gate(g: &IqpGate) -> String {
    match g {
        IqpGate::TPow { qubit, k } => format!("T^{k}({qubit})"),
        other => {
            let t: Vec<String> = other.targets().iter().map(|q| q.to_string()).collect();
            format!("{}({})", other.name(), t.join(","))
        }
    }
}
