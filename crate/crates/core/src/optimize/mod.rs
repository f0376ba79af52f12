//! Ising/QUBO encodings and the annealing, QAOA and VQE solvers.

mod anneal;
mod ising;
mod nelder_mead;
mod qaoa;
mod spectrum;
mod swap_network;
mod vqe;


pub use anneal::{anneal_evolve, qa_to_qaoa_angles, AnnealResult, AnnealSchedule, ScheduleFn};
pub use ising::*;
pub use nelder_mead::{minimize_multistart, nelder_mead, Minimum, OptimizerConfig};
pub use qaoa::{
    compile_qaoa_circuit, qaoa_expectation, qaoa_expectation_sampled, qaoa_optimize, qaoa_state,
    QaoaOptions, QaoaParams, QaoaReport,
};
pub use spectrum::{eigenvalues, gap_scan, time_to_solution, GapScan, PauliSum, DENSE_SPECTRUM_MAX_QUBITS};
pub use swap_network::{swap_network_linear, SwapNetwork};
pub use vqe::{ansatz_state, vqe_energy, vqe_energy_sampled, vqe_optimize, Entangler, VqeProblem, VqeResult};

/// Max-Cut demo instance inspired by the five-node example graph of the
/// lecture notes; the edge set is ours and its optimum is found by brute force.
pub fn demo_maxcut_graph() -> Graph {
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 3)]
        .into_iter()
        .map(|(a, b)| (a, b, 1.0))
        .collect();
    Graph::new(5, edges).expect("valid demo graph")
}
