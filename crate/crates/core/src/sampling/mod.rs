//! Sub-universal sampling models: IQP circuits and boson sampling.

mod boson;
mod iqp;
mod permanent;


pub use boson::{
    boson_distribution, boson_prob, boson_sample, random_interferometer, FockConfig, Interferometer,
    BOSON_MAX_CONFIGS, UNITARITY_TOL,
};
pub use iqp::{hadamard_gadget, iqp_random, iqp_sample, GadgetOutcome, IqpCircuit, IqpGate, IqpGateSet};
pub use permanent::{permanent, permanent_naive, PERMANENT_MAX, PERMANENT_NAIVE_MAX};
