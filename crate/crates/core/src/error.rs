use thiserror::Error;

/// Errors raised across the simulation engines and algorithm library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("target {index} out of range for {num_qubits} qubits")]
    TargetOutOfRange { index: usize, num_qubits: usize },

    #[error("duplicate target {0}")]
    DuplicateTarget(usize),

    #[error("gate `{gate}` expects {expected} targets, got {got}")]
    ArityMismatch {
        gate: String,
        expected: usize,
        got: usize,
    },

    #[error("register of {requested} qubits exceeds the cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("promise violated: {0}")]
    PromiseViolation(String),

    #[error("{x} is not coprime to {n}")]
    NotCoprime { x: u64, n: u64 },

    #[error("{0} is not composite")]
    NotComposite(u64),

    #[error("gave up after {0} attempts")]
    AttemptsExhausted(usize),

    #[error("syndrome {0:?} is not in the decoder table")]
    UnknownSyndrome(Vec<i8>),

    #[error("uncorrectable error: {0}")]
    Uncorrectable(String),

    #[error("{0} output configurations exceed the enumeration limit")]
    CombinatorialBlowup(u128),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl QError {
    /// True for errors caused by exceeding a size cap rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, QError::CapExceeded { .. } | QError::CombinatorialBlowup(_))
    }

    /// True when the algorithm itself declared failure on valid input.
    pub fn is_algorithm_failure(&self) -> bool {
        matches!(
            self,
            QError::AttemptsExhausted(_) | QError::Uncorrectable(_) | QError::UnknownSyndrome(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, QError>;
