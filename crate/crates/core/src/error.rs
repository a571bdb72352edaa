use thiserror::Error;

/// Errors produced anywhere in the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::qsim::MAX_QUBITS)]
    QubitCount(usize),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(usize),

    #[error("norm drifted to {0} (tolerance 1e-9)")]
    NormDrift(f64),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("parameter index {index} out of range for {len} parameters")]
    ParamIndex { index: usize, len: usize },

    #[error("bitstring {0:#b} has more bits than the {1}-qubit register")]
    BitstringLength(usize, usize),

    #[error("invalid post-processing function: {0}")]
    InvalidPostProcessing(String),

    #[error("{what}: n = {n} exceeds the limit of {limit}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("{0} overflows the integer range")]
    Overflow(String),

    #[error("action {action} has zero probability")]
    ZeroProbability { action: usize },

    #[error("action {action} is not valid for {num_actions} actions")]
    InvalidAction { action: usize, num_actions: usize },

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("state out of encoder range: {0}")]
    StateOutOfRange(String),

    #[error("invalid hyperparameter: {0}")]
    Hyperparam(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
