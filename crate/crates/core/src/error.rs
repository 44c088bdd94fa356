use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabError {
    #[error("qubit {qubit} out of range for a {n}-qubit state")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("product of generators picked up an imaginary phase")]
    ImaginaryPhase,
    #[error("tableau invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("a state needs at least one qubit")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("noise probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("correlation time {0} must be non-negative")]
    BadCorrelationTime(f64),
    #[error("markov schedule queried out of order: expected step {expected}, got {got}")]
    OutOfOrder { expected: u64, got: u64 },
    #[error("stripe noise has constant covariance {covariance} at every lag")]
    StripeCovarianceConstant { covariance: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("power-law fit needs positive data, got ({0}, {1})")]
    NonPositive(f64, f64),
    #[error("all abscissae are equal; fit is degenerate")]
    Degenerate,
    #[error("fewer than two curves overlap inside the collapse window")]
    NoOverlap,
    #[error("curve for control value {0} is not sampled in increasing time")]
    Unsorted(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("dense oracle supports at most 8 qubits, got {0}")]
    TooManyQubits(usize),
    #[error("qubit {0} out of range")]
    QubitOutOfRange(usize),
    #[error("forced measurement outcome has probability {0:e}")]
    ZeroProbability(f64),
}

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("reference qubit already encoded")]
    AlreadyEncoded,
    #[error(transparent)]
    Stab(#[from] StabError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep spec: {0}")]
    Spec(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupted manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },
    #[error("malformed result file {path}: {reason}")]
    Csv { path: PathBuf, reason: String },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("analysis mode {mode}: {reason}")]
    Mode { mode: String, reason: String },
}
