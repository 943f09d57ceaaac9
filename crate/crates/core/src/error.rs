use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("invalid probability {value} at state {index}")]
    InvalidProbability { index: usize, value: f64 },
    #[error("invalid measure {value} at state {index}: must be positive and finite")]
    InvalidMeasure { index: usize, value: f64 },
    #[error("duplicate state id `{0}`")]
    DuplicateState(String),
    #[error("duplicate observable `{0}`")]
    DuplicateObservable(String),
    #[error("unknown observable `{0}`")]
    UnknownObservable(String),
    #[error("observable `{name}` is not finite at state {index}")]
    NonFiniteObservable { name: String, index: usize },
    #[error("state {index} has positive probability but the reference assigns it zero (divergence is infinite)")]
    AbsoluteContinuity { index: usize },
    #[error("shell `{label}` has probability {probability} but contains no states")]
    EmptyShell { label: String, probability: f64 },
    #[error("shell `{label}` has no reweighting mass")]
    ZeroShellMass { label: String },
    #[error("target {target} for `{name}` is outside the feasible range [{min}, {max}]")]
    Infeasible {
        name: String,
        target: f64,
        min: f64,
        max: f64,
    },
    #[error("target {target} for `{name}` sits on the edge of the feasible range; its multiplier would diverge")]
    BoundaryTarget { name: String, target: f64 },
    #[error("multipliers failed to converge after {iterations} iterations (gradient norm {gradient_norm})")]
    Divergent { iterations: usize, gradient_norm: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("particles {i} and {j} overlap (separation {separation})")]
    Overlap { i: usize, j: usize, separation: f64 },
    #[error("integration blew up at step {step}")]
    Blowup { step: u64 },
    #[error("relative energy drift {drift} at step {step} exceeds budget {budget}")]
    EnergyDrift { step: u64, drift: f64, budget: f64 },
    #[error("cannot place {n} particles in the {side} well at spacing {spacing}")]
    CannotFit { n: usize, side: String, spacing: f64 },
    #[error("target energy {target} is below the potential energy {floor} of the initial placement")]
    EnergyBelowFloor { target: f64, floor: f64 },
    #[error("need at least {needed} samples, have {have}")]
    TooFewSamples { needed: usize, have: usize },
    #[error("no sample selects any particle under the `{0}` filter")]
    EmptyFilter(String),
    #[error("no root for target {target} inside the multiplier bracket [{lo}, {hi}]")]
    BracketExhausted { target: f64, lo: f64, hi: f64 },
    #[error("effective sample size {ess} is below the minimum {min}")]
    DegenerateWeights { ess: f64, min: f64 },
    #[error("value {value} is outside the tabulated range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("time ranges do not overlap")]
    DisjointTimes,
    #[error("target #{index} ({target}): {source}")]
    AtTarget {
        index: usize,
        target: f64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Broad classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input, infeasible request or violated contract.
    Contract,
    /// The numerics failed: divergence, blowup, drift.
    Numerical,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Divergent { .. }
            | Overlap { .. }
            | Blowup { .. }
            | EnergyDrift { .. }
            | BracketExhausted { .. }
            | DegenerateWeights { .. } => ErrorClass::Numerical,
            AtTarget { source, .. } => source.class(),
            Io(_) => ErrorClass::Io,
            _ => ErrorClass::Contract,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
