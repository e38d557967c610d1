use thiserror::Error;

use crate::ta::ChannelViolation;
use crate::time::Ticks;

/// Errors raised while constructing or composing models.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid delay bounds [{lower}, {upper}]")]
    InvalidBounds { lower: Ticks, upper: Ticks },
    #[error("invalid period: {0}")]
    InvalidPeriod(String),
    #[error("invalid jitter: {0}")]
    InvalidJitter(String),
    #[error("automata are not composable: {0}")]
    NotComposable(String),
    #[error("channel mismatch: {}", display_violations(.0))]
    ChannelMismatch(Vec<ChannelViolation>),
    #[error("malformed automaton: {0}")]
    MalformedAutomaton(String),
    #[error("malformed network: {0}")]
    MalformedNetwork(String),
    #[error("invalid time chain: {0}")]
    InvalidChain(String),
    #[error("tick arithmetic overflow")]
    Overflow,
}

fn display_violations(violations: &[ChannelViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Errors raised by the verifier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("formula syntax error at offset {offset}: {message}")]
    FormulaSyntax { offset: usize, message: String },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors raised by the process simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid boiler configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid pump schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid simulation parameters: {0}")]
    InvalidParameters(String),
}
