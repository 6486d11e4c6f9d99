use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("negative epsilon exponent present; debordering is incomplete")]
    NegativeExponentPresent,
    #[error("tensor is zero")]
    ZeroTensor,
    #[error("mode {mode} out of range for a degree-{degree} tensor")]
    ModeOutOfRange { mode: usize, degree: usize },
    #[error("ABP is not well formed: {}", .0.join("; "))]
    InvalidAbp(Vec<String>),
    #[error("ABP must use the single-(source,sink) model")]
    NotSingleModel,
    #[error("ABP has a label coefficient that is not nonnegative for small epsilon")]
    NotMonotoneEps,
    #[error("ABP output is not divisible by epsilon")]
    NotDivisibleByEps,
    #[error("internal invariant violated: sink reachable through non-epsilon edges")]
    SinkReachable,
    #[error("ABP output has a coefficient with a negative epsilon exponent")]
    OutputHasNegativeEps,
    #[error("even degree {0} is not supported for the parity construction")]
    EvenDegreeUnsupported(usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid format: {0}")]
    InvalidFormat(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
