use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("snr_max must be finite and non-negative, got {0}")]
    InvalidSnr(f64),
    #[error("alpha must be finite and non-negative, got {0}")]
    InvalidAlpha(f64),
    #[error("beta_tilde {beta_tilde} outside [0, {beta_max}]")]
    InvalidBeta { beta_tilde: f64, beta_max: f64 },
    #[error("empty codeword")]
    EmptyWord,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
    #[error("quadrature did not reach tolerance: estimate {value}, error {abs_error}")]
    NotConverged { value: f64, abs_error: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("R_l must be finite and non-negative, got {0}")]
    InvalidLeakage(f64),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("invalid degree parameters: {0}")]
    InvalidDegrees(String),
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("degree rounding infeasible: {0}")]
    InfeasibleRounding(String),
    #[error("4-cycle removal failed: {0} offending edges remain")]
    CycleRemoval(usize),
    #[error("key length {k} exceeds systematic dimension {l}")]
    KeyTooLong { k: usize, l: usize },
    #[error("word length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("word is not a codeword")]
    NotACodeword,
    #[error("malformed alist: {0}")]
    Alist(String),
    #[error("malformed code bundle: {0}")]
    Bundle(String),
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("input length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite intrinsic LLR at position {0}")]
    NonFiniteLlr(usize),
    #[error("key length {got} does not match expected {expected}")]
    KeyLength { expected: usize, got: usize },
    #[error("max_iter must be positive")]
    ZeroIterations,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("invalid simulation input: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("invalid design input: {0}")]
    Invalid(String),
    #[error("LP infeasible")]
    LpInfeasible,
    #[error("LP unbounded")]
    LpUnbounded,
    #[error("initial distribution does not meet the target error on the {0} channel")]
    InitialInfeasible(&'static str),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("invalid bound input: {0}")]
    Invalid(String),
    #[error("no admissible ensemble parameters found: {0}")]
    NoAdmissibleParams(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}
