use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode count must be at least 1")]
    NoModes,

    #[error("no basis states: {particles} particles cannot fit in {modes} modes with per-mode cap {cap}")]
    EmptySector { modes: usize, particles: u32, cap: u32 },

    #[error("mode {mode} out of range 1..={modes}")]
    InvalidMode { mode: usize, modes: usize },

    #[error("occupation vector has {got} entries, expected {expected}")]
    ModeMismatch { expected: usize, got: usize },

    #[error("occupation {occ} violates Pauli exclusion")]
    PauliViolation { occ: String },

    #[error("occupation {occ} is not in the {modes}-mode sector with {particles} particles")]
    NotInSector { occ: String, modes: usize, particles: u32 },

    #[error("non-finite angle {0}")]
    NonFiniteAngle(f64),

    #[error("invalid quadratic coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("beam splitter needs two distinct modes, got {0} twice")]
    DegenerateBeamSplitter(usize),

    #[error("unsupported propagation: {0}")]
    UnsupportedPropagation(String),

    #[error("cannot compile: {0}")]
    Compile(String),

    #[error("invalid logical input: {0}")]
    InvalidBitstring(String),

    #[error("{0} states are not closed under linear optics")]
    NotClosedUnderLinearOptics(&'static str),

    #[error("degenerate state: {0}")]
    DegenerateState(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
