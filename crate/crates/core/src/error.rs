use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probability space needs at least one atom")]
    EmptySpace,

    #[error("negative weight {weight} at atom {atom}")]
    NegativeWeight { atom: usize, weight: f64 },

    #[error("weights sum to {0}, expected 1 within 1e-12")]
    WeightSum(f64),

    #[error("atom count {expected} does not match {got} weights")]
    AtomCount { expected: usize, got: usize },

    #[error("random variable has {got} values but the space has {expected} atoms")]
    SpaceMismatch { expected: usize, got: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("level {level} of the conditioned variable has zero probability")]
    NullLevel { level: f64 },

    #[error("expected {expected} distinct levels, found {got}")]
    LevelCount { expected: usize, got: usize },

    #[error("empty list of random variables")]
    NoVariables,

    #[error("invalid pure state: {0}")]
    InvalidState(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("observable eigenvalues must be pairwise distinct (gap {gap:e} < 1e-9)")]
    DegenerateObservable { gap: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("negative probability entry {0}")]
    NegativeProbability(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model has no finite support; exact evaluation is unavailable")]
    NoFiniteSupport,

    #[error("invalid estimation mode: {0}")]
    InvalidMode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
