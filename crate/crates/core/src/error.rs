use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector length {0} is not 2, 4 or 8")]
    BadLength(usize),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("expected {expected} qubit labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("register would hold {0} qubits, at most 3 are supported")]
    TooManyQubits(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid qubit selection: {0}")]
    BadQubits(String),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("density matrix has eigenvalue {0:e} below the clipping tolerance")]
    NegativeEigenvalue(f64),
    #[error("density matrix trace {0} is not 1")]
    BadTrace(f64),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("axis must be a nonzero unit vector, got norm {0}")]
    BadAxis(f64),
    #[error("wave number must be positive and finite, got {0}")]
    BadWaveNumber(f64),
    #[error("half-separation must be positive and finite, got {0}")]
    BadSeparation(f64),
    #[error("{0}")]
    Precondition(String),
    #[error("no coupling satisfies the balance condition: {0}")]
    NoSolution(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Faults that indicate a bug or numerical breakdown rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
