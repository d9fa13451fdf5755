use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{requested} qubits exceeds the dense-storage cap of {cap}")]
    QubitCap { requested: usize, cap: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("matrix is not unitary (max |U†U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max |A - A†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("coefficient draw at {requested} scope is not valid for {class} noise")]
    ScopeMismatch {
        requested: &'static str,
        class: &'static str,
    },

    #[error("duplicate noise term {0}")]
    DuplicateTerm(String),

    #[error("insufficient points: need at least {needed}, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("outside the closed-form model: {0}")]
    OutOfModel(String),

    #[error("missing decay rate for subset {0:?}")]
    MissingSubset(Vec<usize>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of the numerics (non-convergence, unitarity breach)
    /// as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotUnitary { .. } | Error::NoConvergence { .. }
        )
    }
}
