use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A state or operator failed one of its structural invariants.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A density matrix developed an eigenvalue below the run tolerance.
    #[error("positivity breach at step {step}: minimum eigenvalue {min_eig:e}")]
    PsdBreach { step: usize, min_eig: f64 },

    #[error("ancilla truncation too small: max |xi|^2 = {max_xi_sq:e} needs d > {required:.1}, got d = {d}")]
    Truncation {
        max_xi_sq: f64,
        required: f64,
        d: usize,
    },

    #[error("resource cap exceeded: joint dimension {required} exceeds cap {cap}")]
    ResourceCap { required: usize, cap: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code associated with this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::File { .. } | Error::InvalidInput(_) => 1,
            Error::ResourceCap { .. } => 3,
            Error::DimensionMismatch(_)
            | Error::Invariant(_)
            | Error::PsdBreach { .. }
            | Error::Truncation { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
