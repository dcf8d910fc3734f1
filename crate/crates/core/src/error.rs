use thiserror::Error;

/// Library-wide error type. Variants split along the boundary that matters to
/// callers: bad inputs (rejected before any computation) versus numerical
/// failures discovered mid-computation.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter or argument outside its documented range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Configuration or I/O problem (bad config file, unwritable path).
    #[error("{0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Covariance matrix violates the physicality bound (min symplectic
    /// eigenvalue below 1/2 - 1e-9).
    #[error("unphysical state: {0}")]
    Unphysical(String),

    /// Eigenvalue pairing or other spectral structure broke down.
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    /// Drift matrix has no strictly negative spectral abscissa.
    #[error("no steady state: {0}")]
    NoSteadyState(String),

    /// Iterative solver did not reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Time integration produced a non-finite or badly non-physical state.
    #[error("integration blow-up: {0}")]
    Blowup(String),

    /// Any other numerical failure (singular systems, residual checks, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Process exit code: 1 for validation/configuration problems, 2 for
    /// numerical or convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Config(_) | Error::Io(_) => 1,
            Error::Unphysical(_)
            | Error::Degenerate(_)
            | Error::NoSteadyState(_)
            | Error::Convergence(_)
            | Error::Blowup(_)
            | Error::Numerical(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
