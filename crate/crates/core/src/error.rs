use thiserror::Error;

/// Errors produced by the solvers and velocity-space utilities.
#[derive(Debug, Error)]
pub enum Error {
    /// A potential or density left the admissible interval of the electron closure.
    #[error("closure domain error: {0}")]
    ClosureDomain(String),

    /// A density fell outside the range of the electron closure.
    #[error("closure range error: {0}")]
    ClosureRange(String),

    /// Invalid configuration or parameters (exit code 1 territory).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed input data (grids, snapshot counts, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// A field state violated positivity or boundary invariants.
    #[error("state error: {0}")]
    State(String),

    /// An iteration or quadrature failed to converge (exit code 2 territory).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Requested connection is not a 3-rarefaction.
    #[error("not a rarefaction: {0}")]
    NotARarefaction(String),

    /// Moments of a gridded distribution were unusable.
    #[error("degenerate moments: {0}")]
    DegenerateMoments(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 1 for validation problems, 2 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Input(_) | Error::NotARarefaction(_) => 1,
            _ => 2,
        }
    }
}
