use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Pure-Neumann problem whose loads do not sum to zero.
    #[error("ill-posed problem: net flux {net:e} against total {total:e} with no Dirichlet boundary")]
    IllPosed { net: f64, total: f64 },

    #[error("singular system: no Dirichlet constraint and no gauge pin")]
    SingularSystem,

    #[error("conjugate gradients did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverFailure { iterations: usize, residual: f64 },

    /// Solver failure raised inside an optimisation run.
    #[error("optimisation failed at iteration {iteration}: {source}")]
    RunFailure {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid gate spec: {0}")]
    InvalidSpec(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
