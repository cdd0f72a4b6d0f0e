use thiserror::Error;

use crate::sdp::SdpStatus;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("kraus[{index}]: {reason}")]
    InvalidKraus { index: usize, reason: String },

    #[error("channel is not CPTP: {0}")]
    NotCptp(String),

    #[error("SDP solver stopped with status {status:?} after {iterations} iterations")]
    Solver {
        status: SdpStatus,
        iterations: usize,
    },

    #[error("inconsistent SDP: {0}")]
    InconsistentProblem(String),

    #[error("size guard exceeded: {0}")]
    TooLarge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("channel file: {0}")]
    Parse(String),
}
