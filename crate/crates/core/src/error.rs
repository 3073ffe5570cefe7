use num_complex::Complex64;
use thiserror::Error;

use crate::chebtech::ChebSeries;
use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// State of a solve that ran out of sweeps.
#[derive(Debug, Clone)]
pub struct ConvergenceFailure {
    /// Eigenvalues that had deflated before the cap was hit, with their
    /// 0-based positions.
    pub converged: Vec<(usize, Complex64)>,
    pub sweeps: usize,
    pub gamma_hat: f64,
    /// Unreduced window (0-based, inclusive) the iteration was stuck on.
    pub window: (usize, usize),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degree {degree} is too small for this operation (need at least {min})")]
    DegreeTooSmall { degree: usize, min: usize },

    #[error("leading coefficient {lead:e} is negligible relative to max |c_k| = {max:e}")]
    LeadingCoefficient { lead: f64, max: f64 },

    #[error("index ({i}, {j}) out of range for dimension {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("dense materialization of a {n}x{n} matrix exceeds the limit {limit}")]
    SizeGuard { n: usize, limit: usize },

    #[error("no coefficient plateau up to degree {max_degree}; the function may not be smooth")]
    NoPlateau {
        max_degree: usize,
        best: Box<ChebSeries<f64>>,
    },

    #[error(
        "QR iteration did not converge after {} sweeps ({} eigenvalues found)",
        .0.sweeps,
        .0.converged.len()
    )]
    NoConvergence(Box<ConvergenceFailure>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{path}:{line}: {msg}")]
    BadCoefficientFile {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
