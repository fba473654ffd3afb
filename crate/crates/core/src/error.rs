use thiserror::Error;

/// Errors reported by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alist parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("channel kind mismatch: model is {model}, output is {output}")]
    KindMismatch { model: &'static str, output: &'static str },

    #[error("missing Gallager threshold for iteration {iteration}, degree {degree}")]
    MissingThreshold { iteration: usize, degree: usize },

    #[error("check {check} has degree {degree}, above the cap of {cap}")]
    DegreeCapExceeded { check: usize, degree: usize, cap: usize },

    #[error("LP solver failure: {0}")]
    Solver(String),

    #[error("pseudo-codeword is the zero vector")]
    ZeroVector,

    #[error("trace did not fail; no trapping set to extract")]
    NotAFailure,

    #[error("initialization failed after {0} attempts")]
    RetryCapExceeded(usize),

    #[error("no decoding failure found below scale cap {0}")]
    NoFailureBelowCap(f64),

    #[error("search did not converge within {steps} steps")]
    NotConverged { steps: usize },

    #[error("instanton spectrum is empty")]
    EmptySpectrum,

    #[error("construction infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    /// True for failures of an algorithm (solver, caps) rather than of the input.
    pub fn is_algorithmic(&self) -> bool {
        matches!(
            self,
            Error::Solver(_)
                | Error::RetryCapExceeded(_)
                | Error::NoFailureBelowCap(_)
                | Error::NotConverged { .. }
                | Error::Infeasible(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn expect_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}
