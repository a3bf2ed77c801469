use thiserror::Error;

/// Errors raised by the numerical and exact routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature too coarse: {0}")]
    QuadratureTooCoarse(String),

    #[error("ill-conditioned grid: Gram matrix {0}")]
    IllConditionedGrid(String),

    #[error("Toeplitz matrix is numerically singular (condition number {cond:.3e})")]
    SingularToeplitz { cond: f64 },

    #[error("symbol is not real-valued on the grid (max |Im| = {max_imag:.3e})")]
    NonRealSymbol { max_imag: f64 },

    #[error("degenerate orbit: {0}")]
    DegenerateOrbit(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("{0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
