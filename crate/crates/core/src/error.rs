use thiserror::Error;

/// Errors raised by the spectral and dynamical computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spectrum point {0} is not strictly positive")]
    NonPositivePoint(f64),
    #[error("spectrum has no eigenvalues and no intervals")]
    EmptySpectrum,
    #[error("invalid spectrum description: {0}")]
    InvalidSpectrum(String),
    #[error("s = {s} lies outside the tabulated range [{lo}, {hi}] and no tail is given")]
    OutOfRange { s: f64, lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("the generator is not bijective (0 belongs to its spectrum)")]
    NotBijective,
    #[error("i*{0} lies on the spectrum of the generator")]
    OnSpectrum(f64),
    #[error("only {found} envelope points in range, need at least {needed}")]
    InsufficientRange { found: usize, needed: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable short name, used by the command line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonPositivePoint(_) => "NonPositivePoint",
            Error::EmptySpectrum => "EmptySpectrum",
            Error::InvalidSpectrum(_) => "InvalidSpectrum",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NotBijective => "NotBijective",
            Error::OnSpectrum(_) => "OnSpectrum",
            Error::InsufficientRange { .. } => "InsufficientRange",
            Error::Precondition(_) => "Precondition",
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
