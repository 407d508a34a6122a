use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "learning step eta = {eta} is at or beyond the stability limit 2/(M(1+gamma)+2) = {critical}; \
         the closed-form solution has no steady state there (use the ODE integrator instead)"
    )]
    UnstableStep { eta: f64, critical: f64 },

    #[error(
        "negative discriminant {discriminant} in optimal-ratio formula at M = {m}, eta = {eta}"
    )]
    NegativeDiscriminant {
        m: usize,
        eta: f64,
        discriminant: f64,
    },

    #[error("record grids differ: {0}")]
    GridMismatch(String),

    #[error("scenario file line {line}: key `{key}`: {message}")]
    Scenario {
        line: usize,
        key: String,
        message: String,
    },

    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("nothing to plot")]
    EmptyPlot,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
