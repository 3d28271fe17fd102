use thiserror::Error;

/// Errors raised by the laboratory's constructors and numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid offspring law: {0}")]
    InvalidLaw(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fixed-point iteration did not converge after {iterations} steps (last iterate {last})")]
    NonConvergence { iterations: u64, last: f64 },

    #[error("law has too much mass beyond the truncation point (tail = {tail:e})")]
    ExcessiveTail { tail: f64 },

    #[error("conditioning on survival is undefined: survival mass {mass:e}")]
    NoSurvival { mass: f64 },

    #[error("rejection budget of {budget} attempts exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("enumeration limit exceeded: {0}")]
    EnumerationLimit(String),

    #[error("sample too small: {got} values, need at least {need}")]
    SampleTooSmall { got: usize, need: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("unknown experiment `{name}`; registered: {known}")]
    UnknownExperiment { name: String, known: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
