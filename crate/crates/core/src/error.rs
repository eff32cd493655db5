//! Error type shared by every module of the crate.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the laboratory.
///
/// Variants are coarse on purpose: callers branch on the *kind* of
/// failure (bad input vs. solver breakdown vs. configuration), while the
/// contained message carries the quantitative diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A proposed flux model failed validation (roots, concavity, …).
    InvalidFlux(String),
    /// A numerical argument fell outside its admissible range.
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    /// A structurally invalid argument (sizes, orderings, missing data).
    InvalidParameter(String),
    /// A root-find failed; the message carries the bracketing diagnostics.
    RootFind(String),
    /// A solver produced non-finite values or lost a stability guarantee.
    SolverFailure(String),
    /// An experiment configuration could not be parsed or resolved.
    Config(String),
    /// Reading or writing an artifact failed.
    Io(String),
}

impl Error {
    /// Convenience constructor for range violations.
    pub fn domain(what: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Error::Domain {
            what,
            value,
            lo,
            hi,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFlux(msg) => write!(f, "invalid flux model: {msg}"),
            Error::Domain {
                what,
                value,
                lo,
                hi,
            } => write!(f, "{what} = {value} outside admissible range [{lo}, {hi}]"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::RootFind(msg) => write!(f, "root-find failed: {msg}"),
            Error::SolverFailure(msg) => write!(f, "solver failure: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
