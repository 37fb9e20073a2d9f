use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can signal.
#[derive(Debug, Error)]
pub enum Error {
    #[error("requested tolerance {requested:e} is below the attainable error {attainable:e} at t = {t}")]
    PrecisionUnreachable { t: f64, requested: f64, attainable: f64 },
    #[error("zero count mismatch on [{t_lo}, {t_hi}): found {found}, expected {expected}")]
    MissedZero { t_lo: f64, t_hi: f64, found: u64, expected: u64 },
    #[error("Turing bound cannot pin N({t}): count lies in [{lower}, {upper}]")]
    CertificationFailure { t: f64, lower: f64, upper: f64 },
    #[error("height {requested} is outside the table coverage [{t_min}, {t_max}]")]
    OutOfCoverage { requested: f64, t_min: f64, t_max: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: ordinates must be strictly increasing")]
    Monotonicity { line: usize },
    #[error("line {line}: ordinate must be positive")]
    Negativity { line: usize },
    #[error("network error fetching {url}: {message}")]
    Network { url: String, message: String },
    #[error("checksum mismatch for {what}: expected {expected}, got {actual}")]
    ChecksumMismatch { what: String, expected: String, actual: String },
    #[error("unknown zero-table source `{0}`")]
    UnknownSource(String),
    #[error("malformed cache file {path}: {message}")]
    CacheFormat { path: PathBuf, message: String },
    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureNonconvergence { a: f64, b: f64 },
    #[error("tail of the smoothed sum cannot reach tolerance at truncation {reach}")]
    TailNonconvergence { reach: f64 },
    #[error("parameter `{name}` = {value} is out of range: {requirement}")]
    ParameterRange { name: &'static str, value: f64, requirement: String },
    #[error("cannot read `{text}`: {message}")]
    InvalidLiteral { text: String, message: String },
    #[error("eigensolver did not converge for dimension {dimension}")]
    LinearAlgebra { dimension: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(ok: bool, name: &'static str, value: f64, requirement: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ParameterRange { name, value, requirement: requirement.to_string() })
    }
}
