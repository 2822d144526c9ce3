use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid base {base}: expected a base of at least {min}")]
    InvalidBase { base: u32, min: u32 },

    #[error("malformed pattern: {0}")]
    MalformedPattern(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A construction was asked to run outside the parameter range where its
    /// digit-sum formulas are known to hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("calibration unstable for q={q}, m={m}: observed e1 values {observed:?}")]
    CalibrationInstability { q: u32, m: u64, observed: Vec<i64> },

    #[error("ratio out of range: {0}")]
    Range(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported exponent {h}/{m}: only h/m < 1/2 (or exactly 1/2) is constructible")]
    UnsupportedExponent { h: u64, m: u64 },

    /// A constructor produced a value that failed independent re-verification.
    #[error("construction defect: {0}")]
    ConstructionDefect(String),

    #[error("floor is indeterminate at the precision cap of {precision} bits")]
    IndeterminateFloor { precision: u64 },

    #[error("search exhausted: {0}")]
    SearchExhausted(String),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidBase { .. } => "invalid-base",
            Error::MalformedPattern(_) => "malformed-pattern",
            Error::Parse(_) => "parse",
            Error::Hypothesis(_) => "hypothesis",
            Error::CalibrationInstability { .. } => "calibration-instability",
            Error::Range(_) => "range",
            Error::Domain(_) => "domain",
            Error::UnsupportedExponent { .. } => "unsupported-exponent",
            Error::ConstructionDefect(_) => "construction-defect",
            Error::IndeterminateFloor { .. } => "indeterminate-floor",
            Error::SearchExhausted(_) => "search-exhausted",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_base(q: u32, min: u32) -> Result<()> {
    if q < min {
        Err(Error::InvalidBase { base: q, min })
    } else {
        Ok(())
    }
}
