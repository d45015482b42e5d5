use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("glucose value {value} at row {row} is not strictly positive")]
    NonPositiveGlucose { row: usize, value: f64 },
    #[error("too few rows for {what}: need at least {needed}, found {found}")]
    TooFewRows {
        what: &'static str,
        needed: usize,
        found: usize,
    },
    #[error("feature {feature} has zero energy and cannot be normalised")]
    ZeroEnergy { feature: usize },
    #[error("window length {window} is invalid for a series of length {len}")]
    InvalidWindow { window: usize, len: usize },
    #[error("reference glucose vector has zero norm")]
    ZeroGlucoseNorm,
    #[error("matrix is numerically singular")]
    Singular,
    #[error("value {value} is outside the accepted range {range}")]
    OutOfRange { value: f64, range: &'static str },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("feature {feature}: {source}")]
    Feature { feature: usize, source: Box<Error> },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
