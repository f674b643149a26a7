use core::fmt;

/// Errors surfaced by the channel, hybrid-approximation, design, and metric
/// operations. Messages are static so the crate stays allocation-free on the
/// error path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidArgument(&'static str),
    /// Matrix or beamformer dimensions do not chain.
    DimensionMismatch(&'static str),
    /// Array geometry is degenerate (e.g. coincident tx/rx elements).
    InvalidGeometry(&'static str),
    /// A factorization or solve failed numerically.
    NumericalFailure(&'static str),
    /// A precoder column has zero effective power and cannot be normalized.
    DegeneratePrecoder,
    /// A combiner is rank-deficient, so its Gram matrix cannot be inverted.
    DegenerateCombiner,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::InvalidGeometry(msg) => write!(f, "invalid geometry: {msg}"),
            Error::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            Error::DegeneratePrecoder => write!(f, "degenerate precoder: zero effective column"),
            Error::DegenerateCombiner => write!(f, "degenerate combiner: rank-deficient Gram"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
