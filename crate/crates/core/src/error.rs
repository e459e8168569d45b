use alloc::string::String;

/// Errors raised by the channel model.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Geometry collapsed (point on a plane, zero-length vector, ...).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    /// A path delay shorter than the line-of-sight distance allows.
    #[error("infeasible delay: path length {length} m is shorter than the direct distance {direct} m")]
    InfeasibleDelay { length: f64, direct: f64 },
    /// Invalid model parameters.
    #[error("configuration error: {0}")]
    Config(String),
    /// Normal equations of the position solver are singular.
    #[error("singular positioning geometry: {0}")]
    SingularGeometry(String),
    /// No correlation peak passed the detection threshold.
    #[error("no first arriving path above the detection threshold")]
    DetectionFailure,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
macro_rules! degenerate {
    ($($arg:tt)*) => { $crate::error::Error::DegenerateGeometry(alloc::format!($($arg)*)) };
}
macro_rules! config {
    ($($arg:tt)*) => { $crate::error::Error::Config(alloc::format!($($arg)*)) };
}
pub(crate) use {config, degenerate, domain};
