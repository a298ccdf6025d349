//! Error type shared across the crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Vector/matrix dimensions do not match the expected layout.
    DimensionMismatch { expected: usize, got: usize, what: &'static str },
    /// A matrix that should be a rotation violates orthogonality/determinant bounds.
    InvalidRotation { residual: f64 },
    /// A covariance matrix lost positive semidefiniteness beyond tolerance.
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    /// Non-positive or otherwise invalid time step.
    InvalidTimeStep(f64),
    /// Identifier already present (keyframe id, clone timestamp).
    DuplicateId(u64),
    /// Identifier not found in the state.
    UnknownId(u64),
    /// Operation requires at least one clone in the window.
    EmptyWindow,
    /// The augmented variable was already initialized.
    AlreadyInitialized,
    /// The augmented variable has not been initialized yet.
    NotInitialized,
    /// Linear system too ill-conditioned to solve.
    IllConditioned { condition: f64 },
    /// Geometry too degenerate for the requested operation.
    DegenerateGeometry(&'static str),
    /// A point lies behind the camera (or closer than the near plane).
    BehindCamera { depth: f64 },
    /// Configuration file problem, with a human-readable location.
    Config(String),
    /// Underlying I/O failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got, what } => {
                write!(f, "dimension mismatch for {what}: expected {expected}, got {got}")
            }
            Error::InvalidRotation { residual } => {
                write!(f, "matrix is not a rotation (orthogonality residual {residual:.3e})")
            }
            Error::NotPositiveSemidefinite { min_eigenvalue } => {
                write!(f, "covariance not PSD (min eigenvalue {min_eigenvalue:.3e})")
            }
            Error::InvalidTimeStep(dt) => write!(f, "invalid time step {dt}"),
            Error::DuplicateId(id) => write!(f, "duplicate id {id}"),
            Error::UnknownId(id) => write!(f, "unknown id {id}"),
            Error::EmptyWindow => write!(f, "clone window is empty"),
            Error::AlreadyInitialized => write!(f, "augmented variable already initialized"),
            Error::NotInitialized => write!(f, "augmented variable not initialized"),
            Error::IllConditioned { condition } => {
                write!(f, "linear system ill-conditioned (cond {condition:.3e})")
            }
            Error::DegenerateGeometry(what) => write!(f, "degenerate geometry: {what}"),
            Error::BehindCamera { depth } => write!(f, "point behind camera (depth {depth:.3})"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
