use thiserror::Error;

use crate::simplex::LpError;

/// Errors raised by the geometry, transform, and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("scale factor must be non-negative, got {0}")]
    NegativeScale(f64),

    #[error("body does not fit inside the period cube: {0}")]
    OutsidePeriod(String),

    #[error("lattice is not commensurate with the grid: column {column}: {reason}")]
    Incommensurate { column: usize, reason: String },

    #[error("function is not symmetric: |f(k) - f(-k)| = {deviation:e} at flat index {index}")]
    Asymmetric { index: usize, deviation: f64 },

    #[error("expected a {expected} domain function")]
    WrongDomain { expected: &'static str },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("grid too large for the dense oracle: {points} points exceed {limit}")]
    GridTooLarge { points: usize, limit: usize },

    #[error("alpha ({alpha}) must not exceed beta ({beta})")]
    AlphaExceedsBeta { alpha: f64, beta: f64 },

    #[error("no volume available: {0}")]
    NoVolume(String),

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error("malformed binary dump: {0}")]
    Format(String),

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
