use std::io;

use thiserror::Error;

/// Errors produced by the gasket engine.
#[derive(Debug, Error)]
pub enum GasketError {
    /// An argument is outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested level cannot be represented with the configured integer widths.
    #[error("level {level} exceeds capacity (maximum supported level is {max})")]
    Capacity { level: u32, max: u32 },

    /// A density was requested for a ball that carries no mass.
    #[error("empty ball: the ball has zero mass")]
    EmptyBall,

    /// A similarity map produced a point outside the triangle or off the lattice.
    #[error("map image is not a lattice point of the triangle: {0}")]
    OffLattice(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = GasketError> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> GasketError {
    GasketError::Domain(msg.into())
}
