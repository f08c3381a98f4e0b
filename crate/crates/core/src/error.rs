//! Error type shared by the core operations.

use thiserror::Error;

/// Errors produced while building generators or solving for harmonic pairs.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// A measure failed validation (unsorted atoms, overlapping density
    /// pieces, negative mass where positivity is required, ...).
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// A generator description failed validation.
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    /// The generator (after a perturbation) is not transient: no positive
    /// harmonic pair with the required asymptotics exists, so there is no
    /// Green's function.  Carries the shooting margin (negative or ~0).
    #[error("generator is not transient (shooting margin {margin})")]
    NotTransient { margin: f64 },

    /// The marching solution exceeded the overflow guard.
    #[error("harmonic solution overflowed near x = {x}")]
    Overflow { x: f64 },

    /// An evaluation point lies outside the generator's interval.
    #[error("point {x} outside the generator interval")]
    OutsideDomain { x: f64 },

    /// A JSON configuration could not be interpreted.
    #[error("config error: {0}")]
    Config(String),

    /// An operation's precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Convenient result alias.
pub type CoreResult<T> = Result<T, CoreError>;
