//! Determinantal point configurations attached to a transient
//! one-dimensional diffusion.
//!
//! A transient diffusion with generator data `(m, w, κ)` (see
//! [`loopsoup_core`]) carries a canonical pair of interleaved point
//! processes on its interval:
//!
//! * the **kill points** `Y` — positions where independent copies of the
//!   diffusion die, with first-order intensity `G(y,y) m(y) κ(dy)`;
//! * the **gap points** `Z` — one point strictly between each pair of
//!   consecutive kill points, with intensity `−v↑(z) v↓(z) w(z) dz`.
//!
//! Together they form a determinantal family: every joint correlation is a
//! determinant built from the Green's function `G = u↑(x∧y)·u↓(x∨y)` and
//! the second-kind kernel `𝒦`.  This crate provides
//!
//! * [`PointConfig`] — a validated interleaved configuration, together with
//!   the covered segments produced by sampling;
//! * [`wilson_step`]/[`wilson_sample`] — the random-walk construction: run
//!   a killed diffusion from a start point, record where it dies, and glue
//!   the swept interval onto the configuration; iterated over a dense
//!   sequence of starts this converges to the exact joint law;
//! * [`chain_sample`] — a left-to-right renewal sampler using the exact
//!   closed-form transition densities (natural boundaries on both sides);
//! * [`joint_density`], [`count_moment_y`], [`count_moment_z`] — closed-form
//!   correlation evaluation, with multi-interval moments computed by a
//!   cancellation-free factorized determinant;
//! * [`resample_z_given_y`], [`resample_y_given_z`] — the two conditional
//!   (Gibbs) moves, each in closed form.
//!
//! Two independent samplers with one set of closed-form laws means every
//! piece can be cross-checked against the others; the integration tests do
//! exactly that.

pub mod chain;
pub mod kernel;
pub mod points;
pub mod resample;
mod sampling;
pub mod wilson;

use thiserror::Error;

pub use chain::chain_sample;
pub use kernel::{count_moment_y, count_moment_z, joint_density, KernelK};
pub use points::{Gap, PointConfig};
pub use resample::{resample_y_given_z, resample_z_given_y};
pub use wilson::{
    start_window, van_der_corput, wilson_sample, wilson_sample_adaptive, wilson_step, GapLaw,
    RawOutcome, StepOutcome, WilsonReport,
};

/// Errors produced by the configuration samplers.
#[derive(Debug, Error)]
pub enum DppError {
    /// Propagated from the harmonic-pair machinery.
    #[error(transparent)]
    Core(#[from] loopsoup_core::CoreError),

    /// A point configuration violates the interleaving invariant.
    #[error("invalid point configuration: {0}")]
    InvalidConfig(String),

    /// An operation's precondition was violated (wrong boundary kind,
    /// overlapping moment intervals, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A closed-form normalization failed its numerical self-check; the
    /// payload carries the computed mass and its expected value.
    #[error("normalization self-check failed in {context}: mass {mass}, expected {expected}")]
    MassMismatch {
        context: &'static str,
        mass: f64,
        expected: f64,
    },
}

/// Convenience alias.
pub type DppResult<T> = Result<T, DppError>;
