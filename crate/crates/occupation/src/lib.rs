//! Occupation fields of Poisson ensembles of Markovian loops over
//! one-dimensional diffusions.
//!
//! A loop ensemble of intensity `alpha` attached to a transient generator
//! `L = (1/m) d/dx ((1/w) d/dx) - kappa` induces a random field
//! `x -> V(x)`: the sum over all loops of their local time at `x`,
//! normalised with respect to the measure `m(x) dx`. This crate samples
//! that field exactly and evaluates its closed-form functionals.
//!
//! The key structural facts implemented here:
//!
//! * **One-point law.** `V(x)` is Gamma distributed with shape `alpha`
//!   and mean `alpha * G(x, x)`, where `G` is the Green's function of `L`.
//!
//! * **Markov property in space and exact transitions.** After the
//!   deterministic change of scale `s(x) = u_up(x) / (2 u_down(x))` and
//!   the change of value `V(x) = u_down(x)^2 Q(s(x))`, the process `Q` is
//!   a squared Bessel process of dimension `2 alpha` started from zero.
//!   Its transition kernel is an explicit Poisson mixture of Gamma laws,
//!   so the field is sampled on any grid without discretisation error
//!   ([`sample_field`]).
//!
//! * **Laplace transforms are determinants.** Joint Laplace functionals
//!   of the field at finitely many points reduce to ratios of Green
//!   matrix determinants raised to the power `alpha` ([`laplace_det`]),
//!   and product moments are alpha-permanents of the Green matrix
//!   ([`permanental_moment`]). Exponential functionals against a signed
//!   measure are Fredholm determinants, evaluated by two independent
//!   routes ([`exp_moment`]).
//!
//! * **Isomorphism with the Gaussian free field.** At intensity
//!   `alpha = 1/2` the field has the law of `phi^2 / 2` where `phi` is
//!   the centred Gaussian field with covariance `G` ([`sample_gff`]).
//!
//! * **Clusters.** For `alpha < 1` the field touches zero infinitely
//!   often and splits the domain into disjoint clusters; for
//!   `alpha >= 1` it stays strictly positive. [`sample_field`] records,
//!   for every grid step, an exact Bernoulli indicator of whether the
//!   underlying continuous field vanished inside the step, so
//!   [`clusters`] reports honest cluster counts that refine with the
//!   grid instead of being artefacts of grid resolution.
//!
//! Values of the field are local times relative to `m(x) dx`; all
//! closed-form functionals below are expressed in the Green's function
//! `G` alone, with no additional density factors.

mod besq;
mod clusters;
mod field;
mod gff;
mod moments;
mod sample;

pub use besq::{besq_transition, zero_hit_probability};
pub use clusters::clusters;
pub use field::{GffSample, OccupationField};
pub use gff::sample_gff;
pub use moments::{exp_moment, laplace_det, permanental_moment, ExpMomentValue};
pub use sample::{conjugate_scale, sample_field};

use loopsoup_core::CoreError;

/// Errors produced by occupation-field routines.
#[derive(Debug, thiserror::Error)]
pub enum OccupationError {
    /// An underlying generator / harmonic-pair computation failed.
    #[error(transparent)]
    Core(#[from] CoreError),
    /// Inputs violate a documented precondition of the routine.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Convenience alias for results in this crate.
pub type OccupationResult<T> = Result<T, OccupationError>;

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> OccupationResult<()> {
    if cond {
        Ok(())
    } else {
        Err(OccupationError::Precondition(msg()))
    }
}
