//! Green's functions and harmonic pairs for one-dimensional generators with
//! measure coefficients.
//!
//! A generator is described by a speed density `m`, a scale derivative `w`
//! (both piecewise constant and positive) and a killing measure `κ` (atoms
//! plus a piecewise-linear density).  Harmonic functions solve, in the
//! measure sense,
//!
//! ```text
//!     d(u'/w) = u · m · κ(dx),
//! ```
//!
//! so that crossing an atom of mass `c` at `x` kicks the derivative:
//! `u'(x+) - u'(x-) = w(x) m(x) c · u(x)`.  Standard Brownian motion is
//! `m = 1`, `w = 2` (so the harmonic equation is `½u'' = κu`).  Killing is
//! the positive sign of `κ`; mass creation enters as negative mass.
//!
//! The crate provides:
//!
//! * [`measure::RadonMeasure`] — signed measures with atoms and a piecewise
//!   linear density part;
//! * [`generator::GeneratorSpec`] — interval, boundary kinds, `m`, `w`, `κ`;
//! * [`solve`] — an exact marching solver for the harmonic equation
//!   (`cosh`/`sinh` propagation between breakpoints, frozen-coefficient
//!   substeps where the density has a slope);
//! * [`harmonic::HarmonicSystem`] — the normalized nondecreasing /
//!   nonincreasing pair `(u↑, u↓)` with Wronskian `u↓u↑' − u↑u↓' ≡ w`, the
//!   Green's function `G(x,y) = u↑(x∧y) u↓(x∨y)`, and restricted variants;
//! * [`classify`] — the transient / critical / supercritical trichotomy of
//!   `L + ν` by shooting;
//! * [`config`] — the JSON description of a generator;
//! * [`quad`] — small quadrature helpers used throughout the workspace.
//!
//! All numerical kernels are generic over the scalar type through
//! [`Real`]; `f64` aliases are exported at the crate root.

pub mod classify;
pub mod config;
pub mod error;
pub mod generator;
pub mod harmonic;
pub mod measure;
pub mod quad;
pub mod solve;

use std::fmt;

use num_traits::Float;

pub use classify::{classify, ClassifyReport, TransienceClass};
pub use config::GeneratorConfig;
pub use error::CoreError;
pub use generator::{perturb, Boundary, GeneratorSpec, Piecewise};
pub use harmonic::{
    harmonic_pair, wronskian_v, CombPair, HarmonicSystem, RestrictBc, RestrictSide,
    RestrictedHarmonics,
};
pub use measure::{DensityPiece, RadonMeasure};
pub use solve::{solve_ivp, Solution};

/// Scalar type used by the numerical kernels.
///
/// `of` converts literal constants; it is total for the provided `f32`/`f64`
/// implementations.
pub trait Real: Float + fmt::Debug + fmt::Display + Copy + 'static {
    /// Lossy cast from `f64`, used for numeric literals inside the kernels.
    fn of(x: f64) -> Self;
    /// Lossy cast to `f64`, used for diagnostics.
    fn to_f64(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// `f64` measure.
pub type Measure64 = RadonMeasure<f64>;
/// `f64` generator description.
pub type Generator64 = GeneratorSpec<f64>;
/// `f64` harmonic pair.
pub type Harmonic64 = HarmonicSystem<f64>;
