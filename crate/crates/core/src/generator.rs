//! Generator descriptions: interval, boundary behaviour, speed and scale
//! coefficients, killing measure.

use crate::classify::{classify, TransienceClass};
use crate::error::{CoreError, CoreResult};
use crate::measure::RadonMeasure;
use crate::Real;

/// Boundary behaviour at one end of the interval.
///
/// `Killed` requires a finite endpoint: the process is absorbed and killed
/// there (Dirichlet condition `u = 0` for the harmonic function vanishing at
/// that side).  `Natural` covers an infinite endpoint, or a finite
/// inaccessible/reflecting one (Neumann condition, zero derivative).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Killed,
    Natural,
}

/// Piecewise-constant positive coefficient with a default value outside the
/// listed pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise<F> {
    default: F,
    pieces: Vec<(F, F, F)>, // (x_lo, x_hi, value), sorted, disjoint
}

impl<F: Real> Piecewise<F> {
    /// Constant coefficient.
    pub fn constant(value: F) -> Self {
        Self { default: value, pieces: Vec::new() }
    }

    /// Pieces `(x_lo, x_hi, value)` over a default value.
    pub fn new(default: F, mut pieces: Vec<(F, F, F)>) -> CoreResult<Self> {
        if !(default > F::zero()) {
            return Err(CoreError::InvalidGenerator("coefficient default must be positive".into()));
        }
        pieces.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for win in pieces.windows(2) {
            if win[0].1 > win[1].0 {
                return Err(CoreError::InvalidGenerator("coefficient pieces overlap".into()));
            }
        }
        for &(lo, hi, v) in &pieces {
            if !(hi > lo) || !(v > F::zero()) || !v.is_finite() {
                return Err(CoreError::InvalidGenerator("bad coefficient piece".into()));
            }
        }
        Ok(Self { default, pieces })
    }

    /// Value at `x` (pieces are right-open).
    pub fn at(&self, x: F) -> F {
        for &(lo, hi, v) in &self.pieces {
            if lo <= x && x < hi {
                return v;
            }
        }
        self.default
    }

    /// Piece endpoints (solver breakpoints).
    pub fn breakpoints(&self) -> Vec<F> {
        let mut xs = Vec::with_capacity(2 * self.pieces.len());
        for &(lo, hi, _) in &self.pieces {
            xs.push(lo);
            xs.push(hi);
        }
        xs
    }

    /// True if the coefficient is a single constant.
    pub fn is_constant(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Default (outside-pieces) value.
    pub fn default_value(&self) -> F {
        self.default
    }
}

/// A one-dimensional generator with measure coefficients:
/// speed density `m`, scale derivative `w` (both piecewise constant,
/// positive) and killing measure `κ` (killing-positive sign convention;
/// negative mass means mass creation and only arises through
/// perturbations).
///
/// Standard Brownian motion is `m = 1`, `w = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec<F> {
    pub lo: F,
    pub hi: F,
    pub lo_boundary: Boundary,
    pub hi_boundary: Boundary,
    pub m: Piecewise<F>,
    pub w: Piecewise<F>,
    pub kappa: RadonMeasure<F>,
}

impl<F: Real> GeneratorSpec<F> {
    /// Validating constructor.
    pub fn new(
        lo: F,
        hi: F,
        lo_boundary: Boundary,
        hi_boundary: Boundary,
        m: Piecewise<F>,
        w: Piecewise<F>,
        kappa: RadonMeasure<F>,
    ) -> CoreResult<Self> {
        if !(lo < hi) {
            return Err(CoreError::InvalidGenerator(format!("empty interval [{lo}, {hi}]")));
        }
        if lo_boundary == Boundary::Killed && !lo.is_finite() {
            return Err(CoreError::InvalidGenerator("killed boundary at -inf".into()));
        }
        if hi_boundary == Boundary::Killed && !hi.is_finite() {
            return Err(CoreError::InvalidGenerator("killed boundary at +inf".into()));
        }
        if let Some((slo, shi)) = kappa.support_bounds() {
            if slo < lo || shi > hi {
                return Err(CoreError::InvalidGenerator(
                    "killing measure charges points outside the interval".into(),
                ));
            }
        }
        Ok(Self { lo, hi, lo_boundary, hi_boundary, m, w, kappa })
    }

    /// Standard Brownian motion on the line with killing measure `kappa`.
    pub fn brownian_with_killing(kappa: RadonMeasure<F>) -> CoreResult<Self> {
        Self::new(
            F::neg_infinity(),
            F::infinity(),
            Boundary::Natural,
            Boundary::Natural,
            Piecewise::constant(F::one()),
            Piecewise::constant(F::of(2.0)),
            kappa,
        )
    }

    /// Standard Brownian motion on `(lo, ∞)` killed at `lo`.
    pub fn brownian_killed_at(lo: F) -> CoreResult<Self> {
        Self::new(
            lo,
            F::infinity(),
            Boundary::Killed,
            Boundary::Natural,
            Piecewise::constant(F::one()),
            Piecewise::constant(F::of(2.0)),
            RadonMeasure::zero(),
        )
    }

    /// Interior test for evaluation points.
    pub fn contains(&self, x: F) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Image of the generator under the increasing affine map
    /// `y = a·x + b` (`a > 0`).  Harmonic functions transport as
    /// `u_Y = u ∘ φ⁻¹`, so the Green's function satisfies
    /// `G_Y(φx, φx') = G(x, x')` and the occupation field at mapped points
    /// has the same law.
    pub fn affine_image(&self, a: F, b: F) -> CoreResult<Self> {
        if !(a > F::zero()) {
            return Err(CoreError::InvalidGenerator("affine map must be increasing".into()));
        }
        let map = |x: F| a * x + b;
        let inv_a = F::one() / a;
        let m = Piecewise::new(
            self.m.default_value() * inv_a,
            self.m.pieces.iter().map(|&(lo, hi, v)| (map(lo), map(hi), v * inv_a)).collect(),
        )?;
        let w = Piecewise::new(
            self.w.default_value() * inv_a,
            self.w.pieces.iter().map(|&(lo, hi, v)| (map(lo), map(hi), v * inv_a)).collect(),
        )?;
        let atoms = self.kappa.atoms().iter().map(|&(x, mass)| (map(x), mass)).collect();
        let pieces = self
            .kappa
            .pieces()
            .iter()
            .map(|p| crate::measure::DensityPiece {
                x_lo: map(p.x_lo),
                x_hi: map(p.x_hi),
                c: p.c * inv_a,
                slope: p.slope * inv_a * inv_a,
            })
            .collect();
        Self::new(
            map(self.lo),
            map(self.hi),
            self.lo_boundary,
            self.hi_boundary,
            m,
            w,
            RadonMeasure::new(atoms, pieces)?,
        )
    }
}

/// Replace `κ` by `κ − ν̃` (so positive `ν̃` creates mass) and verify the
/// perturbed generator still admits a Green's function.
///
/// Errors with [`CoreError::NotTransient`] when the perturbed generator
/// leaves the transient class.
pub fn perturb<F: Real>(
    gen: &GeneratorSpec<F>,
    nu_tilde: &RadonMeasure<F>,
) -> CoreResult<GeneratorSpec<F>> {
    let kappa = gen.kappa.minus(nu_tilde);
    let out = GeneratorSpec { kappa, ..gen.clone() };
    let base = GeneratorSpec { kappa: RadonMeasure::zero(), ..gen.clone() };
    let nu_total = nu_tilde.minus(&gen.kappa); // mass-creation-positive sign
    let report = classify(&base, &nu_total)?;
    match report.class {
        TransienceClass::DMinus => Ok(out),
        _ => Err(CoreError::NotTransient { margin: report.margin }),
    }
}
