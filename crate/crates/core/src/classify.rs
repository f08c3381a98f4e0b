//! Transience trichotomy of a perturbed generator `L + ν` by shooting.
//!
//! The perturbation `ν` is mass-creation-positive (so it enters the killing
//! measure as `κ_eff = κ − ν`).  Shooting from the left with flat data
//! (or Dirichlet data at a killed boundary) yields the maximal candidate
//! for a positive solution of the harmonic equation:
//!
//! * if the shot crosses zero, no positive solution exists — supercritical
//!   (`D_PLUS`);
//! * if it stays positive, the sign of the boundary margin (the outgoing
//!   log-derivative) decides: positive margin means a transient conjugate
//!   exists (`D_MINUS`), vanishing margin is the critical case (`D_ZERO`).
//!
//! If any solution `ũ > 0` exists, the Wronskian of the shot `u` against
//! `ũ` is a nonnegative constant, so `u/ũ` is nondecreasing and `u` itself
//! stays positive: a zero crossing of the shot really certifies `D_PLUS`.

use crate::error::{CoreError, CoreResult};
use crate::generator::{Boundary, GeneratorSpec};
use crate::measure::RadonMeasure;
use crate::solve::{march, Grid, Side};
use crate::Real;

/// Width of the critical band on the shooting margin.
const D_ZERO_TOL: f64 = 1e-6;

/// The trichotomy: `L + ν` conjugate to a transient generator (`DMinus`),
/// to a recurrent one (`DZero`), or supercritical with no positive
/// harmonic function (`DPlus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransienceClass {
    DMinus,
    DZero,
    DPlus,
}

/// Classification result with the raw shooting margin.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyReport {
    pub class: TransienceClass,
    /// Outgoing log-derivative `u'(B)/u(B)` of the shot beyond the support
    /// (for a killed right boundary, the boundary value `u(hi)/max u`
    /// instead).  Sign decides the class; `|margin| ≤ 1e-6` reports `DZero`.
    pub margin: f64,
}

/// Classify `L + ν` where `L` is described by `gen` (including its own
/// killing `κ`) and `ν` is a signed, compactly supported perturbation with
/// the mass-creation-positive sign convention.
pub fn classify<F: Real>(
    gen: &GeneratorSpec<F>,
    nu: &RadonMeasure<F>,
) -> CoreResult<ClassifyReport> {
    let kappa_eff = gen.kappa.minus(nu);
    if let Some((slo, shi)) = kappa_eff.support_bounds() {
        if slo < gen.lo || shi > gen.hi {
            return Err(CoreError::InvalidGenerator(
                "perturbation charges points outside the interval".into(),
            ));
        }
    }

    if kappa_eff.is_zero()
        && gen.lo_boundary != Boundary::Killed
        && gen.hi_boundary != Boundary::Killed
    {
        // free motion is recurrent
        return Ok(ClassifyReport { class: TransienceClass::DZero, margin: 0.0 });
    }

    // anchor window: finite endpoints, else the support hull, padded only
    // on unbounded sides
    let support = kappa_eff.support_bounds();
    let mut a = if gen.lo.is_finite() {
        gen.lo
    } else {
        support.map(|(lo, _)| lo).unwrap_or(F::nan())
    };
    let mut b = if gen.hi.is_finite() {
        gen.hi
    } else {
        support.map(|(_, hi)| hi).unwrap_or(F::nan())
    };
    if a.is_nan() {
        a = b - F::one();
    }
    if b.is_nan() {
        b = a + F::one();
    }
    if !(a < b) {
        if !gen.lo.is_finite() {
            a = b - F::one();
        }
        if !gen.hi.is_finite() {
            b = a.max(b) + F::one();
        }
    }

    let grid = Grid::build(&kappa_eff, &gen.m, &gen.w, a, b, &[]);
    let nodes = match gen.lo_boundary {
        Boundary::Killed => march(&grid, 0, F::zero(), F::one(), Side::Right)?,
        _ => march(&grid, 0, F::one(), F::zero(), Side::Left)?,
    };

    let mut max_u = F::zero();
    for (i, n) in nodes.iter().enumerate() {
        max_u = max_u.max(n.u.abs());
        let seed = i == 0 && gen.lo_boundary == Boundary::Killed;
        if !seed && n.u <= F::zero() {
            return Ok(ClassifyReport {
                class: TransienceClass::DPlus,
                margin: (n.u / max_u.max(F::one())).to_f64(),
            });
        }
    }

    let last = nodes.last().expect("grid is nonempty");
    let margin = match gen.hi_boundary {
        // killed right end: the shot must vanish there exactly at criticality
        Boundary::Killed => (last.u / max_u).to_f64(),
        // natural right end: outgoing log-derivative beyond the support
        _ => {
            let w_hi = gen.w.at(b + F::one());
            ((last.v_right * w_hi) / last.u).to_f64()
        }
    };

    let class = if margin.abs() <= D_ZERO_TOL {
        TransienceClass::DZero
    } else if margin > 0.0 {
        TransienceClass::DMinus
    } else {
        TransienceClass::DPlus
    };
    Ok(ClassifyReport { class, margin })
}
