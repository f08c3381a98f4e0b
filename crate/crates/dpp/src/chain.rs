//! Left-to-right renewal sampling of the kill points.
//!
//! On an interval with natural boundaries the kill points form a Markov
//! chain in their own order:
//!
//! * the leftmost point has density `u↑(inf I)·u↓(y)·m(y) κ(dy)` — total
//!   mass exactly one (a Wronskian identity, re-verified numerically at
//!   every call);
//! * after a point at `y₀` the chain stops with probability
//!   `u↓(sup I)/u↓(y₀)`, else the next point has density
//!   `(S(y) − S(y₀))·u↓(y)/u↓(y₀)·m(y) κ(dy)` on `(y₀, sup I)`, where `S`
//!   is the scale function (for Brownian motion, `S(y) − S(y₀) = 2(y−y₀)`);
//!   the continue branch has total mass `1 − u↓(sup I)/u↓(y₀)`, which the
//!   sampler also re-verifies;
//! * finally each gap between consecutive kill points receives its
//!   scale-uniform gap point.
//!
//! This is an exact sampler — no stopping rule, no residual — and entirely
//! independent of the random-walk construction in [`crate::wilson`], which
//! makes the two ideal cross-checks for one another.

use loopsoup_core::{Boundary, Generator64, Harmonic64};
use rand::Rng;

use crate::points::PointConfig;
use crate::sampling::{sample_w_uniform, scale_between, WeightedKappa};
use crate::{DppError, DppResult};

/// Tolerance for the two closed-form mass identities.
const MASS_TOL: f64 = 1e-6;

/// Hard cap on the chain length; the expected number of points is finite
/// for every representable generator, so hitting this indicates a numerical
/// problem rather than a long sample.
const MAX_POINTS: usize = 10_000;

/// Draw one complete configuration by the renewal chain.  Requires natural
/// boundaries on both sides (killed boundaries pin boundary kill points;
/// use [`crate::wilson_sample`] there).
pub fn chain_sample<R: Rng + ?Sized>(
    gen: &Generator64,
    hs: &Harmonic64,
    rng: &mut R,
) -> DppResult<PointConfig> {
    if gen.lo_boundary != Boundary::Natural || gen.hi_boundary != Boundary::Natural {
        return Err(DppError::Precondition(
            "chain_sample needs natural boundaries on both sides".into(),
        ));
    }
    let up_left = if gen.lo.is_finite() { hs.u_up(gen.lo) } else { hs.u_up_limit_left() };
    let down_right =
        if gen.hi.is_finite() { hs.u_down(gen.hi) } else { hs.u_down_limit_right() };
    if !(down_right > 0.0) || !(up_left > 0.0) {
        return Err(DppError::Precondition(
            "expected number of kill points is infinite (harmonic limit vanishes)".into(),
        ));
    }
    // widened bounds so atoms exactly at a finite natural end are kept
    // (local time accrues at a reflecting end)
    let lo_eff = if gen.lo.is_finite() { gen.lo - 1.0 } else { gen.lo };
    let hi_eff = if gen.hi.is_finite() { gen.hi + 1.0 } else { gen.hi };
    let mut splits = gen.m.breakpoints();
    splits.extend(gen.w.breakpoints());

    let mut y: Vec<f64> = Vec::new();

    // leftmost point
    let first_f = |p: f64| up_left * hs.u_down(p) * hs.m_at(p);
    let wk = WeightedKappa::new(&gen.kappa, lo_eff, hi_eff, &splits, first_f);
    let mass = wk.total();
    if !((mass - 1.0).abs() < MASS_TOL) {
        return Err(DppError::MassMismatch {
            context: "chain leftmost-point mass",
            mass,
            expected: 1.0,
        });
    }
    y.push(wk.sample(rng.gen::<f64>() * mass, first_f));

    // renewal steps
    while y.len() < MAX_POINTS {
        let y0 = *y.last().expect("nonempty");
        let down0 = hs.u_down(y0);
        let p_stop = down_right / down0;
        if rng.gen::<f64>() < p_stop {
            break;
        }
        let next_f =
            |p: f64| scale_between(gen, y0, p) * hs.u_down(p) / down0 * hs.m_at(p);
        let wk = WeightedKappa::new(&gen.kappa, y0, hi_eff, &splits, next_f);
        let mass = wk.total();
        if !((mass - (1.0 - p_stop)).abs() < MASS_TOL) {
            return Err(DppError::MassMismatch {
                context: "chain renewal mass",
                mass,
                expected: 1.0 - p_stop,
            });
        }
        y.push(wk.sample(rng.gen::<f64>() * mass, next_f));
    }
    if y.len() >= MAX_POINTS {
        return Err(DppError::Precondition(format!(
            "renewal chain exceeded {MAX_POINTS} points"
        )));
    }

    let z = y
        .windows(2)
        .map(|w| sample_w_uniform(gen, w[0], w[1], rng.gen::<f64>()))
        .collect();
    PointConfig::from_points(y, z)
}
