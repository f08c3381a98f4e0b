//! Exact sampling of the occupation field on a grid.

use loopsoup_core::{Boundary, GeneratorSpec, HarmonicSystem};
use rand::Rng;

use crate::besq::{besq_transition, zero_hit_probability};
use crate::field::OccupationField;
use crate::{require, OccupationResult};

type Generator64 = GeneratorSpec<f64>;
type Harmonic64 = HarmonicSystem<f64>;

/// The scale coordinate `s(x) = (1/2) ∫_{inf I}^x w / u_down^2` in
/// which the occupation field becomes a squared Bessel process.
///
/// Since the Wronskian normalisation gives
/// `d(u_up / u_down)/dx = w / u_down^2` exactly, the integral equals
/// `u_up(x) / (2 u_down(x))` whenever the ratio vanishes at the lower
/// end of the domain — which holds precisely when the diffusion is
/// transient toward that end (a killed lower boundary, or an unbounded
/// natural side, where `u_down` grows without bound). The samplers
/// enforce that condition and evaluate the closed ratio form instead
/// of quadrature.
pub fn conjugate_scale(hs: &Harmonic64, x: f64) -> f64 {
    0.5 * hs.u_up(x) / hs.u_down(x)
}

/// Cheap consistency check that a harmonic pair belongs to the
/// generator it is being used with (domain and boundary kinds match).
pub(crate) fn check_same_domain(gen: &Generator64, hs: &Harmonic64) -> OccupationResult<()> {
    let hg = hs.generator();
    require(
        gen.lo == hg.lo
            && gen.hi == hg.hi
            && gen.lo_boundary == hg.lo_boundary
            && gen.hi_boundary == hg.hi_boundary,
        || "generator and harmonic pair describe different domains".into(),
    )
}

/// Validate a sampling grid against the generator and return the scale
/// values `s(x_i)`; shared by the field and free-field samplers.
pub(crate) fn grid_scales(
    gen: &Generator64,
    hs: &Harmonic64,
    grid: &[f64],
) -> OccupationResult<Vec<f64>> {
    require(!grid.is_empty(), || "sampling grid is empty".into())?;
    require(grid.iter().all(|x| x.is_finite()), || "sampling grid must be finite".into())?;
    require(grid.windows(2).all(|w| w[0] < w[1]), || {
        "sampling grid must be strictly increasing".into()
    })?;
    check_same_domain(gen, hs)?;
    require(grid[0] > gen.lo && *grid.last().unwrap() < gen.hi, || {
        format!("grid must lie strictly inside the domain ({}, {})", gen.lo, gen.hi)
    })?;
    // The squared-Bessel clock starts from zero at the lower end of the
    // domain, which requires the diffusion to be transient toward it.
    // A finite natural lower endpoint is reflecting: `u_up` stays
    // positive there, the scale does not vanish, and the reduction from
    // zero does not apply.
    require(!(gen.lo.is_finite() && gen.lo_boundary == Boundary::Natural), || {
        "the lower boundary is natural and finite (reflecting); the field does not vanish \
         toward it and the squared-Bessel reduction from zero does not apply"
            .into()
    })?;
    let s: Vec<f64> = grid.iter().map(|&x| conjugate_scale(hs, x)).collect();
    require(s[0] > 0.0 && s.iter().all(|v| v.is_finite()), || {
        "scale coordinate degenerate on this grid (point too close to a boundary)".into()
    })?;
    require(s.windows(2).all(|w| w[0] < w[1]), || {
        "scale coordinate failed to increase across the grid".into()
    })?;
    Ok(s)
}

/// Sample the occupation field of the loop ensemble of intensity
/// `alpha` exactly on `grid`.
///
/// After the change of scale `s(x) = u_up(x) / (2 u_down(x))` and of
/// value `V(x) = u_down(x)^2 Q(s(x))`, the field `Q` is a squared
/// Bessel process of dimension `2 alpha` started from zero at the
/// lower end of the domain. Grid values are drawn from the exact
/// Poisson–Gamma transition kernel of that process, so the joint law
/// on the grid has no discretisation error: one-point marginals are
/// `Gamma(alpha, mean alpha G(x, x))`, and joint Laplace transforms
/// match [`crate::laplace_det`].
///
/// For `alpha < 1` each step additionally records whether the
/// continuous field vanished strictly inside the step, drawn from the
/// exact bridge zero-visit law; given the grid values these
/// indicators are conditionally independent, so the pair
/// `(values, interior_zero)` is again exact in law. For `alpha >= 1`
/// the field a.s. stays positive and all flags are false.
///
/// Values are local times relative to `m(x) dx`. The field tends to
/// zero at a killed boundary; grid points must lie strictly inside the
/// domain.
pub fn sample_field<R: Rng + ?Sized>(
    gen: &Generator64,
    hs: &Harmonic64,
    alpha: f64,
    grid: &[f64],
    rng: &mut R,
) -> OccupationResult<OccupationField> {
    require(alpha.is_finite() && alpha > 0.0, || {
        format!("loop intensity alpha must be positive and finite, got {alpha}")
    })?;
    let s = grid_scales(gen, hs, grid)?;

    let mut q = Vec::with_capacity(grid.len());
    q.push(besq_transition(alpha, 0.0, s[0], rng));
    let mut interior_zero = Vec::with_capacity(grid.len() - 1);
    for i in 1..grid.len() {
        let ds = s[i] - s[i - 1];
        let prev = q[i - 1];
        let next = besq_transition(alpha, prev, ds, rng);
        let hit = if alpha < 1.0 {
            rng.gen::<f64>() < zero_hit_probability(alpha, prev, next, ds)
        } else {
            false
        };
        interior_zero.push(hit);
        q.push(next);
    }

    let values = grid
        .iter()
        .zip(&q)
        .map(|(&x, &qv)| {
            let d = hs.u_down(x);
            d * d * qv
        })
        .collect();
    OccupationField::with_interior_zeros(grid.to_vec(), values, interior_zero)
}
