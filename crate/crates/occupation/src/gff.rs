//! Exact sampling of the Gaussian free field attached to a generator.

use loopsoup_core::{GeneratorSpec, HarmonicSystem};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::field::GffSample;
use crate::sample::grid_scales;
use crate::{require, OccupationResult};

type Generator64 = GeneratorSpec<f64>;
type Harmonic64 = HarmonicSystem<f64>;

/// Sample the centred Gaussian field with covariance `G(x, y)` on
/// `grid`, exactly.
///
/// The construction mirrors the occupation sampler's change of scale:
/// with `s_tilde(x) = u_up(x) / u_down(x)` (twice the squared-Bessel
/// clock) and a standard Brownian motion `W` from zero,
/// `phi(x) = u_down(x) W(s_tilde(x))`. Then
/// `E[phi(x) phi(y)] = u_down(x) u_down(y) min(s_tilde(x), s_tilde(y))
/// = u_up(x ∧ y) u_down(x ∨ y) = G(x, y)`.
///
/// Brownian increments over the grid are independent Gaussians, so the
/// joint law on the grid carries no discretisation error. At loop
/// intensity `alpha = 1/2` the occupation field has the law of
/// `phi^2 / 2` ([`GffSample::squared_half`]).
pub fn sample_gff<R: Rng + ?Sized>(
    gen: &Generator64,
    hs: &Harmonic64,
    grid: &[f64],
    rng: &mut R,
) -> OccupationResult<GffSample> {
    let s = grid_scales(gen, hs, grid)?;
    require(s.iter().all(|v| *v >= 0.0), || "scale coordinate must be nonnegative".into())?;

    let mut w = Vec::with_capacity(grid.len());
    let mut prev_s = 0.0;
    let mut prev_w = 0.0;
    for &si in &s {
        let ds = 2.0 * (si - prev_s); // s_tilde increments are twice s
        let g: f64 = rng.sample(StandardNormal);
        let next = prev_w + ds.sqrt() * g;
        w.push(next);
        prev_s = si;
        prev_w = next;
    }

    let values = grid
        .iter()
        .zip(&w)
        .map(|(&x, &wv)| hs.u_down(x) * wv)
        .collect();
    Ok(GffSample::from_parts(grid.to_vec(), values))
}
