//! The two conditional (Gibbs) moves of the interleaved configuration.
//!
//! Multiplying the chain sampler's transition densities and normalizations
//! telescopes into a remarkably simple likelihood for a complete
//! configuration `y₀ < z₁ < y₁ < … < zₙ < yₙ`:
//!
//! ```text
//! u↑(-∞) u↓(+∞) · ∏ᵢ w(zᵢ)    w.r.t.   ⊗ᵢ m(yᵢ)κ(dyᵢ) ⊗ᵢ dzᵢ
//! ```
//!
//! — every `u↓` factor cancels.  The conditional laws read off directly:
//!
//! * given the kill points, the gap points are independent, one per gap,
//!   with density `∝ w(z) dz` — uniform in the scale function;
//! * given the gap points, the kill points are independent across windows,
//!   each drawn from `m(y) κ(dy)` normalized on its window — the extreme
//!   windows *included*: the harmonic factors sit at `±∞`, not on the
//!   extreme points, so no window carries extra weight.
//!
//! At a killed boundary the extreme kill point *is* the boundary, so it is
//! pinned rather than drawn.  (A tempting wrong turn, recorded as a
//! warning: the consecutive-block correlation density carries a factor
//! `G(y₀, yₙ)`, but a correlation function integrates over configurations
//! *extending* the block, so it yields no conditionals; weighting the
//! extreme windows by `u↑`/`u↓` accordingly biases every statistic of the
//! extremes — the stationarity cross-check in the integration suite
//! catches exactly that.)

use loopsoup_core::{Boundary, Generator64, Harmonic64};
use rand::Rng;

use crate::points::PointConfig;
use crate::sampling::{sample_w_uniform, WeightedKappa};
use crate::{DppError, DppResult};

/// Redraw every gap point conditionally on the kill points: one
/// scale-uniform point per gap.  Kill points and segments are kept.
pub fn resample_z_given_y<R: Rng + ?Sized>(
    cfg: &PointConfig,
    gen: &Generator64,
    rng: &mut R,
) -> DppResult<PointConfig> {
    cfg.validate()?;
    let mut out = cfg.clone();
    let z = cfg
        .y()
        .windows(2)
        .map(|w| sample_w_uniform(gen, w[0], w[1], rng.gen::<f64>()))
        .collect();
    out.set_z(z);
    debug_assert!(out.validate_complete().is_ok());
    Ok(out)
}

/// Redraw every kill point conditionally on the gap points.  Needs a
/// complete configuration; returns one (with fresh zero-length segments,
/// since the swept intervals of the input no longer apply).
pub fn resample_y_given_z<R: Rng + ?Sized>(
    cfg: &PointConfig,
    hs: &Harmonic64,
    rng: &mut R,
) -> DppResult<PointConfig> {
    cfg.validate_complete()?;
    let gen = hs.generator();
    if cfg.y().is_empty() {
        return Ok(cfg.clone());
    }
    let n = cfg.y().len();
    let z = cfg.z();
    let mut fresh = Vec::with_capacity(n);
    for i in 0..n {
        let left_end = i == 0;
        let right_end = i == n - 1;
        if left_end && gen.lo_boundary == Boundary::Killed {
            fresh.push(gen.lo);
            continue;
        }
        if right_end && gen.hi_boundary == Boundary::Killed {
            fresh.push(gen.hi);
            continue;
        }
        // widened bounds keep atoms sitting exactly on a finite natural
        // (reflecting) end in play
        let lo = if left_end {
            if gen.lo.is_finite() { gen.lo - 1.0 } else { gen.lo }
        } else {
            z[i - 1]
        };
        let hi = if right_end {
            if gen.hi.is_finite() { gen.hi + 1.0 } else { gen.hi }
        } else {
            z[i]
        };
        let splits = gen.m.breakpoints();
        let f = |p: f64| hs.m_at(p);
        let wk = WeightedKappa::new(&gen.kappa, lo, hi, &splits, f);
        if !(wk.total() > 0.0) {
            return Err(DppError::InvalidConfig(format!(
                "no killing mass available for the kill point in ({lo}, {hi})"
            )));
        }
        fresh.push(wk.sample(rng.gen::<f64>() * wk.total(), f));
    }
    PointConfig::from_points(fresh, z.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use loopsoup_core::{harmonic_pair, GeneratorSpec, RadonMeasure};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn z_resample_keeps_kill_points_and_fills_gaps() {
        let gen = GeneratorSpec::brownian_with_killing(
            RadonMeasure::from_atoms(vec![(-0.5, 1.0), (0.5, 1.0)]).unwrap(),
        )
        .unwrap();
        let cfg = PointConfig::from_points(vec![-0.5, 0.5], vec![0.25]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..50 {
            let out = resample_z_given_y(&cfg, &gen, &mut rng).unwrap();
            assert_eq!(out.y(), cfg.y());
            assert_eq!(out.z().len(), 1);
            assert!(-0.5 < out.z()[0] && out.z()[0] < 0.5);
        }
    }

    #[test]
    fn y_resample_is_forced_when_one_atom_fits_each_window() {
        let gen = GeneratorSpec::brownian_with_killing(
            RadonMeasure::from_atoms(vec![(-0.5, 1.0), (0.5, 1.0)]).unwrap(),
        )
        .unwrap();
        let hs = harmonic_pair(&gen).unwrap();
        let cfg = PointConfig::from_points(vec![-0.5, 0.5], vec![0.1]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let out = resample_y_given_z(&cfg, &hs, &mut rng).unwrap();
        assert_eq!(out.y(), &[-0.5, 0.5]);
        assert_eq!(out.z(), &[0.1]);
    }

    #[test]
    fn extreme_windows_draw_from_plain_killing_mass() {
        // κ = 2δ₋₁ + δ₀ + δ₁ with Z = {0.5}: the left window (−∞, 0.5)
        // holds the atoms at −1 (mass 2) and 0 (mass 1).  The likelihood
        // of a complete configuration is u↑(-∞)u↓(+∞)·∏w(zᵢ) ⊗ mκ(dyᵢ),
        // so P(y₀ = −1 | Z) is the plain mass ratio 2/3 — no harmonic
        // weight on the extreme window.
        let gen = GeneratorSpec::brownian_with_killing(
            RadonMeasure::from_atoms(vec![(-1.0, 2.0), (0.0, 1.0), (1.0, 1.0)]).unwrap(),
        )
        .unwrap();
        let hs = harmonic_pair(&gen).unwrap();
        let p = 2.0 / 3.0;
        let cfg = PointConfig::from_points(vec![-1.0, 1.0], vec![0.5]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let n = 4000;
        let mut left = 0usize;
        for _ in 0..n {
            let out = resample_y_given_z(&cfg, &hs, &mut rng).unwrap();
            assert_eq!(out.y().len(), 2);
            assert_eq!(out.y()[1], 1.0, "right window is forced");
            match out.y()[0] {
                a if a == -1.0 => left += 1,
                a if a == 0.0 => {}
                other => panic!("unexpected kill point {other}"),
            }
        }
        let freq = left as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq - p).abs() < 3.5 * se + 1e-3, "freq {freq} vs p {p} (se {se})");
        // a u↑-weighted draw would land measurably elsewhere
        let p_weighted =
            2.0 * hs.u_up(-1.0) / (2.0 * hs.u_up(-1.0) + hs.u_up(0.0));
        assert!((p - p_weighted).abs() > 10.0 * se);
    }

    #[test]
    fn killed_boundaries_stay_pinned() {
        let gen = GeneratorSpec::new(
            0.0,
            1.0,
            Boundary::Killed,
            Boundary::Killed,
            loopsoup_core::Piecewise::constant(1.0),
            loopsoup_core::Piecewise::constant(2.0),
            RadonMeasure::uniform(0.0, 1.0, 3.0).unwrap(),
        )
        .unwrap();
        let hs = harmonic_pair(&gen).unwrap();
        let cfg = PointConfig::from_points(vec![0.0, 0.4, 1.0], vec![0.2, 0.7]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..20 {
            let out = resample_y_given_z(&cfg, &hs, &mut rng).unwrap();
            assert_eq!(out.y()[0], 0.0);
            assert_eq!(out.y()[2], 1.0);
            assert!(0.2 < out.y()[1] && out.y()[1] < 0.7);
        }
    }
}
