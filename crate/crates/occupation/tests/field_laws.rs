//! Law-level checks of the occupation-field toolkit.
//!
//! The crate ships one exact sampler (squared-Bessel reduction), three
//! closed-form evaluators (determinant Laplace transforms, permanents,
//! Fredholm exponential moments), a Gaussian comparison sampler, and an
//! independent Euler discretization of the branching SDE is built here
//! in the tests. None of these share code beyond the harmonic pair, so
//! cross-agreement pins the laws from several directions at once:
//! sampler vs closed form, closed form vs closed form, and sampler vs
//! naive SDE integration.
//!
//! Frozen reference values (Green's functions of the two-atom and
//! uniform killing generators, the Brownian `G(x, y) = 2 min(x, y)`)
//! are derived once by hand and asserted to high precision before any
//! statistical comparison uses them.

use loopsoup_core::{
    harmonic_pair, Boundary, DensityPiece, Generator64, GeneratorSpec, Piecewise, RadonMeasure,
};
use loopsoup_occupation::{
    clusters, conjugate_scale, exp_moment, laplace_det, permanental_moment, sample_field,
    sample_gff, ExpMomentValue, OccupationError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::Distribution;
use statrs::distribution::ContinuousCDF;

fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Two-sample Kolmogorov–Smirnov statistic (ties allowed; with ties the
/// critical value is conservative, which only weakens power).
fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

fn ks_two_sample_crit(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

fn ks_one_sample(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!xs.is_empty());
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

fn ks_one_sample_crit(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / (2.0 * n as f64)).sqrt()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Brownian motion on (0, ∞) killed at 0: `G(x, y) = 2 min(x, y)` and
/// the field is a squared Bessel process of dimension 2α in `x`.
fn bm_killed_zero() -> Generator64 {
    GeneratorSpec::brownian_killed_at(0.0).unwrap()
}

/// Brownian motion with uniform killing at rate `c` on a wide window:
/// near the origin this is indistinguishable (to f64) from killing on
/// all of the line, so `G(x, x) = 1/sqrt(2 c)` there.
fn bm_uniform_kappa(c: f64) -> Generator64 {
    GeneratorSpec::brownian_with_killing(RadonMeasure::uniform(-30.0, 30.0, c).unwrap()).unwrap()
}

/// Brownian motion with killing atoms of mass 1 at ±1/2 — the frozen
/// two-atom reference generator (`G(∓½, ∓½) = 3/4`, `G(−½, ½) = 1/4`).
fn bm_two_atoms() -> Generator64 {
    GeneratorSpec::brownian_with_killing(
        RadonMeasure::from_atoms(vec![(-0.5, 1.0), (0.5, 1.0)]).unwrap(),
    )
    .unwrap()
}

/// Speed-changed generator: `m = 3`, `w = 2`, a single killing atom of
/// mass 1 at the origin. Exercises every `m`-sensitive code path.
fn speed_three_gen() -> Generator64 {
    GeneratorSpec::new(
        f64::NEG_INFINITY,
        f64::INFINITY,
        Boundary::Natural,
        Boundary::Natural,
        Piecewise::constant(3.0),
        Piecewise::constant(2.0),
        RadonMeasure::from_atoms(vec![(0.0, 1.0)]).unwrap(),
    )
    .unwrap()
}

fn gamma_cdf(shape: f64, scale: f64) -> impl Fn(f64) -> f64 {
    let d = statrs::distribution::Gamma::new(shape, 1.0 / scale).unwrap();
    move |x| d.cdf(x)
}

// ---------------------------------------------------------------------------
// Frozen scale / Green values
// ---------------------------------------------------------------------------

#[test]
fn conjugate_scale_closed_forms() {
    // BM killed at 0: u_up = 2x·c, u_down = const/c with product 2x, so
    // s(x) = x exactly, independent of the normalisation split.
    let gen = bm_killed_zero();
    let hs = harmonic_pair(&gen).unwrap();
    for &x in &[0.3, 1.0, 7.5] {
        assert!((conjugate_scale(&hs, x) - x).abs() < 1e-10 * x.max(1.0));
        assert!((hs.green(x, x) - 2.0 * x).abs() < 1e-10 * x.max(1.0));
    }

    // Two-atom generator: u_up(−½)/u_down(−½) = (G(−½,−½)/u_down²) gives
    // s(−½) = ½·(1/2)/(3/2) = 1/12... the frozen values are
    // u_down(−½) = 3/2·β, u_up(−½) = (3/4)/(3/2β) so the β-free ratio is
    // s(−½) = (3/4) / (2·(3/2)²) = 1/6.
    let gen = bm_two_atoms();
    let hs = harmonic_pair(&gen).unwrap();
    let g = hs.green(-0.5, -0.5);
    let d = hs.u_down(-0.5);
    assert!((g - 0.75).abs() < 1e-9);
    assert!((hs.green(-0.5, 0.5) - 0.25).abs() < 1e-9);
    let s = conjugate_scale(&hs, -0.5);
    assert!((s - 0.5 * g / (d * d)).abs() < 1e-12);
}

// ---------------------------------------------------------------------------
// One-point marginals
// ---------------------------------------------------------------------------

/// Marginal of the field at `x` is Gamma with shape α and mean
/// α·G(x, x), for Brownian motion killed at 0 (`G = 2x`).
#[test]
fn bm_killed_marginals_are_gamma() {
    let gen = bm_killed_zero();
    let hs = harmonic_pair(&gen).unwrap();
    let grid = [1.0, 2.0, 5.0];
    let n = 20_000;
    for (ai, &alpha) in [0.5, 1.0, 2.0].iter().enumerate() {
        let mut rng = rng(0x0cc_f1e1d + ai as u64);
        let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); grid.len()];
        for _ in 0..n {
            let f = sample_field(&gen, &hs, alpha, &grid, &mut rng).unwrap();
            for (c, v) in cols.iter_mut().zip(f.values()) {
                c.push(*v);
            }
        }
        for (j, &x) in grid.iter().enumerate() {
            let cdf = gamma_cdf(alpha, 2.0 * x); // mean α·2x → scale 2x
            let d = ks_one_sample(&mut cols[j], cdf);
            let crit = ks_one_sample_crit(n, 1e-3);
            assert!(d < crit, "alpha={alpha} x={x}: KS {d:.5} ≥ {crit:.5}");
        }
    }
}

/// Two-sided killing: BM on (0, x_max) killed at both ends has
/// `G(x, x) = 2 x (x_max − x) / x_max`, and the field is a squared
/// Bessel bridge; its one-point marginal is still Gamma(α, mean αG).
#[test]
fn bessel_bridge_marginal_two_sided_killing() {
    let x_max: f64 = 3.0;
    let gen = GeneratorSpec::new(
        0.0,
        x_max,
        Boundary::Killed,
        Boundary::Killed,
        Piecewise::constant(1.0),
        Piecewise::constant(2.0),
        RadonMeasure::zero(),
    )
    .unwrap();
    let hs = harmonic_pair(&gen).unwrap();
    let x = 1.2;
    let g_exact = 2.0 * x * (x_max - x) / x_max;
    assert!((hs.green(x, x) - g_exact).abs() < 1e-9);

    let alpha = 1.0;
    let n = 20_000;
    let mut rng = rng(0x0cc_b41d9e);
    let mut vals = Vec::with_capacity(n);
    for _ in 0..n {
        let f = sample_field(&gen, &hs, alpha, &[x], &mut rng).unwrap();
        vals.push(f.values()[0]);
    }
    let d = ks_one_sample(&mut vals, gamma_cdf(alpha, g_exact));
    let crit = ks_one_sample_crit(n, 1e-3);
    assert!(d < crit, "KS {d:.5} ≥ {crit:.5}");
}

/// On a speed-changed generator (m = 3) the marginal stays
/// Gamma(α, mean α·G(x,x)) with the plain Green's function — local
/// times are relative to m(x)dx, so no speed factor appears.
#[test]
fn speed_changed_marginal_and_laplace() {
    let gen = speed_three_gen();
    let hs = harmonic_pair(&gen).unwrap();
    let x = 0.7;
    let g = hs.green(x, x);
    let alpha = 0.8;
    let lambda = 0.9;

    // Closed form is m-free: (1 + λ G)^{-α}.
    let exact = (1.0 + lambda * g).powf(-alpha);
    let det = laplace_det(&hs, &gen, &[x], &[lambda], alpha).unwrap();
    assert!(
        (det - exact).abs() < 1e-9 * exact,
        "laplace_det {det} vs m-free closed form {exact}"
    );

    // Monte Carlo from the sampler agrees with both.
    let n = 40_000;
    let mut rng = rng(0x0cc_5eed3);
    let mut lap = Vec::with_capacity(n);
    let mut vals = Vec::with_capacity(n);
    for _ in 0..n {
        let f = sample_field(&gen, &hs, alpha, &[x], &mut rng).unwrap();
        vals.push(f.values()[0]);
        lap.push((-lambda * f.values()[0]).exp());
    }
    let (m_lap, se_lap) = mean_and_se(&lap);
    assert!(
        (m_lap - exact).abs() < 3.5 * se_lap,
        "MC Laplace {m_lap} vs {exact} (SE {se_lap})"
    );
    let (m_val, se_val) = mean_and_se(&vals);
    assert!(
        (m_val - alpha * g).abs() < 3.5 * se_val,
        "MC mean {m_val} vs {} (SE {se_val})",
        alpha * g
    );
    let d = ks_one_sample(&mut vals, gamma_cdf(alpha, g));
    assert!(d < ks_one_sample_crit(n, 1e-3));
}

/// One-point Laplace transform of the sampled field matches the
/// determinant formula across λ ∈ {0.1, 1, 10}.
#[test]
fn one_point_laplace_matches_determinant() {
    let gen = bm_uniform_kappa(1.0);
    let hs = harmonic_pair(&gen).unwrap();
    let x = 0.4;
    let alpha = 1.3;
    let n = 50_000;
    let mut rng = rng(0x0cc_1a91a);
    let mut vals = Vec::with_capacity(n);
    for _ in 0..n {
        let f = sample_field(&gen, &hs, alpha, &[x], &mut rng).unwrap();
        vals.push(f.values()[0]);
    }
    for &lambda in &[0.1, 1.0, 10.0] {
        let det = laplace_det(&hs, &gen, &[x], &[lambda], alpha).unwrap();
        let mc: Vec<f64> = vals.iter().map(|v| (-lambda * v).exp()).collect();
        let (m, se) = mean_and_se(&mc);
        assert!(
            (m - det).abs() < 3.5 * se,
            "lambda={lambda}: MC {m} vs det {det} (SE {se})"
        );
    }
}

// ---------------------------------------------------------------------------
// Multi-point Laplace and permanents
// ---------------------------------------------------------------------------

/// The two-point determinant formula written out:
/// ((1+λ₀G₀₀)(1+λ₁G₁₁) − λ₀λ₁G₀₁²)^{-α}, Green entries only.
#[test]
fn two_point_laplace_closed_form() {
    for gen in [bm_killed_zero(), speed_three_gen()] {
        let hs = harmonic_pair(&gen).unwrap();
        let (x0, x1) = (0.5, 1.3);
        let (l0, l1) = (0.8, 0.3);
        let alpha = 0.75;
        let (g00, g11, g01) = (hs.green(x0, x0), hs.green(x1, x1), hs.green(x0, x1));
        let exact = ((1.0 + l0 * g00) * (1.0 + l1 * g11) - l0 * l1 * g01 * g01).powf(-alpha);
        let det = laplace_det(&hs, &gen, &[x0, x1], &[l0, l1], alpha).unwrap();
        assert!(
            (det - exact).abs() < 1e-8 * exact,
            "laplace_det {det} vs closed form {exact}"
        );
    }
}

/// Monte-Carlo two-point Laplace transform vs laplace_det.
#[test]
fn two_point_laplace_matches_sampler() {
    let gen = bm_killed_zero();
    let hs = harmonic_pair(&gen).unwrap();
    let grid = [0.5, 1.3];
    let (l0, l1) = (0.8, 0.3);
    let alpha = 0.75;
    let det = laplace_det(&hs, &gen, &grid, &[l0, l1], alpha).unwrap();
    let n = 50_000;
    let mut rng = rng(0x0cc_2a91a);
    let mut mc = Vec::with_capacity(n);
    for _ in 0..n {
        let f = sample_field(&gen, &hs, alpha, &grid, &mut rng).unwrap();
        mc.push((-l0 * f.values()[0] - l1 * f.values()[1]).exp());
    }
    let (m, se) = mean_and_se(&mc);
    assert!((m - det).abs() < 3.5 * se, "MC {m} vs det {det} (SE {se})");
}

/// Permanents: n = 1 and n = 2 against hand-expanded forms, and
/// n = 2, 3 against Monte-Carlo product moments for α ∈ {0.5, 1}.
#[test]
fn permanental_moments_match_enumeration_and_sampler() {
    let gen = bm_killed_zero();
    let hs = harmonic_pair(&gen).unwrap();
    let (x, y, z) = (0.6, 1.1, 1.9);

    for &alpha in &[0.5, 1.0] {
        let gxx = hs.green(x, x);
        let gyy = hs.green(y, y);
        let gxy = hs.green(x, y);
        let p1 = permanental_moment(&hs, &[x], alpha).unwrap();
        assert!((p1 - alpha * gxx).abs() < 1e-12 * p1.abs());
        let p2 = permanental_moment(&hs, &[x, y], alpha).unwrap();
        let p2_exact = alpha * alpha * gxx * gyy + alpha * gxy * gxy;
        assert!((p2 - p2_exact).abs() < 1e-12 * p2_exact);

        // Monte-Carlo product moments.
        let n = 200_000;
        let mut rng = rng(0x0cc_9e4 + (alpha * 10.0) as u64);
        let grid = [x, y, z];
        let mut prod2 = Vec::with_capacity(n);
        let mut prod3 = Vec::with_capacity(n);
        for _ in 0..n {
            let f = sample_field(&gen, &hs, alpha, &grid, &mut rng).unwrap();
            let v = f.values();
            prod2.push(v[0] * v[1]);
            prod3.push(v[0] * v[1] * v[2]);
        }
        let (m2, se2) = mean_and_se(&prod2);
        assert!(
            (m2 - p2).abs() < 3.5 * se2,
            "alpha={alpha} n=2: MC {m2} vs permanent {p2} (SE {se2})"
        );
        let p3 = permanental_moment(&hs, &grid, alpha).unwrap();
        let (m3, se3) = mean_and_se(&prod3);
        assert!(
            (m3 - p3).abs() < 3.5 * se3,
            "alpha={alpha} n=3: MC {m3} vs permanent {p3} (SE {se3})"
        );
    }
}

// ---------------------------------------------------------------------------
// Exponential moments
// ---------------------------------------------------------------------------

/// A single positive atom ε·δ₀: closed form (1 − ε G(0,0))^{-α} while
/// ε < 1/G(0,0), Infinite beyond. On the uniform-κ=1 generator the
/// threshold is exactly √2.
#[test]
fn exp_moment_single_atom_dichotomy() {
    let gen = bm_uniform_kappa(1.0);
    let hs = harmonic_pair(&gen).unwrap();
    let g00 = hs.green(0.0, 0.0);
    assert!((g00 - 1.0 / 2.0f64.sqrt()).abs() < 1e-9, "G(0,0) = {g00}");
    let alpha = 0.5;

    let eps = 0.5;
    let nu = RadonMeasure::from_atoms(vec![(0.0, eps)]).unwrap();
    let exact = (1.0 - eps * g00).powf(-alpha);
    match exp_moment(&gen, &hs, &nu, alpha).unwrap() {
        ExpMomentValue::Finite { trace_route, fredholm_route } => {
            assert!(
                (trace_route - exact).abs() < 1e-6 * exact,
                "trace {trace_route} vs {exact}"
            );
            assert!(
                (fredholm_route - exact).abs() < 1e-6 * exact,
                "fredholm {fredholm_route} vs {exact}"
            );
        }
        ExpMomentValue::Infinite => panic!("subcritical atom reported Infinite"),
    }

    // Dichotomy around ε* = 1/G(0,0) = √2.
    let crit = 2.0f64.sqrt();
    let sub = RadonMeasure::from_atoms(vec![(0.0, crit - 0.05)]).unwrap();
    assert!(matches!(
        exp_moment(&gen, &hs, &sub, alpha).unwrap(),
        ExpMomentValue::Finite { .. }
    ));
    let sup = RadonMeasure::from_atoms(vec![(0.0, crit + 0.05)]).unwrap();
    assert!(matches!(exp_moment(&gen, &hs, &sup, alpha).unwrap(), ExpMomentValue::Infinite));
}

/// ν̃ = −λ δ_x reproduces the one-point Laplace determinant, and the
/// zero measure gives exactly 1.
#[test]
fn exp_moment_consistent_with_laplace_det() {
    let gen = speed_three_gen();
    let hs = harmonic_pair(&gen).unwrap();
    let alpha = 1.1;
    let (x, lambda) = (0.4, 0.8);

    match exp_moment(&gen, &hs, &RadonMeasure::zero(), alpha).unwrap() {
        ExpMomentValue::Finite { trace_route, fredholm_route } => {
            assert_eq!(trace_route, 1.0);
            assert_eq!(fredholm_route, 1.0);
        }
        _ => panic!("zero measure must be finite"),
    }

    let nu = RadonMeasure::from_atoms(vec![(x, -lambda)]).unwrap();
    let det = laplace_det(&hs, &gen, &[x], &[lambda], alpha).unwrap();
    match exp_moment(&gen, &hs, &nu, alpha).unwrap() {
        ExpMomentValue::Finite { trace_route, fredholm_route } => {
            assert!(
                (trace_route - det).abs() < 1e-6 * det,
                "trace {trace_route} vs laplace_det {det}"
            );
            assert!(
                (fredholm_route - det).abs() < 1e-6 * det,
                "fredholm {fredholm_route} vs laplace_det {det}"
            );
        }
        _ => panic!("negative atom (extra killing) must be finite"),
    }
}

/// Mixed-sign atoms and a density piece: the two routes are mutually
/// independent discretisations and must agree to 1e-4.
#[test]
fn exp_moment_routes_agree_on_general_measures() {
    let gen = bm_uniform_kappa(1.0);
    let hs = harmonic_pair(&gen).unwrap();
    let alpha = 0.9;

    let two_atoms =
        RadonMeasure::from_atoms(vec![(-0.4, 0.3), (0.6, -0.5)]).unwrap();
    let with_density = RadonMeasure::new(
        vec![(0.2, 0.25)],
        vec![DensityPiece { x_lo: -0.5, x_hi: 0.5, c: -0.7, slope: 0.2 }],
    )
    .unwrap();

    for nu in [two_atoms, with_density] {
        match exp_moment(&gen, &hs, &nu, alpha).unwrap() {
            ExpMomentValue::Finite { trace_route, fredholm_route } => {
                assert!(
                    (trace_route - fredholm_route).abs() < 1e-4 * trace_route.abs(),
                    "routes disagree: trace {trace_route} vs fredholm {fredholm_route}"
                );
            }
            ExpMomentValue::Infinite => panic!("measure should be subcritical"),
        }
    }
}

/// Monte-Carlo check of E[exp(∫V dν̃)] for a mixed-sign ν̃ against both
/// closed-form routes.
#[test]
fn exp_moment_matches_sampler() {
    let gen = bm_uniform_kappa(1.0);
    let hs = harmonic_pair(&gen).unwrap();
    let alpha = 0.7;
    let (x0, x1) = (-0.4, 0.6);
    let (e0, e1) = (0.3, -0.5);
    let nu = RadonMeasure::from_atoms(vec![(x0, e0), (x1, e1)]).unwrap();
    let value = match exp_moment(&gen, &hs, &nu, alpha).unwrap() {
        ExpMomentValue::Finite { trace_route, .. } => trace_route,
        _ => panic!("subcritical"),
    };
    let n = 50_000;
    let mut rng = rng(0x0cc_e69);
    let mut mc = Vec::with_capacity(n);
    for _ in 0..n {
        let f = sample_field(&gen, &hs, alpha, &[x0, x1], &mut rng).unwrap();
        mc.push((e0 * f.values()[0] + e1 * f.values()[1]).exp());
    }
    let (m, se) = mean_and_se(&mc);
    assert!((m - value).abs() < 3.5 * se, "MC {m} vs {value} (SE {se})");
}

// ---------------------------------------------------------------------------
// Gaussian free field
// ---------------------------------------------------------------------------

/// Empirical covariance of the sampled Gaussian field equals G, and
/// φ²/2 has the α = 1/2 occupation-field law (KS against Gamma and
/// two-sample KS against the exact field sampler).
#[test]
fn gff_covariance_and_isomorphism() {
    let gen = bm_uniform_kappa(1.0);
    let hs = harmonic_pair(&gen).unwrap();
    let grid = [-0.8, -0.1, 0.5, 1.2];
    let n = 40_000;
    let mut rng = rng(0x0cc_6ff);
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(n); grid.len()];
    for _ in 0..n {
        let phi = sample_gff(&gen, &hs, &grid, &mut rng).unwrap();
        for (c, v) in samples.iter_mut().zip(phi.values()) {
            c.push(*v);
        }
    }
    // Means vanish; covariances match G within 3.5 SE.
    for i in 0..grid.len() {
        for j in i..grid.len() {
            let g = hs.green(grid[i], grid[j]);
            let prods: Vec<f64> =
                samples[i].iter().zip(&samples[j]).map(|(a, b)| a * b).collect();
            let (m, se) = mean_and_se(&prods);
            assert!(
                (m - g).abs() < 3.5 * se,
                "Cov(φ({}), φ({})) = {m} vs G = {g} (SE {se})",
                grid[i],
                grid[j]
            );
        }
    }
    // φ²/2 marginal at one point: Gamma(1/2, mean G/2 → scale G).
    let x_idx = 2;
    let mut half_sq: Vec<f64> = samples[x_idx].iter().map(|p| 0.5 * p * p).collect();
    let g = hs.green(grid[x_idx], grid[x_idx]);
    let d = ks_one_sample(&mut half_sq, gamma_cdf(0.5, g));
    assert!(d < ks_one_sample_crit(n, 1e-3), "φ²/2 KS {d:.5}");

    // Two-sample against the exact α = 1/2 field sampler.
    let mut field_vals = Vec::with_capacity(n);
    for _ in 0..n {
        let f = sample_field(&gen, &hs, 0.5, &[grid[x_idx]], &mut rng).unwrap();
        field_vals.push(f.values()[0]);
    }
    let d = ks_two_sample(&mut half_sq, &mut field_vals);
    assert!(d < ks_two_sample_crit(n, n, 1e-3), "two-sample KS {d:.5}");
}

// ---------------------------------------------------------------------------
// Branching SDE (Euler oracle)
// ---------------------------------------------------------------------------

/// An Euler discretization of
/// `dZ = sqrt(2 w Z) dB + 2 (dlog u_down/dx) Z dx + α w dx`
/// initialised from the exact marginal at x₀ must match the exact
/// reduction sampler at later points (one- and two-point two-sample
/// tests). The drift coefficient is read off the harmonic pair, so
/// this exercises the SDE form itself rather than a Brownian special
/// case.
#[test]
fn euler_sde_matches_exact_reduction() {
    let gen = bm_uniform_kappa(1.0);
    let hs = harmonic_pair(&gen).unwrap();
    let alpha = 1.0;
    let (x0, x_mid, x1) = (0.0, 0.25, 0.5);
    let steps = 2_000usize;
    let h = (x1 - x0) / steps as f64;
    let mid_idx = steps / 2;

    // Precompute drift b(x) = (dlog u_down/dx)(x) = v_down(x) w(x) / u_down(x)
    // and w(x) at step midpoints.
    let coeff: Vec<(f64, f64)> = (0..steps)
        .map(|k| {
            let x = x0 + (k as f64 + 0.5) * h;
            let w = hs.w_at(x);
            let b = hs.v_down_right(x) * w / hs.u_down(x);
            (b, w)
        })
        .collect();
    // Sanity: in the uniform-killing region the drift is −sqrt(2c) = −√2.
    assert!((coeff[0].0 + 2.0f64.sqrt()).abs() < 1e-9);

    let n = 20_000;
    let g00 = hs.green(x0, x0);
    let init = rand_distr::Gamma::new(alpha, g00).unwrap();
    let normal = rand_distr::StandardNormal;
    let mut rng_e = rng(0x0cc_e01e4);
    let mut euler_mid = Vec::with_capacity(n);
    let mut euler_end = Vec::with_capacity(n);
    for _ in 0..n {
        let mut z: f64 = init.sample(&mut rng_e);
        for (k, &(b, w)) in coeff.iter().enumerate() {
            let zp = z.max(0.0);
            let g: f64 = rng_e.sample(normal);
            z += 2.0 * b * zp * h + alpha * w * h + (2.0 * w * zp * h).sqrt() * g;
            if k + 1 == mid_idx {
                euler_mid.push(z.max(0.0));
            }
        }
        euler_end.push(z.max(0.0));
    }

    let mut exact_mid = Vec::with_capacity(n);
    let mut exact_end = Vec::with_capacity(n);
    let mut exact_sum = Vec::with_capacity(n);
    let mut rng_x = rng(0x0cc_e4ac7);
    for _ in 0..n {
        let f = sample_field(&gen, &hs, alpha, &[x_mid, x1], &mut rng_x).unwrap();
        exact_mid.push(f.values()[0]);
        exact_end.push(f.values()[1]);
        exact_sum.push(f.values()[0] + f.values()[1]);
    }
    let mut euler_sum: Vec<f64> =
        euler_mid.iter().zip(&euler_end).map(|(a, b)| a + b).collect();

    let crit = ks_two_sample_crit(n, n, 1e-3);
    let d_mid = ks_two_sample(&mut euler_mid, &mut exact_mid);
    assert!(d_mid < crit, "midpoint KS {d_mid:.5} ≥ {crit:.5}");
    let d_end = ks_two_sample(&mut euler_end, &mut exact_end);
    assert!(d_end < crit, "endpoint KS {d_end:.5} ≥ {crit:.5}");
    let d_sum = ks_two_sample(&mut euler_sum, &mut exact_sum);
    assert!(d_sum < crit, "two-point sum KS {d_sum:.5} ≥ {crit:.5}");
}

// ---------------------------------------------------------------------------
// Affine scale invariance
// ---------------------------------------------------------------------------

/// Sampling under the affinely mapped generator at mapped points has
/// the same law as sampling the original at the original points.
#[test]
fn field_invariant_under_affine_scale_map() {
    let gen = bm_two_atoms();
    let hs = harmonic_pair(&gen).unwrap();
    let (a, b) = (2.0, 3.0);
    let image = gen.affine_image(a, b).unwrap();
    let hs_img = harmonic_pair(&image).unwrap();

    let x = 0.3;
    let y = a * x + b;
    assert!((hs_img.green(y, y) - hs.green(x, x)).abs() < 1e-9);

    let alpha = 0.8;
    let n = 20_000;
    let mut rng_a = rng(0x0cc_aff1);
    let mut rng_b = rng(0x0cc_aff2);
    let mut orig = Vec::with_capacity(n);
    let mut mapped = Vec::with_capacity(n);
    for _ in 0..n {
        orig.push(sample_field(&gen, &hs, alpha, &[x], &mut rng_a).unwrap().values()[0]);
        mapped.push(
            sample_field(&image, &hs_img, alpha, &[y], &mut rng_b).unwrap().values()[0],
        );
    }
    let d = ks_two_sample(&mut orig, &mut mapped);
    let crit = ks_two_sample_crit(n, n, 1e-3);
    assert!(d < crit, "KS {d:.5} ≥ {crit:.5}");
}

// ---------------------------------------------------------------------------
// Clusters
// ---------------------------------------------------------------------------

/// α < 1: the zero set is dense in the occupied region, so the cluster
/// count must grow as the grid refines. α ≥ 1: a single cluster.
#[test]
fn cluster_counts_refine_and_saturate() {
    let gen = bm_killed_zero();
    let hs = harmonic_pair(&gen).unwrap();

    // α = 0.5 on [0.01, 10]: refine the grid 10× and watch the mean
    // cluster count grow substantially.
    let alpha = 0.5;
    let reps = 60;
    let mut mean_coarse = 0.0;
    let mut mean_fine = 0.0;
    let coarse: Vec<f64> = (1..=1000).map(|i| 0.01 * i as f64).collect();
    let fine: Vec<f64> = (1..=10_000).map(|i| 0.001 * i as f64).collect();
    let mut rng_c = rng(0x0cc_c1a5);
    for _ in 0..reps {
        let f = sample_field(&gen, &hs, alpha, &coarse, &mut rng_c).unwrap();
        mean_coarse += clusters(&f).len() as f64;
        let f = sample_field(&gen, &hs, alpha, &fine, &mut rng_c).unwrap();
        mean_fine += clusters(&f).len() as f64;
    }
    mean_coarse /= reps as f64;
    mean_fine /= reps as f64;
    assert!(
        mean_fine > 1.8 * mean_coarse && mean_coarse > 3.0,
        "cluster counts do not refine: coarse {mean_coarse:.1}, fine {mean_fine:.1}"
    );

    // α = 1.5: always exactly one cluster.
    let grid: Vec<f64> = (1..=200).map(|i| 0.05 * i as f64).collect();
    let mut rng_s = rng(0x0cc_c1a6);
    for _ in 0..300 {
        let f = sample_field(&gen, &hs, 1.5, &grid, &mut rng_s).unwrap();
        let cl = clusters(&f);
        assert_eq!(cl.len(), 1, "alpha=1.5 produced {} clusters", cl.len());
        assert!(f.interior_zero().iter().all(|z| !z));
    }
}

/// Cluster lengths for α = 0.5 over Brownian motion killed at 0 are the
/// jumps of a stable subordinator of index 1 − α = 1/2: the count with
/// length > t scales like t^{-1/2}, so N(>0.1)/N(>1) ≈ √10.
#[test]
fn cluster_length_tail_is_stable() {
    let gen = bm_killed_zero();
    let hs = harmonic_pair(&gen).unwrap();
    let alpha = 0.5;
    let grid: Vec<f64> = (1..=20_000).map(|i| 0.01 * i as f64).collect(); // (0, 200]
    let mut rng = rng(0x0cc_57ab);
    let mut lengths = Vec::new();
    for _ in 0..10 {
        let f = sample_field(&gen, &hs, alpha, &grid, &mut rng).unwrap();
        lengths.extend(clusters(&f).iter().map(|(l, r)| r - l));
    }
    let over = |t: f64| lengths.iter().filter(|&&len| len > t).count() as f64;
    let (n01, n1) = (over(0.1), over(1.0));
    assert!(n1 > 100.0, "too few long clusters for a tail estimate: {n1}");
    let ratio = n01 / n1;
    let expect = 10.0f64.sqrt();
    assert!(
        (ratio - expect).abs() < 0.4 * expect,
        "tail ratio {ratio:.2} vs √10 ≈ {expect:.2}"
    );
}

// ---------------------------------------------------------------------------
// Validation surfaces
// ---------------------------------------------------------------------------

#[test]
fn rejects_bad_inputs() {
    let gen = bm_killed_zero();
    let hs = harmonic_pair(&gen).unwrap();
    let mut r = rng(1);

    assert!(matches!(
        sample_field(&gen, &hs, 0.0, &[1.0], &mut r),
        Err(OccupationError::Precondition(_))
    ));
    assert!(sample_field(&gen, &hs, 1.0, &[], &mut r).is_err());
    assert!(sample_field(&gen, &hs, 1.0, &[2.0, 1.0], &mut r).is_err());
    assert!(sample_field(&gen, &hs, 1.0, &[-1.0, 2.0], &mut r).is_err());
    assert!(sample_field(&gen, &hs, 1.0, &[0.0], &mut r).is_err()); // killed endpoint

    assert!(laplace_det(&hs, &gen, &[1.0], &[0.5, 0.5], 1.0).is_err());
    assert!(laplace_det(&hs, &gen, &[1.0], &[-0.5], 1.0).is_err());
    assert!(laplace_det(&hs, &gen, &[1.0, 1.0], &[0.5, 0.5], 1.0).is_err());
    assert!(permanental_moment(&hs, &(1..=11).map(f64::from).collect::<Vec<_>>(), 1.0).is_err());

    // Supports outside the domain are rejected for exp_moment.
    let nu = RadonMeasure::from_atoms(vec![(-1.0, 0.1)]).unwrap();
    assert!(exp_moment(&gen, &hs, &nu, 1.0).is_err());
}

/// A finite natural lower boundary is reflecting: the field does not
/// vanish toward it, and the squared-Bessel reduction from zero is
/// rejected rather than silently mis-sampled.
#[test]
fn reflecting_lower_boundary_rejected() {
    let gen = GeneratorSpec::new(
        0.0,
        f64::INFINITY,
        Boundary::Natural,
        Boundary::Natural,
        Piecewise::constant(1.0),
        Piecewise::constant(2.0),
        RadonMeasure::from_atoms(vec![(1.0, 1.0)]).unwrap(),
    )
    .unwrap();
    let hs = harmonic_pair(&gen).unwrap();
    let mut r = rng(7);
    match sample_field(&gen, &hs, 1.0, &[2.0], &mut r) {
        Err(OccupationError::Precondition(msg)) => {
            assert!(msg.contains("reflecting"), "unexpected message: {msg}");
        }
        other => panic!("expected a precondition error, got {other:?}"),
    }
    assert!(sample_gff(&gen, &hs, &[2.0], &mut r).is_err());
}
