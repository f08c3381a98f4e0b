//! Closed-form functionals of the occupation field: determinant
//! Laplace transforms, alpha-permanents, and exponential moments.
//!
//! All formulas here are expressed in the Green's function `G` alone.
//! Field values are local times relative to `m(x) dx`, and with that
//! normalisation the pairing `Σ λ_i V(x_i)` (or `∫ V dν̃`) produces
//! determinants of plain Green matrices, with no speed-density
//! factors. A point mass `λ` paired against the field at `x`
//! corresponds to extra killing of the diffusion of *rate* `λ`, which
//! as a killing measure (paired against `m(x) dx`-local time) is the
//! atom `λ / m(x) · δ_x`; the conversion happens once, inside the
//! perturbation plumbing, and every exported value is `m`-free.

use itertools::Itertools;
use loopsoup_core::quad::{adaptive_simpson, gauss_legendre_16_table};
use loopsoup_core::{
    classify, harmonic_pair, perturb, DensityPiece, GeneratorSpec, HarmonicSystem, Piecewise,
    RadonMeasure, TransienceClass,
};
use nalgebra::DMatrix;

use crate::{require, OccupationResult};

type Generator64 = GeneratorSpec<f64>;
type Harmonic64 = HarmonicSystem<f64>;
type Measure64 = RadonMeasure<f64>;

/// Convert a measure paired against occupation-field values into the
/// equivalent killing-rate perturbation of the generator.
///
/// Field values are local times relative to `m(x) dx`; a pairing
/// measure `ν̃` therefore perturbs the killing measure by `ν̃ / m`
/// (mass-creation-positive sign). Atoms divide by `m` at their
/// location; density pieces split at the breakpoints of the
/// piecewise-constant `m` and divide piecewise.
fn pairing_to_killing(nu: &Measure64, m: &Piecewise<f64>) -> OccupationResult<Measure64> {
    let atoms = nu
        .atoms()
        .iter()
        .map(|&(x, mass)| (x, mass / m.at(x)))
        .collect();
    let mut cuts: Vec<f64> = m.breakpoints();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut pieces = Vec::new();
    for p in nu.pieces() {
        let mut edges = vec![p.x_lo];
        edges.extend(cuts.iter().copied().filter(|&c| p.x_lo < c && c < p.x_hi));
        edges.push(p.x_hi);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mv = m.at(0.5 * (a + b));
            pieces.push(DensityPiece {
                x_lo: a,
                x_hi: b,
                c: p.value(a) / mv,
                slope: p.slope / mv,
            });
        }
    }
    Ok(Measure64::new(atoms, pieces)?)
}

fn green_matrix(hs: &Harmonic64, points: &[f64]) -> DMatrix<f64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |i, j| hs.green(points[i], points[j]))
}

fn validate_points(gen: &Generator64, points: &[f64]) -> OccupationResult<()> {
    require(!points.is_empty(), || "point list is empty".into())?;
    require(points.iter().all(|x| x.is_finite() && gen.lo < *x && *x < gen.hi), || {
        format!("points must lie strictly inside the domain ({}, {})", gen.lo, gen.hi)
    })?;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    require(sorted.windows(2).all(|w| w[0] < w[1]), || {
        "points must be pairwise distinct".into()
    })?;
    Ok(())
}

/// Joint Laplace transform `E[exp(−Σ λ_i V(x_i))]` of the occupation
/// field at finitely many points, as a ratio of Green determinants:
///
/// `(det G̃(x_i, x_j) / det G(x_i, x_j))^alpha`,
///
/// where `G̃` is the Green's function of the generator with extra
/// killing of rate `λ_i` at each `x_i`. The identity
/// `det G̃ / det G = det(Id + Λ G)^{-1}` (with `Λ = diag(λ)`) holds
/// exactly for this finite-rank perturbation, so the result involves
/// the plain Green matrix only — no speed-density factors.
///
/// Requires `λ_i >= 0`; all-zero `λ` returns `1` exactly.
pub fn laplace_det(
    hs: &Harmonic64,
    gen: &Generator64,
    points: &[f64],
    lambdas: &[f64],
    alpha: f64,
) -> OccupationResult<f64> {
    require(alpha.is_finite() && alpha > 0.0, || {
        format!("loop intensity alpha must be positive and finite, got {alpha}")
    })?;
    crate::sample::check_same_domain(gen, hs)?;
    validate_points(gen, points)?;
    require(points.len() == lambdas.len(), || {
        format!("{} points but {} lambdas", points.len(), lambdas.len())
    })?;
    require(lambdas.iter().all(|l| l.is_finite() && *l >= 0.0), || {
        "lambdas must be nonnegative and finite".into()
    })?;
    if lambdas.iter().all(|l| *l == 0.0) {
        return Ok(1.0);
    }

    // Extra killing: rate λ_i at x_i enters the killing measure as an
    // atom of mass λ_i / m(x_i); `perturb` subtracts its argument from
    // κ, so the pairing atoms are passed with a negative sign.
    let pinning = Measure64::from_atoms(
        points
            .iter()
            .zip(lambdas)
            .map(|(&x, &l)| (x, -l / gen.m.at(x)))
            .collect(),
    )?;
    let pert = perturb(gen, &pinning)?;
    let hs_pert = harmonic_pair(&pert)?;

    let det_pert = green_matrix(&hs_pert, points).determinant();
    let det_base = green_matrix(hs, points).determinant();
    require(det_base > 0.0 && det_pert > 0.0, || {
        "Green matrix determinant not positive (points too close together?)".into()
    })?;
    Ok((det_pert / det_base).powf(alpha))
}

/// Product moment `E[Π V(x_i)]` of the occupation field: the
/// alpha-permanent of the Green matrix,
/// `Σ_σ alpha^{#cycles(σ)} Π_i G(x_i, x_{σ(i)})`,
/// by exhaustive enumeration of permutations (hence `n <= 10`).
pub fn permanental_moment(
    hs: &Harmonic64,
    points: &[f64],
    alpha: f64,
) -> OccupationResult<f64> {
    require(alpha.is_finite() && alpha > 0.0, || {
        format!("loop intensity alpha must be positive and finite, got {alpha}")
    })?;
    validate_points(hs.generator(), points)?;
    let n = points.len();
    require(n <= 10, || {
        format!("permanental_moment enumerates n! permutations; n = {n} exceeds 10")
    })?;
    let g = green_matrix(hs, points);
    let mut total = 0.0;
    for sigma in (0..n).permutations(n) {
        let mut prod = 1.0;
        for (i, &si) in sigma.iter().enumerate() {
            prod *= g[(i, si)];
        }
        total += alpha.powi(cycle_count(&sigma) as i32) * prod;
    }
    Ok(total)
}

fn cycle_count(sigma: &[usize]) -> usize {
    let mut seen = vec![false; sigma.len()];
    let mut cycles = 0;
    for start in 0..sigma.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = sigma[i];
        }
    }
    cycles
}

/// Result of [`exp_moment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpMomentValue {
    /// The moment is finite; both evaluation routes are reported and
    /// should agree to quadrature accuracy.
    Finite {
        /// `exp(alpha ∫₀¹ ∫ G_{s}(x, x) ν̃(dx) ds)` where `G_s` is the
        /// Green's function of the generator perturbed by `s ν̃`.
        trace_route: f64,
        /// `det(Id + 𝔊)^alpha` where `𝔊 f(x) = ∫ G̃(x, y) f(y) ν̃(dy)`
        /// and `G̃` is the fully perturbed Green's function, via the
        /// discretized symmetric reduction.
        fredholm_route: f64,
    },
    /// The moment diverges: the perturbed generator has left the
    /// transient class.
    Infinite,
}

impl ExpMomentValue {
    /// The trace-route value, or `None` when infinite.
    pub fn value(&self) -> Option<f64> {
        match self {
            ExpMomentValue::Finite { trace_route, .. } => Some(*trace_route),
            ExpMomentValue::Infinite => None,
        }
    }
}

/// Exponential moment `E[exp(∫ V(x) ν̃(dx))]` of the occupation field
/// against a signed, compactly supported measure.
///
/// The moment is finite exactly when the generator perturbed by `ν̃`
/// (as extra mass creation) remains transient; in that case the value
/// is computed by two independent routes — a trace integral along the
/// perturbation path and a Fredholm determinant of the perturbed
/// kernel — and both are reported. When the perturbed generator is
/// not transient the moment diverges and [`ExpMomentValue::Infinite`]
/// is returned.
pub fn exp_moment(
    gen: &Generator64,
    hs: &Harmonic64,
    nu_tilde: &Measure64,
    alpha: f64,
) -> OccupationResult<ExpMomentValue> {
    require(alpha.is_finite() && alpha > 0.0, || {
        format!("loop intensity alpha must be positive and finite, got {alpha}")
    })?;
    crate::sample::check_same_domain(gen, hs)?;
    if nu_tilde.is_zero() {
        return Ok(ExpMomentValue::Finite { trace_route: 1.0, fredholm_route: 1.0 });
    }
    if let Some((lo, hi)) = nu_tilde.support_bounds() {
        require(gen.lo < lo && hi < gen.hi, || {
            format!(
                "pairing measure support [{lo}, {hi}] must lie strictly inside ({}, {})",
                gen.lo, gen.hi
            )
        })?;
    }

    let killing = pairing_to_killing(nu_tilde, &gen.m)?;
    let report = classify(gen, &killing)?;
    if report.class != TransienceClass::DMinus {
        return Ok(ExpMomentValue::Infinite);
    }

    let trace_route = trace_route(gen, nu_tilde, &killing, alpha)?;
    let fredholm_route = fredholm_route(gen, nu_tilde, &killing, alpha)?;
    Ok(ExpMomentValue::Finite { trace_route, fredholm_route })
}

/// `exp(alpha ∫₀¹ F(s) ds)` with `F(s) = ∫ G_{L + s ν̃}(x, x) ν̃(dx)`.
fn trace_route(
    gen: &Generator64,
    nu_tilde: &Measure64,
    killing: &Measure64,
    alpha: f64,
) -> OccupationResult<f64> {
    let eval = |s: f64| -> Result<f64, loopsoup_core::CoreError> {
        let pert = perturb(gen, &killing.scaled(s))?;
        let hs_s = harmonic_pair(&pert)?;
        Ok(nu_tilde.integrate(|x| hs_s.green(x, x), 1e-11))
    };
    // Adaptive Simpson needs a plain closure; stash the first error.
    let err = std::cell::RefCell::new(None);
    let f = |s: f64| -> f64 {
        match eval(s) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let scale = f(0.0).abs().max(f(1.0).abs()).max(1e-3);
    let integral = adaptive_simpson(&f, 0.0, 1.0, 1e-10 * scale);
    if let Some(e) = err.into_inner() {
        return Err(e.into());
    }
    Ok((alpha * integral).exp())
}

/// `det(Id + 𝔊)^alpha` where `𝔊 f(x) = ∫ G̃(x, y) f(y) ν̃(dy)` and `G̃`
/// is the fully perturbed Green's function.
///
/// The kernel is discretized on the atoms of `ν̃` plus four 16-point
/// Gauss–Legendre panels per density piece. Writing the node weights
/// as `w = d |w|` (sign and modulus), the nonzero spectrum of
/// `G̃ diag(w)` equals that of the symmetric matrix
/// `A^{1/2} diag(d) A^{1/2}` with
/// `A = diag(|w|^{1/2}) G̃ diag(|w|^{1/2})` positive semidefinite, so
/// the determinant is evaluated from real symmetric eigenvalues. In
/// the transient class all eigenvalues exceed `-1`.
fn fredholm_route(
    gen: &Generator64,
    nu_tilde: &Measure64,
    killing: &Measure64,
    alpha: f64,
) -> OccupationResult<f64> {
    let pert = perturb(gen, killing)?;
    let hs_pert = harmonic_pair(&pert)?;

    let mut nodes: Vec<(f64, f64)> = Vec::new();
    for &(x, mass) in nu_tilde.atoms() {
        nodes.push((x, mass));
    }
    const PANELS: usize = 4;
    for p in nu_tilde.pieces() {
        let len = (p.x_hi - p.x_lo) / PANELS as f64;
        for k in 0..PANELS {
            let a = p.x_lo + k as f64 * len;
            for (x, w) in gauss_legendre_16_table(a, a + len) {
                nodes.push((x, w * p.value(x)));
            }
        }
    }
    nodes.retain(|&(_, w)| w != 0.0);
    if nodes.is_empty() {
        return Ok(1.0);
    }

    let n = nodes.len();
    let root = DMatrix::from_fn(n, n, |i, j| {
        let wi = nodes[i].1.abs().sqrt();
        let wj = nodes[j].1.abs().sqrt();
        wi * hs_pert.green(nodes[i].0, nodes[j].0) * wj
    });
    let eig_a = root.symmetric_eigen();
    let sqrt_a = &eig_a.eigenvectors
        * DMatrix::from_diagonal(&eig_a.eigenvalues.map(|l| l.max(0.0).sqrt()))
        * eig_a.eigenvectors.transpose();
    let signs = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        nodes.iter().map(|&(_, w)| if w >= 0.0 { 1.0 } else { -1.0 }),
    ));
    let sym = &sqrt_a * signs * &sqrt_a;
    let mut log_det = 0.0;
    for mu in sym.symmetric_eigen().eigenvalues.iter() {
        require(*mu > -1.0, || {
            format!(
                "discretized Fredholm kernel produced eigenvalue {mu} <= -1 despite the \
                 transience check; refine the discretisation"
            )
        })?;
        log_det += mu.ln_1p();
    }
    Ok((alpha * log_det).exp())
}
