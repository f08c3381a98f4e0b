//! Closed-form correlations: the second-kind kernel, joint configuration
//! densities, and counting moments over products of intervals.
//!
//! Both point families have "Green matrix" correlation kernels
//! `M(s, t) = a(s∧t)·b(s∨t)`:
//!
//! * kill points: `a = u↑`, `b = u↓` against the reference `m(y) κ(dy)`;
//! * gap points: `a = v↑(·+)`, `b = −v↓(·−)` against `w(z) dz`.
//!
//! Determinants of such matrices factor over consecutive points,
//!
//! `det M = ∏ᵢ a(tᵢ) b(tᵢ) · ∏ᵢ (1 − rᵢ)`,   `rᵢ = [a(tᵢ) b(tᵢ₊₁)] / [a(tᵢ₊₁) b(tᵢ)]`,
//!
//! with every `rᵢ ∈ [0, 1]` (both ratios are monotone), so the product form
//! is cancellation-free even for nearly coincident points — the naive
//! determinant loses all precision exactly there.  The moment quadratures
//! below always go through this factorization.

use loopsoup_core::quad::gauss_legendre_16_table;
use loopsoup_core::{Generator64, Harmonic64};

use crate::{DppError, DppResult};

/// Maximum number of intervals in a product moment (the tensor quadrature
/// grows geometrically).
const MAX_INTERVALS: usize = 3;

/// Panel length target for the moment quadratures; 16-point Gauss–Legendre
/// on panels this size resolves the harmonic pair's exponentials to full
/// precision for any representable killing density.
const PANEL_LEN: f64 = 0.5;

/// The second-kind kernel `𝒦` of the gap points, symmetrized against
/// Lebesgue measure:
///
/// `𝒦(y, z) = −v↑((y∧z)+) · v↓((y∨z)−) · √(w(y) w(z))`.
///
/// For constant `w = 2` (Brownian normalization) this is
/// `−(1/2)·u↑'((y∧z)+)·u↓'((y∨z)−)`; its diagonal is the intensity of the
/// gap points per unit length.
pub struct KernelK<'a> {
    hs: &'a Harmonic64,
}

impl<'a> KernelK<'a> {
    pub fn new(hs: &'a Harmonic64) -> Self {
        Self { hs }
    }

    pub fn eval(&self, y: f64, z: f64) -> f64 {
        let (lo, hi) = if y <= z { (y, z) } else { (z, y) };
        -self.hs.v_up_right(lo)
            * self.hs.v_down_left(hi)
            * (self.hs.w_at(y) * self.hs.w_at(z)).sqrt()
    }
}

/// Joint correlation density of a full consecutive block
/// `y₀ < z₁ < y₁ < … < zₙ < yₙ`:
///
/// `M_n = ∏ᵢ w(zᵢ) · G(y₀, yₙ)`
///
/// with respect to `∏ m(yᵢ) κ(dyᵢ) ⊗ ∏ dzᵢ` (for Brownian motion the
/// prefactor is `2ⁿ`).  Interleaving violations are rejected.
pub fn joint_density(hs: &Harmonic64, ys: &[f64], zs: &[f64]) -> DppResult<f64> {
    if ys.is_empty() {
        return Err(DppError::Precondition("joint_density needs at least one kill point".into()));
    }
    if zs.len() + 1 != ys.len() {
        return Err(DppError::InvalidConfig(format!(
            "{} kill points need {} gap points, got {}",
            ys.len(),
            ys.len() - 1,
            zs.len()
        )));
    }
    let gen = hs.generator();
    for w in ys.windows(2) {
        if !(w[0] < w[1]) {
            return Err(DppError::InvalidConfig("kill points not strictly increasing".into()));
        }
    }
    for (i, &z) in zs.iter().enumerate() {
        if !(ys[i] < z && z < ys[i + 1]) {
            return Err(DppError::InvalidConfig(format!(
                "gap point {z} not strictly between {} and {}",
                ys[i],
                ys[i + 1]
            )));
        }
    }
    for &p in ys.iter().chain(zs) {
        if !gen.contains(p) {
            return Err(DppError::Precondition(format!("point {p} outside the interval")));
        }
    }
    let mut d = hs.green(ys[0], ys[ys.len() - 1]);
    for &z in zs {
        d *= hs.w_at(z);
    }
    Ok(d)
}

/// `E[∏ᵢ N_Y(Aᵢ)]` for pairwise disjoint intervals: the tensor quadrature
/// of `det[G(xᵢ, xⱼ)]` against `m κ` per coordinate, evaluated through the
/// factorized determinant.
pub fn count_moment_y(hs: &Harmonic64, intervals: &[(f64, f64)]) -> DppResult<f64> {
    validate_intervals(hs.generator(), intervals)?;
    let lists: Vec<Vec<(f64, f64)>> =
        intervals.iter().map(|&iv| y_nodes(hs, iv)).collect();
    Ok(tensor_det_sum(&lists, |t| (hs.u_up(t), hs.u_down(t))))
}

/// `E[∏ᵢ N_Z(Aᵢ)]` for pairwise disjoint intervals, via the factorized
/// determinant of the `𝒦` Green matrix.
pub fn count_moment_z(hs: &Harmonic64, intervals: &[(f64, f64)]) -> DppResult<f64> {
    validate_intervals(hs.generator(), intervals)?;
    let lists: Vec<Vec<(f64, f64)>> =
        intervals.iter().map(|&iv| z_nodes(hs, iv)).collect();
    Ok(tensor_det_sum(&lists, |t| (hs.v_up_right(t), -hs.v_down_left(t))))
}

fn validate_intervals(gen: &Generator64, intervals: &[(f64, f64)]) -> DppResult<()> {
    if intervals.is_empty() || intervals.len() > MAX_INTERVALS {
        return Err(DppError::Precondition(format!(
            "between 1 and {MAX_INTERVALS} intervals supported, got {}",
            intervals.len()
        )));
    }
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(a, b) in &sorted {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(DppError::Precondition(format!("bad interval [{a}, {b}]")));
        }
        if !(gen.contains(a) && gen.contains(b)) {
            return Err(DppError::Precondition(format!(
                "interval [{a}, {b}] leaves the generator's interval"
            )));
        }
    }
    for w in sorted.windows(2) {
        if !(w[0].1 < w[1].0) {
            return Err(DppError::Precondition(format!(
                "intervals [{}, {}] and [{}, {}] are not disjoint",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    Ok(())
}

/// Quadrature nodes `(position, weight)` for `∫_A · m dκ`: atoms carry
/// `m·mass`, density pieces get Gauss–Legendre panels split at every
/// coefficient breakpoint.
fn y_nodes(hs: &Harmonic64, (a, b): (f64, f64)) -> Vec<(f64, f64)> {
    let gen = hs.generator();
    let mut nodes = Vec::new();
    for &(x, mass) in gen.kappa.atoms() {
        if a <= x && x <= b {
            nodes.push((x, hs.m_at(x) * mass));
        }
    }
    for p in gen.kappa.pieces() {
        for (lo, hi) in split_segments(gen, p.x_lo.max(a), p.x_hi.min(b)) {
            for (t, w) in gauss_legendre_16_table(lo, hi) {
                nodes.push((t, w * p.value(t) * hs.m_at(t)));
            }
        }
    }
    nodes
}

/// Quadrature nodes for `∫_A · w dz` (the gap-point reference after the
/// `√w` symmetrization is pulled out of the determinant).
fn z_nodes(hs: &Harmonic64, (a, b): (f64, f64)) -> Vec<(f64, f64)> {
    let gen = hs.generator();
    let mut nodes = Vec::new();
    for (lo, hi) in split_segments(gen, a, b) {
        for (t, w) in gauss_legendre_16_table(lo, hi) {
            nodes.push((t, w * hs.w_at(t)));
        }
    }
    nodes
}

/// Cut `[a, b]` at every breakpoint of `m`, `w` and `κ`, then into panels
/// of length at most [`PANEL_LEN`].
fn split_segments(gen: &Generator64, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if !(a < b) {
        return out;
    }
    let mut cuts = vec![a, b];
    for t in gen
        .m
        .breakpoints()
        .into_iter()
        .chain(gen.w.breakpoints())
        .chain(gen.kappa.breakpoints())
    {
        if a < t && t < b {
            cuts.push(t);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    for c in cuts.windows(2) {
        let panels = ((c[1] - c[0]) / PANEL_LEN).ceil().max(1.0) as usize;
        let h = (c[1] - c[0]) / panels as f64;
        for k in 0..panels {
            let lo = c[0] + h * k as f64;
            out.push((lo, lo + h));
        }
    }
    out
}

/// `det M` over sorted points with `Mᵢⱼ = a(tᵢ∧ⱼ)·b(tᵢ∨ⱼ)`, in the
/// cancellation-free product form.  `vals` holds `(a(tᵢ), b(tᵢ))` in
/// position order.
fn green_matrix_det(vals: &[(f64, f64)]) -> f64 {
    let mut det = 1.0;
    for v in vals {
        det *= v.0 * v.1;
    }
    for w in vals.windows(2) {
        det *= 1.0 - (w[0].0 * w[1].1) / (w[1].0 * w[0].1);
    }
    det
}

/// Σ over the tensor product of node lists of
/// `∏ weights · det M(t₁, …, t_k)`.
fn tensor_det_sum(lists: &[Vec<(f64, f64)>], ab: impl Fn(f64) -> (f64, f64)) -> f64 {
    // cache the kernel legs per node, then run a plain recursion (k ≤ 3)
    let legs: Vec<Vec<(f64, f64, (f64, f64))>> = lists
        .iter()
        .map(|l| l.iter().map(|&(t, w)| (t, w, ab(t))).collect())
        .collect();
    let mut total = 0.0;
    let mut chosen: Vec<(f64, (f64, f64))> = Vec::with_capacity(lists.len());
    fn rec(
        legs: &[Vec<(f64, f64, (f64, f64))>],
        depth: usize,
        weight: f64,
        chosen: &mut Vec<(f64, (f64, f64))>,
        total: &mut f64,
    ) {
        if depth == legs.len() {
            let mut pts = chosen.clone();
            pts.sort_by(|x, y| x.0.total_cmp(&y.0));
            let vals: Vec<(f64, f64)> = pts.iter().map(|p| p.1).collect();
            *total += weight * green_matrix_det(&vals);
            return;
        }
        for &(t, w, leg) in &legs[depth] {
            chosen.push((t, leg));
            rec(legs, depth + 1, weight * w, chosen, total);
            chosen.pop();
        }
    }
    rec(&legs, 0, 1.0, &mut chosen, &mut total);
    total
}
