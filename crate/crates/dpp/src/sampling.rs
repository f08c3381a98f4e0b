//! Inverse-CDF sampling against weighted killing measures.
//!
//! Every sampling law in this crate has the shape `f(y)·κ(dy)` (a smooth
//! weight against the killing measure) or `w(z)·dz` (scale-uniform on a
//! gap).  Atoms contribute point masses `f(a)·κ({a})`; density pieces are
//! integrated by adaptive quadrature between the weight's kink points, and
//! inverted by bisection — the CDF is monotone and the integrand smooth on
//! each sub-segment, so this is robust at full precision.

use loopsoup_core::quad::adaptive_simpson;
use loopsoup_core::{DensityPiece, Generator64, Measure64};

/// Quadrature tolerance for component masses.  These are sampling weights
/// (statistical error dominates), but they also feed the partition-of-unity
/// self-checks, so keep them tight.
const QUAD_TOL: f64 = 1e-11;

enum Comp {
    Atom { x: f64, mass: f64 },
    Seg { lo: f64, hi: f64, piece: DensityPiece<f64>, mass: f64 },
}

/// A weighted restriction `f(y)·κ(dy)` on an open interval, tabulated per
/// component for inverse-CDF sampling.
pub(crate) struct WeightedKappa {
    comps: Vec<Comp>,
    total: f64,
}

impl WeightedKappa {
    /// Tabulate `f·κ` on `(lo, hi)` (atoms at the endpoints excluded — an
    /// absorbed walk accrues no local time at its absorption point).
    /// `splits` lists kink positions of `f` (e.g. the walk's start, where
    /// the Green's function has a derivative jump).
    pub fn new(
        kappa: &Measure64,
        lo: f64,
        hi: f64,
        splits: &[f64],
        f: impl Fn(f64) -> f64,
    ) -> Self {
        let mut comps = Vec::new();
        let mut total = 0.0;
        for &(x, mass) in kappa.atoms() {
            if lo < x && x < hi {
                let m = f(x) * mass;
                comps.push(Comp::Atom { x, mass: m });
                total += m;
            }
        }
        for p in kappa.pieces() {
            let plo = p.x_lo.max(lo);
            let phi = p.x_hi.min(hi);
            if phi <= plo {
                continue;
            }
            let mut cuts = vec![plo];
            // cut at weight kinks and at interior atoms, so components in
            // position order realize the true (position-faithful) CDF
            for &s in splits.iter().chain(kappa.atoms().iter().map(|(x, _)| x)) {
                if plo < s && s < phi {
                    cuts.push(s);
                }
            }
            cuts.push(phi);
            cuts.sort_by(f64::total_cmp);
            for c in cuts.windows(2) {
                let mass = adaptive_simpson(|y| f(y) * p.value(y), c[0], c[1], QUAD_TOL);
                comps.push(Comp::Seg { lo: c[0], hi: c[1], piece: *p, mass });
                total += mass;
            }
        }
        // position order (atoms and segments never interleave wrongly
        // within a piece because atoms are separate from pieces)
        comps.sort_by(|a, b| comp_pos(a).total_cmp(&comp_pos(b)));
        Self { comps, total }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Invert the CDF at `target ∈ [0, total)`.
    pub fn sample(&self, target: f64, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for comp in &self.comps {
            let mass = match comp {
                Comp::Atom { mass, .. } => *mass,
                Comp::Seg { mass, .. } => *mass,
            };
            if acc + mass > target {
                return match comp {
                    Comp::Atom { x, .. } => *x,
                    Comp::Seg { lo, hi, piece, .. } => {
                        invert_segment(*lo, *hi, piece, target - acc, &f)
                    }
                };
            }
            acc += mass;
        }
        // target at (or above, through roundoff) the full mass: return the
        // rightmost support point
        match self.comps.last() {
            Some(Comp::Atom { x, .. }) => *x,
            Some(Comp::Seg { hi, .. }) => *hi,
            None => f64::NAN,
        }
    }
}

fn comp_pos(c: &Comp) -> f64 {
    match c {
        Comp::Atom { x, .. } => *x,
        Comp::Seg { lo, .. } => *lo,
    }
}

fn invert_segment(
    lo: f64,
    hi: f64,
    piece: &DensityPiece<f64>,
    local_target: f64,
    f: impl Fn(f64) -> f64,
) -> f64 {
    // incremental bisection: `acc` is the exact CDF at the bracket's left
    // end, so each probe integrates only the (halving) left half-bracket
    // and the total quadrature work stays linear in the segment length
    let mut a = lo;
    let mut b = hi;
    let mut acc = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        let inc = adaptive_simpson(|y| f(y) * piece.value(y), a, mid, QUAD_TOL);
        if acc + inc < local_target {
            acc += inc;
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-14 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// `∫_a^b w(x) dx` — the scale length of `[a, b]` (exact: `w` is piecewise
/// constant).
pub(crate) fn scale_between(gen: &Generator64, a: f64, b: f64) -> f64 {
    debug_assert!(a.is_finite() && b.is_finite() && a <= b);
    let mut cuts = vec![a];
    for t in gen.w.breakpoints() {
        if a < t && t < b {
            cuts.push(t);
        }
    }
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|c| gen.w.at(0.5 * (c[0] + c[1])) * (c[1] - c[0]))
        .sum()
}

/// Draw a scale-uniform point on `(a, b)`: density `w(z) dz`, normalized.
/// Exact inversion through the piecewise-linear scale function.
pub(crate) fn sample_w_uniform(gen: &Generator64, a: f64, b: f64, u: f64) -> f64 {
    let total = scale_between(gen, a, b);
    let mut target = u * total;
    let mut cuts = vec![a];
    for t in gen.w.breakpoints() {
        if a < t && t < b {
            cuts.push(t);
        }
    }
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    for c in cuts.windows(2) {
        let wv = gen.w.at(0.5 * (c[0] + c[1]));
        let seg = wv * (c[1] - c[0]);
        if target <= seg || c[1] == b {
            return (c[0] + target / wv).min(b).max(a);
        }
        target -= seg;
    }
    b
}
