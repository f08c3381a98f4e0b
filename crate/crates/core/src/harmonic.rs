//! The normalized harmonic pair `(u↑, u↓)` of a transient generator, its
//! Green's function, and restrictions to half-intervals.
//!
//! `u↑` is positive and nondecreasing, `u↓` positive and nonincreasing, both
//! harmonic for the killed generator, jointly normalized so that the
//! Wronskian `u↓ u↑' − u↑ u↓' ≡ w`.  The Green's function (with respect to
//! the speed measure `m(y)dy`) is
//!
//! ```text
//!     G(x, y) = u↑(x∧y) · u↓(x∨y).
//! ```
//!
//! In the scaled derivative `v = u'/w` the normalization reads
//! `W_v := u↓ v↑ − u↑ v↓ ≡ 1`, which is the form used internally.

use crate::error::{CoreError, CoreResult};
use crate::generator::{Boundary, GeneratorSpec};
use crate::solve::{march, Grid, Side, Solution};
use crate::Real;

/// Relative Wronskian drift accepted across the grid before the pair is
/// rejected as inconsistent.
const WRONSKIAN_TOL: f64 = 1e-8;

/// Harmonic pair and Green's function of a transient generator.
#[derive(Debug, Clone)]
pub struct HarmonicSystem<F> {
    gen: GeneratorSpec<F>,
    up: Solution<F>,
    down: Solution<F>,
    /// Maximum relative deviation of the Wronskian across the grid.
    wronskian_dev: F,
    /// `lim_{x→lo} u↑(x)` (zero at a killed boundary).
    up_limit_left: F,
    /// `lim_{x→hi} u↓(x)` (zero at a killed boundary).
    down_limit_right: F,
}

/// Compute the normalized harmonic pair of `gen`.
///
/// Fails with [`CoreError::NotTransient`] when no positive pair exists
/// (no killing and no killed boundary, or mass creation beyond the
/// transient regime after a perturbation).
pub fn harmonic_pair<F: Real>(gen: &GeneratorSpec<F>) -> CoreResult<HarmonicSystem<F>> {
    let support = gen.kappa.support_bounds();
    if support.is_none()
        && gen.lo_boundary != Boundary::Killed
        && gen.hi_boundary != Boundary::Killed
    {
        return Err(CoreError::NotTransient { margin: 0.0 });
    }

    // Anchor the computational window: finite endpoints win, otherwise the
    // κ support hull widened to cover every m/w breakpoint (the pair is
    // exactly linear/constant beyond the window only once the coefficients
    // are constant there); pad degenerate windows on unbounded sides only.
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
    for t in gen.m.breakpoints().into_iter().chain(gen.w.breakpoints()) {
        // Float::min/max return the non-NaN argument, so these also seed
        // NaN anchors; clamp to the domain afterwards.
        if t.is_finite() {
            a = a.min(t);
            b = b.max(t);
        }
    }
    if a < gen.lo {
        a = gen.lo;
    }
    if b > gen.hi {
        b = gen.hi;
    }
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

    let grid = Grid::build(&gen.kappa, &gen.m, &gen.w, a, b, &[]);
    let last = grid.xs.len() - 1;

    let up_nodes = match gen.lo_boundary {
        Boundary::Killed if gen.lo.is_finite() => march(&grid, 0, F::zero(), F::one(), Side::Right),
        _ => march(&grid, 0, F::one(), F::zero(), Side::Left),
    }?;
    let down_nodes = match gen.hi_boundary {
        Boundary::Killed if gen.hi.is_finite() => {
            march(&grid, last, F::zero(), -F::one(), Side::Left)
        }
        _ => march(&grid, last, F::one(), F::zero(), Side::Right),
    }?;

    // positivity of the pair in the interior (strict except at killed seeds)
    for (i, n) in up_nodes.iter().enumerate() {
        let seed_zero = i == 0 && gen.lo_boundary == Boundary::Killed;
        let seed_zero_dn = i == last && gen.hi_boundary == Boundary::Killed;
        if (!seed_zero && n.u <= F::zero()) || (!seed_zero_dn && down_nodes[i].u <= F::zero()) {
            return Err(CoreError::NotTransient { margin: n.u.min(down_nodes[i].u).to_f64() });
        }
    }

    // Wronskian W_v = u↓ v↑ − u↑ v↓, constant in theory; right sides are
    // consistent across atoms.
    let mut w_min = F::infinity();
    let mut w_max = F::neg_infinity();
    let mut w_ref = F::zero();
    for i in 0..=last {
        let wv = down_nodes[i].u * up_nodes[i].v_right - up_nodes[i].u * down_nodes[i].v_right;
        w_min = w_min.min(wv);
        w_max = w_max.max(wv);
        if i == last / 2 {
            w_ref = wv;
        }
    }
    if !(w_ref > F::zero()) || !w_ref.is_finite() {
        return Err(CoreError::NotTransient { margin: w_ref.to_f64() });
    }
    let dev = ((w_max - w_min) / w_ref).abs();
    if dev > F::of(WRONSKIAN_TOL) {
        return Err(CoreError::InvalidGenerator(format!(
            "Wronskian drifts by a relative {dev} across the grid"
        )));
    }

    let mut up = Solution::new(up_nodes, &grid);
    let mut down = Solution::new(down_nodes, &grid);
    let scale = F::one() / w_ref.sqrt();
    up.scale_by(scale);
    down.scale_by(scale);

    let up_limit_left = match gen.lo_boundary {
        Boundary::Killed if gen.lo.is_finite() => F::zero(),
        _ => up.nodes()[0].u,
    };
    let down_limit_right = match gen.hi_boundary {
        Boundary::Killed if gen.hi.is_finite() => F::zero(),
        _ => down.nodes()[last].u,
    };

    Ok(HarmonicSystem {
        gen: gen.clone(),
        up,
        down,
        wronskian_dev: dev,
        up_limit_left,
        down_limit_right,
    })
}

impl<F: Real> HarmonicSystem<F> {
    /// The generator this pair belongs to.
    pub fn generator(&self) -> &GeneratorSpec<F> {
        &self.gen
    }

    /// Nondecreasing harmonic function `u↑(x)`.
    pub fn u_up(&self, x: F) -> F {
        self.up.u(x)
    }

    /// Nonincreasing harmonic function `u↓(x)`.
    pub fn u_down(&self, x: F) -> F {
        self.down.u(x)
    }

    /// One-sided derivatives of `u↑`.
    pub fn du_up_right(&self, x: F) -> F {
        self.up.du_right(x)
    }
    pub fn du_up_left(&self, x: F) -> F {
        self.up.du_left(x)
    }

    /// One-sided derivatives of `u↓`.
    pub fn du_down_right(&self, x: F) -> F {
        self.down.du_right(x)
    }
    pub fn du_down_left(&self, x: F) -> F {
        self.down.du_left(x)
    }

    /// Scaled derivatives `v = u'/w` (right / left limits).
    pub fn v_up_right(&self, x: F) -> F {
        self.up.v_right(x)
    }
    pub fn v_up_left(&self, x: F) -> F {
        self.up.v_left(x)
    }
    pub fn v_down_right(&self, x: F) -> F {
        self.down.v_right(x)
    }
    pub fn v_down_left(&self, x: F) -> F {
        self.down.v_left(x)
    }

    /// `lim_{x→inf I} u↑(x)` — positive iff the process started anywhere can
    /// avoid drifting to the lower end (compactly supported killing on a
    /// natural side), zero at a killed boundary.
    pub fn u_up_limit_left(&self) -> F {
        self.up_limit_left
    }

    /// `lim_{x→sup I} u↓(x)`.
    pub fn u_down_limit_right(&self) -> F {
        self.down_limit_right
    }

    /// Green's function `G(x,y) = u↑(x∧y) u↓(x∨y)` w.r.t. the speed measure.
    pub fn green(&self, x: F, y: F) -> F {
        debug_assert!(self.gen.contains(x) && self.gen.contains(y));
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        self.up.u(lo) * self.down.u(hi)
    }

    /// The second-kind kernel
    /// `𝒦(y,z) = −u↑'((y∧z)+) · u↓'((y∨z)−)`, taken with respect to the
    /// reference measure `dz / w(z)`.
    pub fn kernel_z(&self, y: F, z: F) -> F {
        let (lo, hi) = if y <= z { (y, z) } else { (z, y) };
        -self.up.du_right(lo) * self.down.du_left(hi)
    }

    /// Speed density at `x`.
    pub fn m_at(&self, x: F) -> F {
        self.gen.m.at(x)
    }

    /// Scale derivative at `x`.
    pub fn w_at(&self, x: F) -> F {
        self.gen.w.at(x)
    }

    /// Maximum relative Wronskian drift across the grid (diagnostic; the
    /// constructor enforces ≤ 1e-8).
    pub fn wronskian_dev(&self) -> F {
        self.wronskian_dev
    }

    /// Grid node positions (useful for exports and tests).
    pub fn grid_nodes(&self) -> impl Iterator<Item = F> + '_ {
        self.up.nodes().iter().map(|n| n.x)
    }

    /// Restrict the generator to one side of `x0`.
    ///
    /// * `bc = Killed`: Dirichlet at `x0` (the process is killed there);
    /// * `bc = Reflected`: Neumann at `x0`; requires `κ({x0}) = 0` so the
    ///   one-sided derivatives agree.
    ///
    /// Returns the combination pair of the restricted generator, normalized
    /// (`W_v = 1`), living on `[x0, hi)` resp. `(lo, x0]`.
    pub fn restrict(
        &self,
        x0: F,
        side: RestrictSide,
        bc: RestrictBc,
    ) -> CoreResult<RestrictedHarmonics<F>> {
        if !self.gen.contains(x0) {
            return Err(CoreError::OutsideDomain { x: x0.to_f64() });
        }
        if bc == RestrictBc::Reflected && self.gen.kappa.atom_at(x0) != F::zero() {
            return Err(CoreError::Precondition(format!(
                "reflected restriction needs κ({{x0}}) = 0 at x0 = {x0}"
            )));
        }
        let (up, down) = match (side, bc) {
            // keep [x0, ∞): u↑ is replaced by the combination vanishing
            // (killed) or with vanishing derivative (reflected) at x0
            (RestrictSide::RightOf, RestrictBc::Killed) => {
                let ratio = self.up.u(x0) / self.down.u(x0);
                (CombPair { c_up: F::one(), c_dn: -ratio }, CombPair::down())
            }
            (RestrictSide::RightOf, RestrictBc::Reflected) => {
                let ratio = self.up.du_right(x0) / self.down.du_right(x0);
                (CombPair { c_up: F::one(), c_dn: -ratio }, CombPair::down())
            }
            // keep (-∞, x0]: u↓ is replaced
            (RestrictSide::LeftOf, RestrictBc::Killed) => {
                let ratio = self.down.u(x0) / self.up.u(x0);
                (CombPair::up(), CombPair { c_up: -ratio, c_dn: F::one() })
            }
            (RestrictSide::LeftOf, RestrictBc::Reflected) => {
                let ratio = self.down.du_left(x0) / self.up.du_left(x0);
                (CombPair::up(), CombPair { c_up: -ratio, c_dn: F::one() })
            }
        };
        let wv = wronskian_v(&down, &up);
        if !(wv > F::zero()) {
            return Err(CoreError::NotTransient { margin: wv.to_f64() });
        }
        Ok(RestrictedHarmonics { up, down, wronskian: wv, x0, side })
    }
}

/// Which side of the split point is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestrictSide {
    /// Keep `(lo, x0]`.
    LeftOf,
    /// Keep `[x0, hi)`.
    RightOf,
}

/// Boundary condition imposed at the split point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestrictBc {
    Killed,
    Reflected,
}

/// A linear combination `c_up·u↑ + c_dn·u↓` of the base pair.
///
/// Harmonic pairs of restricted or conditioned generators are combinations
/// of the base pair; this type evaluates them through a borrowed
/// [`HarmonicSystem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombPair<F> {
    pub c_up: F,
    pub c_dn: F,
}

impl<F: Real> CombPair<F> {
    /// The base `u↑`.
    pub fn up() -> Self {
        Self { c_up: F::one(), c_dn: F::zero() }
    }

    /// The base `u↓`.
    pub fn down() -> Self {
        Self { c_up: F::zero(), c_dn: F::one() }
    }

    pub fn eval(&self, hs: &HarmonicSystem<F>, x: F) -> F {
        self.c_up * hs.u_up(x) + self.c_dn * hs.u_down(x)
    }

    pub fn deriv_right(&self, hs: &HarmonicSystem<F>, x: F) -> F {
        self.c_up * hs.du_up_right(x) + self.c_dn * hs.du_down_right(x)
    }

    pub fn deriv_left(&self, hs: &HarmonicSystem<F>, x: F) -> F {
        self.c_up * hs.du_up_left(x) + self.c_dn * hs.du_down_left(x)
    }

    pub fn v_right(&self, hs: &HarmonicSystem<F>, x: F) -> F {
        self.c_up * hs.v_up_right(x) + self.c_dn * hs.v_down_right(x)
    }

    pub fn v_left(&self, hs: &HarmonicSystem<F>, x: F) -> F {
        self.c_up * hs.v_up_left(x) + self.c_dn * hs.v_down_left(x)
    }
}

/// `W_v(D, U)` of two combinations; the base pair satisfies `W_v = 1`, so
/// by bilinearity `W_v(D, U) = D.c_dn·U.c_up − D.c_up·U.c_dn`.
pub fn wronskian_v<F: Real>(down: &CombPair<F>, up: &CombPair<F>) -> F {
    down.c_dn * up.c_up - down.c_up * up.c_dn
}

/// Harmonic pair of a restricted generator, as combinations of the base
/// pair.  `green` already divides by the pair's Wronskian.
#[derive(Debug, Clone, Copy)]
pub struct RestrictedHarmonics<F> {
    pub up: CombPair<F>,
    pub down: CombPair<F>,
    /// `W_v(down, up)` of the combination pair.
    pub wronskian: F,
    pub x0: F,
    pub side: RestrictSide,
}

impl<F: Real> RestrictedHarmonics<F> {
    /// Green's function of the restricted generator (w.r.t. the speed
    /// measure), valid for `x, y` on the kept side of `x0`.
    pub fn green(&self, hs: &HarmonicSystem<F>, x: F, y: F) -> F {
        debug_assert!(match self.side {
            RestrictSide::RightOf => x >= self.x0 && y >= self.x0,
            RestrictSide::LeftOf => x <= self.x0 && y <= self.x0,
        });
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        self.up.eval(hs, lo) * self.down.eval(hs, hi) / self.wronskian
    }
}
