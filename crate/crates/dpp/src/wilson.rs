//! The random-walk construction of the interleaved configuration.
//!
//! One step: run the diffusion from a start point `x` inside an uncovered
//! gap `(a, b)`, absorbing it at the gap ends and killing it at rate `κ`.
//! Exactly one of three things happens, with closed-form probabilities
//! computed from the harmonic pair of the diffusion restricted to the gap:
//!
//! * absorbed at `a`:  probability `u↓(x)/u↓(a)` — the swept interval
//!   `[a, x]` is glued onto the left neighbour;
//! * absorbed at `b`:  probability `u↑(x)/u↑(b)` — `[x, b]` is glued onto
//!   the right neighbour;
//! * killed at `y ∈ (a, b)`:  density `G_{(a,b)}(x, y) m(y) κ(dy)` — `y`
//!   becomes a new kill point whose segment is the swept interval
//!   `[x ∧ y, x ∨ y]`.
//!
//! In every case the covered interval runs from the start to the point
//! where the run *ended* — never the walk's running extremes (excursions
//! beyond the endpoints stay uncovered; that is what leaves room for the
//! gap points), and never less (a kill that covered nothing would leave
//! the killing measure between start and kill location free to kill
//! again, inflating the point counts).
//!
//! The scale function diverges at infinity for every representable `w`, so
//! no mass escapes: the three probabilities sum to one, and the sampler
//! verifies that identity at every step (a strong running self-check of the
//! harmonic pair, the quadrature, and the gap bookkeeping).
//!
//! Iterating over a sequence of starts that is dense in the killing
//! support, the configuration converges: kill points appear with the exact
//! determinantal law, and every gap between consecutive segments shrinks to
//! the single gap point it contains.  [`wilson_sample`] drives the
//! iteration, stops once the gaps that still carry killing mass are shorter
//! than `δ_gap` (and every atom is resolved), and then *completes* the
//! configuration: killing-free gaps are finished exactly — by the strong
//! Markov property the remaining sub-run on such a gap is the killing-free
//! construction, whose gap point is scale-uniform — so the only
//! approximation left is the reported residual killing mass.

use loopsoup_core::{harmonic_pair, Boundary, Generator64, GeneratorSpec, Harmonic64, Measure64};
use rand::Rng;

use crate::points::{Gap, PointConfig};
use crate::sampling::{sample_w_uniform, WeightedKappa};
use crate::{DppError, DppResult};

/// Tolerance for the partition-of-unity self-check `p_a + p_b + ∫G m κ = 1`.
const PARTITION_TOL: f64 = 1e-6;

/// What a single step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    /// The start was covered (or the gap degenerate); nothing changed.
    NoOp,
    /// The walk was absorbed at a gap end and the swept interval glued on.
    /// `new_kill_point` is set when the end was a killed domain boundary
    /// visited for the first time (the boundary becomes a kill point).
    Attached { endpoint: f64, new_kill_point: bool },
    /// The walk died inside the gap; `y` is the new kill point.
    Killed { y: f64 },
}

/// The closed-form law of one step from `start` inside `gap`.
pub struct GapLaw<'a> {
    pub gap: Gap,
    pub start: f64,
    /// Probability of absorption at `gap.lo` (zero on non-absorbing ends).
    pub p_left: f64,
    /// Probability of absorption at `gap.hi`.
    pub p_right: f64,
    /// Total mass of the kill law `G_gap(start, ·) m κ` on the open gap.
    pub kill_mass: f64,
    sys: SysRef<'a>,
    weighted: WeightedKappa,
}

enum SysRef<'a> {
    Borrowed(&'a Harmonic64),
    Owned(Box<Harmonic64>),
}

impl SysRef<'_> {
    fn get(&self) -> &Harmonic64 {
        match self {
            SysRef::Borrowed(h) => h,
            SysRef::Owned(h) => h,
        }
    }
}

/// The diffusion restricted to a gap: segment ends and killed boundaries
/// become killed (Dirichlet) endpoints, everything else is inherited.
/// Killing atoms exactly at an absorbing end are dropped — an absorbed walk
/// accrues no local time there.
fn gap_generator(gen: &Generator64, gap: &Gap) -> DppResult<Generator64> {
    let lo_b = if gap.absorb_lo { Boundary::Killed } else { gen.lo_boundary };
    let hi_b = if gap.absorb_hi { Boundary::Killed } else { gen.hi_boundary };
    let kappa = restrict_open(&gen.kappa, gap.lo, gap.hi);
    Ok(GeneratorSpec::new(
        gap.lo,
        gap.hi,
        lo_b,
        hi_b,
        gen.m.clone(),
        gen.w.clone(),
        kappa,
    )?)
}

/// `κ` restricted to the *open* interval `(lo, hi)`.
fn restrict_open(kappa: &Measure64, lo: f64, hi: f64) -> Measure64 {
    let clipped = kappa.restrict(lo, hi);
    let atoms = clipped
        .atoms()
        .iter()
        .copied()
        .filter(|&(x, _)| x != lo && x != hi)
        .collect();
    Measure64::new(atoms, clipped.pieces().to_vec())
        .expect("restriction of a valid measure is valid")
}

impl<'a> GapLaw<'a> {
    /// Build the step law.  `hs` is the harmonic pair of the *full*
    /// generator; it is reused when the gap is the whole interval, which is
    /// the common case for the first step.
    pub fn new(
        gen: &Generator64,
        hs: &'a Harmonic64,
        gap: Gap,
        start: f64,
    ) -> DppResult<Self> {
        if !gap.contains(start) {
            return Err(DppError::Precondition(format!(
                "start {start} not inside the gap ({}, {})",
                gap.lo, gap.hi
            )));
        }
        let whole = gap.lo == gen.lo && gap.hi == gen.hi;
        let (sys, kappa) = if whole {
            (
                SysRef::Borrowed(hs),
                restrict_open(&gen.kappa, gap.lo, gap.hi),
            )
        } else {
            let ggen = gap_generator(gen, &gap)?;
            let kappa = ggen.kappa.clone();
            (SysRef::Owned(Box::new(harmonic_pair(&ggen)?)), kappa)
        };

        let s = sys.get();
        let mut splits = vec![start];
        splits.extend(gen.m.breakpoints());
        splits.extend(gen.w.breakpoints());
        let weighted =
            WeightedKappa::new(&kappa, gap.lo, gap.hi, &splits, |y| s.green(start, y) * s.m_at(y));

        let p_left = if gap.absorb_lo { s.u_down(start) / s.u_down(gap.lo) } else { 0.0 };
        let p_right = if gap.absorb_hi { s.u_up(start) / s.u_up(gap.hi) } else { 0.0 };
        let kill_mass = weighted.total();

        let total = p_left + p_right + kill_mass;
        if !((total - 1.0).abs() < PARTITION_TOL) {
            return Err(DppError::MassMismatch {
                context: "wilson step partition of unity",
                mass: total,
                expected: 1.0,
            });
        }
        Ok(Self { gap, start, p_left, p_right, kill_mass, sys, weighted })
    }

    /// Invert the kill-location CDF at `u ∈ [0, 1)` (conditioned on the
    /// kill branch).
    pub fn sample_kill(&self, u: f64) -> f64 {
        let s = self.sys.get();
        let start = self.start;
        self.weighted
            .sample(u * self.kill_mass, |y| s.green(start, y) * s.m_at(y))
    }

    /// Draw one outcome (probabilities renormalized by their sum, which the
    /// constructor pinned to `1 ± 1e-6`).
    pub fn sample_outcome<R: Rng + ?Sized>(&self, rng: &mut R) -> RawOutcome {
        let total = self.p_left + self.p_right + self.kill_mass;
        let u = rng.gen::<f64>() * total;
        if u < self.p_left {
            RawOutcome::Left
        } else if u < self.p_left + self.p_right {
            RawOutcome::Right
        } else {
            let t = ((u - self.p_left - self.p_right) / self.kill_mass).clamp(0.0, 1.0 - 1e-16);
            RawOutcome::Kill(self.sample_kill(t))
        }
    }
}

/// Branch drawn from a [`GapLaw`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RawOutcome {
    Left,
    Right,
    Kill(f64),
}

/// One step of the construction from `start`.  Ties (a start on a covered
/// point or a segment endpoint) and degenerate gaps are no-ops.
pub fn wilson_step<R: Rng + ?Sized>(
    cfg: &mut PointConfig,
    gen: &Generator64,
    hs: &Harmonic64,
    start: f64,
    rng: &mut R,
) -> DppResult<StepOutcome> {
    if !gen.contains(start) {
        return Err(DppError::Precondition(format!(
            "start {start} outside the interval [{}, {}]",
            gen.lo, gen.hi
        )));
    }
    let Some(gap) = cfg.gap_at(gen, start) else {
        return Ok(StepOutcome::NoOp);
    };
    if gap.len() <= 1e-12 * (1.0 + start.abs()) {
        return Ok(StepOutcome::NoOp);
    }
    let law = GapLaw::new(gen, hs, gap, start)?;
    let outcome = match law.sample_outcome(rng) {
        RawOutcome::Left => {
            let new_y = cfg.attach(gap.lo, start);
            StepOutcome::Attached { endpoint: gap.lo, new_kill_point: new_y }
        }
        RawOutcome::Right => {
            let new_y = cfg.attach(gap.hi, start);
            StepOutcome::Attached { endpoint: gap.hi, new_kill_point: new_y }
        }
        RawOutcome::Kill(y) => {
            cfg.insert_kill(y, start);
            StepOutcome::Killed { y }
        }
    };
    debug_assert!(cfg.validate().is_ok());
    Ok(outcome)
}

/// Diagnostics of a [`wilson_sample`] run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonReport {
    /// Steps attempted (including no-ops).
    pub steps: usize,
    pub noops: usize,
    pub kills: usize,
    pub attaches: usize,
    /// The stopping rule fired (rather than the step budget running out).
    pub converged: bool,
    /// Total length of gaps still carrying killing mass (outer gaps
    /// clipped to the killing hull).
    pub residual_gap_length: f64,
    /// Killing mass left in uncovered gaps.  The completion step is exact
    /// except on this mass, so it bounds the bias of the returned
    /// configuration.
    pub residual_kappa_mass: f64,
}

/// Run the construction over `starts` (at most `n_steps` of them), stop
/// when every gap that still carries killing mass is shorter than
/// `delta_gap` (default: `1e-4` of the killing hull) and every atom is
/// resolved, then complete the configuration: killed boundaries are pinned
/// as kill points and each interior gap receives its scale-uniform gap
/// point.
pub fn wilson_sample<I, R>(
    gen: &Generator64,
    starts: I,
    n_steps: usize,
    delta_gap: Option<f64>,
    rng: &mut R,
) -> DppResult<(PointConfig, WilsonReport)>
where
    I: IntoIterator<Item = f64>,
    R: Rng + ?Sized,
{
    let hs = harmonic_pair(gen)?;
    let hull = killing_hull(gen);
    let delta = delta_gap.unwrap_or(1e-4 * (hull.1 - hull.0).max(1e-9));

    let mut cfg = PointConfig::empty();
    let mut report = WilsonReport {
        steps: 0,
        noops: 0,
        kills: 0,
        attaches: 0,
        converged: false,
        residual_gap_length: 0.0,
        residual_kappa_mass: 0.0,
    };

    for start in starts.into_iter().take(n_steps) {
        let out = wilson_step(&mut cfg, gen, &hs, start, rng)?;
        report.steps += 1;
        match out {
            StepOutcome::NoOp => report.noops += 1,
            StepOutcome::Attached { .. } => report.attaches += 1,
            StepOutcome::Killed { .. } => report.kills += 1,
        }
        if out != StepOutcome::NoOp {
            let (len, _, atoms_ok) = residual(gen, &cfg, hull);
            if len < delta && atoms_ok {
                report.converged = true;
                break;
            }
        }
    }
    let (len, mass, atoms_ok) = residual(gen, &cfg, hull);
    report.residual_gap_length = len;
    report.residual_kappa_mass = mass;
    report.converged = len < delta && atoms_ok;

    complete_in_place(&mut cfg, gen, rng);
    cfg.validate_complete()?;
    Ok((cfg, report))
}

/// Adaptive variant of [`wilson_sample`].  A fixed dense start sequence
/// wastes almost every entry once the configuration fills in (a start on
/// covered ground is a no-op), so reaching a residual of `δ` costs `O(1/δ)`
/// scans.  Here each step instead starts at the midpoint of the longest gap
/// still carrying killing mass.  The one-step law is the exact conditional
/// law of the construction given the current configuration *whatever*
/// interior point the walk starts from, so any measurable scheduling —
/// including this greedy one — leaves the limiting law unchanged; the
/// greedy choice just reaches the stopping rule in `O(log 1/δ)` steps per
/// gap.  (The invariant is easy to check by hand on a killing-free gap:
/// `P(gap point > t)` is a martingale under a step from *any* start.)
pub fn wilson_sample_adaptive<R: Rng + ?Sized>(
    gen: &Generator64,
    n_steps: usize,
    delta_gap: Option<f64>,
    rng: &mut R,
) -> DppResult<(PointConfig, WilsonReport)> {
    let hs = harmonic_pair(gen)?;
    let hull = killing_hull(gen);
    let delta = delta_gap.unwrap_or(1e-4 * (hull.1 - hull.0).max(1e-9));

    let mut cfg = PointConfig::empty();
    let mut report = WilsonReport {
        steps: 0,
        noops: 0,
        kills: 0,
        attaches: 0,
        converged: false,
        residual_gap_length: 0.0,
        residual_kappa_mass: 0.0,
    };

    while report.steps < n_steps {
        let Some(start) = next_uncovered_start(gen, &cfg, hull) else {
            break; // no gap carries killing mass any more
        };
        let out = wilson_step(&mut cfg, gen, &hs, start, rng)?;
        report.steps += 1;
        match out {
            StepOutcome::NoOp => {
                // the chosen gap is degenerate; no further progress possible
                report.noops += 1;
                break;
            }
            StepOutcome::Attached { .. } => report.attaches += 1,
            StepOutcome::Killed { .. } => report.kills += 1,
        }
        let (len, _, atoms_ok) = residual(gen, &cfg, hull);
        if len < delta && atoms_ok {
            break;
        }
    }
    let (len, mass, atoms_ok) = residual(gen, &cfg, hull);
    report.residual_gap_length = len;
    report.residual_kappa_mass = mass;
    report.converged = len < delta && atoms_ok;

    complete_in_place(&mut cfg, gen, rng);
    cfg.validate_complete()?;
    Ok((cfg, report))
}

/// Start targeting the longest gap that still carries killing mass;
/// `None` once no gap does.
///
/// Interior gaps (both ends absorbing) are halved from the midpoint: the
/// walk sweeps whichever side it is absorbed on, so every point — edge
/// atoms included — is covered geometrically fast.  An outer gap is only
/// ever swept on its absorbing side, so a start inside the killing support
/// can never cover the support's outer edge; the start is therefore placed
/// just *beyond* the support, and a single attach then sweeps all of it.
fn next_uncovered_start(gen: &Generator64, cfg: &PointConfig, hull: (f64, f64)) -> Option<f64> {
    let pad = 0.1 * (hull.1 - hull.0).max(1e-6);
    let mut best: Option<(f64, f64)> = None;
    for gap in cfg.gaps(gen) {
        if open_abs_mass(&gen.kappa, gap.lo, gap.hi) <= 0.0 {
            continue;
        }
        let Some((s_lo, s_hi)) = restrict_open(&gen.kappa, gap.lo, gap.hi).support_bounds()
        else {
            continue;
        };
        let primary = if !gap.absorb_lo && !gap.absorb_hi {
            // no absorbing end: the kill branch is certain from anywhere
            0.5 * (s_lo + s_hi)
        } else if !gap.absorb_lo {
            s_lo - pad
        } else if !gap.absorb_hi {
            s_hi + pad
        } else {
            0.5 * (gap.lo + gap.hi)
        };
        // beyond-the-support starts can fall outside a finite gap (e.g. a
        // killing atom at a natural boundary, which only a kill resolves);
        // fall back to halving in that case
        let Some(start) = [primary, 0.5 * (gap.lo.max(hull.0) + gap.hi.min(hull.1))]
            .into_iter()
            .find(|&x| gap.contains(x))
        else {
            continue;
        };
        let len = gap.hi.min(hull.1) - gap.lo.max(hull.0);
        if best.map_or(true, |(l, _)| len > l) {
            best = Some((len, start));
        }
    }
    best.map(|(_, start)| start)
}

/// The base-2 van der Corput sequence mapped onto `(a, b)`: a deterministic
/// start sequence that is dense in the window and equidistributes fast.
pub fn van_der_corput(a: f64, b: f64) -> impl Iterator<Item = f64> {
    (1u64..).map(move |k| {
        let mut n = k;
        let mut denom = 1.0;
        let mut v = 0.0;
        while n > 0 {
            denom *= 2.0;
            v += (n & 1) as f64 / denom;
            n >>= 1;
        }
        a + (b - a) * v
    })
}

/// Default start window: the killing hull (killing support plus killed
/// boundaries) padded by 10% on each side, clamped to the interval.  The
/// padding matters: the construction sweeps only *between* start and
/// absorption point, so a killing atom at the very edge of the hull is
/// covered only by walks started beyond it.
pub fn start_window(gen: &Generator64) -> (f64, f64) {
    let (lo, hi) = killing_hull(gen);
    let pad = (0.1 * (hi - lo)).max(0.5);
    ((lo - pad).max(gen.lo), (hi + pad).min(gen.hi))
}

/// Hull of the killing support and the killed boundaries.
fn killing_hull(gen: &Generator64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    if let Some((a, b)) = gen.kappa.support_bounds() {
        lo = a;
        hi = b;
    }
    if gen.lo_boundary == Boundary::Killed {
        lo = lo.min(gen.lo);
        hi = hi.max(gen.lo);
    }
    if gen.hi_boundary == Boundary::Killed {
        lo = lo.min(gen.hi);
        hi = hi.max(gen.hi);
    }
    if lo > hi {
        // no killing at all: not transient, harmonic_pair already refused
        (gen.lo.max(-1.0), gen.hi.min(1.0))
    } else {
        (lo, hi)
    }
}

/// Residual diagnostics: total length of κ-carrying gaps (outer gaps
/// clipped to the hull), their killing mass, and whether every atom is
/// covered or pinned at a killed boundary.
fn residual(gen: &Generator64, cfg: &PointConfig, hull: (f64, f64)) -> (f64, f64, bool) {
    let mut len = 0.0;
    let mut mass = 0.0;
    for gap in cfg.gaps(gen) {
        let m = open_abs_mass(&gen.kappa, gap.lo, gap.hi);
        if m <= 0.0 {
            continue;
        }
        mass += m;
        if gap.is_interior() {
            len += gap.len();
        } else {
            len += (gap.hi.min(hull.1) - gap.lo.max(hull.0)).max(0.0);
        }
    }
    let mut atoms_ok = true;
    for &(x, _) in gen.kappa.atoms() {
        let covered = cfg.segments().iter().any(|&(a, b)| a <= x && x <= b)
            || (gen.lo_boundary == Boundary::Killed && x == gen.lo)
            || (gen.hi_boundary == Boundary::Killed && x == gen.hi);
        if !covered {
            atoms_ok = false;
        }
    }
    (len, mass, atoms_ok)
}

fn open_abs_mass(kappa: &Measure64, lo: f64, hi: f64) -> f64 {
    let mut m = kappa.abs_mass_in(lo, hi);
    if lo.is_finite() {
        m -= kappa.atom_at(lo).abs();
    }
    if hi.is_finite() {
        m -= kappa.atom_at(hi).abs();
    }
    m.max(0.0)
}

/// Pin killed boundaries as kill points and give every interior gap its
/// scale-uniform gap point.
fn complete_in_place<R: Rng + ?Sized>(cfg: &mut PointConfig, gen: &Generator64, rng: &mut R) {
    if gen.lo_boundary == Boundary::Killed {
        cfg.ensure_boundary_point(gen.lo);
    }
    if gen.hi_boundary == Boundary::Killed {
        cfg.ensure_boundary_point(gen.hi);
    }
    let mut fresh = Vec::new();
    for gap in cfg.gaps(gen) {
        if gap.is_interior() && !cfg.z().iter().any(|&z| gap.contains(z)) {
            fresh.push(sample_w_uniform(gen, gap.lo, gap.hi, rng.gen::<f64>()));
        }
    }
    for z in fresh {
        cfg.insert_z(z);
    }
}
