//! Interleaved point configurations and their covered segments.
//!
//! A configuration holds the kill points `Y`, the gap points `Z`, and the
//! closed segments swept out by the sampler.  The structural invariant —
//! checked by [`PointConfig::validate`] — is
//!
//! * `Y` and `Z` are strictly increasing and disjoint;
//! * every `z` lies strictly between two consecutive `y`'s, at most one per
//!   gap, and never outside `[min Y, max Y]` (so the extremes of `Y ∪ Z`
//!   are kill points);
//! * segments are disjoint, each contains exactly one kill point, and every
//!   kill point sits in a segment.
//!
//! A *complete* configuration additionally has exactly one `z` in every
//! `Y`-gap (`#Z = #Y − 1`); partially sampled configurations are allowed to
//! have empty gaps, never doubly-filled ones.

use loopsoup_core::{Boundary, Generator64};

use crate::{DppError, DppResult};

/// An interleaved point configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointConfig {
    y: Vec<f64>,
    z: Vec<f64>,
    segments: Vec<(f64, f64)>,
}

/// A maximal uncovered interval between segments (or between a segment and
/// the domain boundary).  `absorb_lo`/`absorb_hi` record whether a walk
/// reaching that end is absorbed there (segment endpoints and killed
/// boundaries absorb; natural boundaries and infinite ends do not).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
    pub absorb_lo: bool,
    pub absorb_hi: bool,
}

impl Gap {
    /// A gap between two absorbing ends.  Interior gaps shrink to a single
    /// gap point in the limit; one-sided gaps are swallowed by the extreme
    /// segments and carry no gap point.
    pub fn is_interior(&self) -> bool {
        self.absorb_lo && self.absorb_hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        !(self.hi > self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

impl PointConfig {
    /// The empty configuration.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build a configuration from bare points, giving every kill point a
    /// zero-length segment.  Points may arrive unsorted; the interleaving
    /// invariant is validated.
    pub fn from_points(mut y: Vec<f64>, mut z: Vec<f64>) -> DppResult<Self> {
        y.sort_by(f64::total_cmp);
        z.sort_by(f64::total_cmp);
        let segments = y.iter().map(|&p| (p, p)).collect();
        let cfg = Self { y, z, segments };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    /// `#Z` matches `#Y − 1` (every gap filled).
    pub fn is_complete(&self) -> bool {
        if self.y.is_empty() {
            self.z.is_empty()
        } else {
            self.z.len() + 1 == self.y.len()
        }
    }

    /// Check the interleaving invariant; see the module docs.
    pub fn validate(&self) -> DppResult<()> {
        let fail = |msg: String| Err(DppError::InvalidConfig(msg));
        for w in self.y.windows(2) {
            if !(w[0] < w[1]) {
                return fail(format!("kill points not strictly increasing at {}", w[1]));
            }
        }
        for w in self.z.windows(2) {
            if !(w[0] < w[1]) {
                return fail(format!("gap points not strictly increasing at {}", w[1]));
            }
        }
        for w in self.segments.windows(2) {
            if !(w[0].1 < w[1].0) {
                return fail(format!("segments overlap near {}", w[1].0));
            }
        }
        for &(a, b) in &self.segments {
            if !(a <= b) {
                return fail(format!("segment [{a}, {b}] reversed"));
            }
        }
        if self.segments.len() != self.y.len() {
            return fail(format!(
                "{} segments for {} kill points",
                self.segments.len(),
                self.y.len()
            ));
        }
        for (&y, &(a, b)) in self.y.iter().zip(&self.segments) {
            if !(a <= y && y <= b) {
                return fail(format!("kill point {y} outside its segment [{a}, {b}]"));
            }
        }
        // every z strictly inside a distinct Y-gap
        let mut last_gap = usize::MAX;
        for &z in &self.z {
            let i = self.y.partition_point(|&y| y < z);
            if i == 0 || i == self.y.len() {
                return fail(format!("gap point {z} outside the kill-point range"));
            }
            if self.y[i] == z {
                return fail(format!("gap point {z} coincides with a kill point"));
            }
            if i == last_gap {
                return fail(format!("two gap points between consecutive kill points at {z}"));
            }
            last_gap = i;
            if self.segments.iter().any(|&(a, b)| a <= z && z <= b) {
                return fail(format!("gap point {z} covered by a segment"));
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus completeness.
    pub fn validate_complete(&self) -> DppResult<()> {
        self.validate()?;
        if !self.is_complete() {
            return Err(DppError::InvalidConfig(format!(
                "incomplete configuration: {} kill points but {} gap points",
                self.y.len(),
                self.z.len()
            )));
        }
        Ok(())
    }

    /// The gap containing `x`, or `None` when `x` is covered by a segment
    /// (segment endpoints count as covered).
    pub fn gap_at(&self, gen: &Generator64, x: f64) -> Option<Gap> {
        self.gaps(gen).into_iter().find(|g| g.contains(x))
    }

    /// All nonempty gaps, left to right.
    pub fn gaps(&self, gen: &Generator64) -> Vec<Gap> {
        let absorb_lo = gen.lo_boundary == Boundary::Killed;
        let absorb_hi = gen.hi_boundary == Boundary::Killed;
        let mut gaps = Vec::with_capacity(self.segments.len() + 1);
        let mut cursor = (gen.lo, absorb_lo);
        for &(a, b) in &self.segments {
            gaps.push(Gap { lo: cursor.0, hi: a, absorb_lo: cursor.1, absorb_hi: true });
            cursor = (b, true);
        }
        gaps.push(Gap { lo: cursor.0, hi: gen.hi, absorb_lo: cursor.1, absorb_hi });
        gaps.retain(|g| !g.is_empty());
        gaps
    }

    /// Record a kill at `y` of a walk started at `x`: a new kill point
    /// whose segment is the swept interval between start and kill location
    /// (degenerate only when the walk died where it started).
    pub(crate) fn insert_kill(&mut self, y: f64, x: f64) {
        let i = self.y.partition_point(|&p| p < y);
        self.y.insert(i, y);
        let seg = (y.min(x), y.max(x));
        let j = self.segments.partition_point(|&(a, _)| a < seg.0);
        self.segments.insert(j, seg);
    }

    /// Record an attach: the walk started at `x` and was absorbed at
    /// `endpoint`, sweeping the interval between them.  Extends the segment
    /// that owns `endpoint`, or — when the endpoint is a killed boundary not
    /// yet visited — creates a boundary segment and a boundary kill point.
    /// Returns `true` if a new kill point was created.
    pub(crate) fn attach(&mut self, endpoint: f64, x: f64) -> bool {
        if x > endpoint {
            // swept [endpoint, x]; extend rightwards
            if let Some(seg) = self.segments.iter_mut().find(|s| s.1 == endpoint) {
                seg.1 = x;
                return false;
            }
            self.y.insert(0, endpoint);
            self.segments.insert(0, (endpoint, x));
        } else {
            if let Some(seg) = self.segments.iter_mut().find(|s| s.0 == endpoint) {
                seg.0 = x;
                return false;
            }
            self.y.push(endpoint);
            self.segments.push((x, endpoint));
        }
        true
    }

    /// Insert a gap point (used by the completion and resampling moves).
    pub(crate) fn insert_z(&mut self, z: f64) {
        let i = self.z.partition_point(|&p| p < z);
        self.z.insert(i, z);
    }

    pub(crate) fn set_z(&mut self, z: Vec<f64>) {
        self.z = z;
    }

    /// Force a kill point (with a zero-length segment) at a killed domain
    /// boundary if it is not already present.  In the limiting configuration
    /// killed boundaries are kill points with probability one, so the
    /// completion step pins them down.
    pub(crate) fn ensure_boundary_point(&mut self, at: f64) {
        if self.y.binary_search_by(|p| p.total_cmp(&at)).is_err() {
            self.insert_kill(at, at);
        }
    }
}
