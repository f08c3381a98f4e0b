//! Signed Radon measures on the line: atoms plus a piecewise-linear density.
//!
//! The solver convention is killing-positive: a positive atom of `κ` kills,
//! a negative atom creates mass.  Plain diffusion inputs are validated to be
//! nonnegative ([`RadonMeasure::checked_positive`]); signed measures appear
//! through perturbations `κ − ν̃`.

use crate::error::{CoreError, CoreResult};
use crate::quad;
use crate::Real;

/// One density piece: value `c + slope·(x − x_lo)` on `[x_lo, x_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPiece<F> {
    pub x_lo: F,
    pub x_hi: F,
    pub c: F,
    pub slope: F,
}

impl<F: Real> DensityPiece<F> {
    /// Density value at `x` (no range check).
    #[inline]
    pub fn value(&self, x: F) -> F {
        self.c + self.slope * (x - self.x_lo)
    }

    /// Exact integral of the density over `[a, b] ∩ [x_lo, x_hi]`.
    pub fn integral(&self, a: F, b: F) -> F {
        let lo = a.max(self.x_lo);
        let hi = b.min(self.x_hi);
        if hi <= lo {
            return F::zero();
        }
        // trapezoid is exact for a linear density
        let half = F::of(0.5);
        (self.value(lo) + self.value(hi)) * (hi - lo) * half
    }
}

/// A signed measure with finitely many atoms and a compactly supported
/// piecewise-linear density.
///
/// Invariants after construction: atoms sorted by position with distinct
/// positions and nonzero masses; pieces sorted, non-overlapping, of positive
/// length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadonMeasure<F> {
    atoms: Vec<(F, F)>,
    pieces: Vec<DensityPiece<F>>,
}

impl<F: Real> RadonMeasure<F> {
    /// The zero measure.
    pub fn zero() -> Self {
        Self { atoms: Vec::new(), pieces: Vec::new() }
    }

    /// Build from raw atoms `(position, mass)` and density pieces.
    /// Overlapping pieces are summed; atoms at equal positions are merged.
    pub fn new(atoms: Vec<(F, F)>, pieces: Vec<DensityPiece<F>>) -> CoreResult<Self> {
        for p in &pieces {
            if !(p.x_hi > p.x_lo) || !p.x_lo.is_finite() || !p.x_hi.is_finite() {
                return Err(CoreError::InvalidMeasure(format!(
                    "density piece with bad range [{}, {}]",
                    p.x_lo, p.x_hi
                )));
            }
            if !p.c.is_finite() || !p.slope.is_finite() {
                return Err(CoreError::InvalidMeasure("non-finite density coefficients".into()));
            }
        }
        for &(x, m) in &atoms {
            if !x.is_finite() || !m.is_finite() {
                return Err(CoreError::InvalidMeasure("non-finite atom".into()));
            }
        }
        Ok(Self { atoms: normalize_atoms(atoms), pieces: normalize_pieces(pieces) })
    }

    /// Atoms only.
    pub fn from_atoms(atoms: Vec<(F, F)>) -> CoreResult<Self> {
        Self::new(atoms, Vec::new())
    }

    /// A single constant density `c` on `[a, b]`.
    pub fn uniform(a: F, b: F, c: F) -> CoreResult<Self> {
        Self::new(Vec::new(), vec![DensityPiece { x_lo: a, x_hi: b, c, slope: F::zero() }])
    }

    /// Sorted atoms `(position, mass)`.
    pub fn atoms(&self) -> &[(F, F)] {
        &self.atoms
    }

    /// Sorted non-overlapping density pieces.
    pub fn pieces(&self) -> &[DensityPiece<F>] {
        &self.pieces
    }

    /// True if the measure is identically zero.
    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.pieces.is_empty()
    }

    /// Error unless every atom mass and every density value is nonnegative.
    pub fn checked_positive(self) -> CoreResult<Self> {
        for &(x, m) in &self.atoms {
            if m < F::zero() {
                return Err(CoreError::InvalidMeasure(format!("negative atom at {x}")));
            }
        }
        for p in &self.pieces {
            if p.value(p.x_lo) < F::zero() || p.value(p.x_hi) < F::zero() {
                return Err(CoreError::InvalidMeasure(format!(
                    "density negative on [{}, {}]",
                    p.x_lo, p.x_hi
                )));
            }
        }
        Ok(self)
    }

    /// Hull of the support, `None` for the zero measure.
    pub fn support_bounds(&self) -> Option<(F, F)> {
        let mut lo = F::infinity();
        let mut hi = F::neg_infinity();
        for &(x, _) in &self.atoms {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        for p in &self.pieces {
            lo = lo.min(p.x_lo);
            hi = hi.max(p.x_hi);
        }
        if lo <= hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Atom mass at `x` (zero if there is no atom there).
    pub fn atom_at(&self, x: F) -> F {
        match self.atoms.binary_search_by(|&(a, _)| a.partial_cmp(&x).unwrap()) {
            Ok(i) => self.atoms[i].1,
            Err(_) => F::zero(),
        }
    }

    /// Density value at `x` (pieces are right-open).
    pub fn density_at(&self, x: F) -> F {
        for p in &self.pieces {
            if p.x_lo <= x && x < p.x_hi {
                return p.value(x);
            }
        }
        F::zero()
    }

    /// Signed mass of `[a, b]` (atoms at the endpoints included).
    pub fn mass_in(&self, a: F, b: F) -> F {
        let mut s = F::zero();
        for &(x, m) in &self.atoms {
            if a <= x && x <= b {
                s = s + m;
            }
        }
        for p in &self.pieces {
            s = s + p.integral(a, b);
        }
        s
    }

    /// Total signed mass.
    pub fn total_mass(&self) -> F {
        self.mass_in(F::neg_infinity(), F::infinity())
    }

    /// Total variation mass of `[a, b]`.
    pub fn abs_mass_in(&self, a: F, b: F) -> F {
        let mut s = F::zero();
        for &(x, m) in &self.atoms {
            if a <= x && x <= b {
                s = s + m.abs();
            }
        }
        for p in &self.pieces {
            // split at an interior sign change of the linear density
            let lo = a.max(p.x_lo);
            let hi = b.min(p.x_hi);
            if hi <= lo {
                continue;
            }
            let vlo = p.value(lo);
            let vhi = p.value(hi);
            if vlo * vhi >= F::zero() {
                s = s + p.integral(lo, hi).abs();
            } else {
                let root = lo + (hi - lo) * (vlo / (vlo - vhi));
                s = s + p.integral(lo, root).abs() + p.integral(root, hi).abs();
            }
        }
        s
    }

    /// `∫ |x| d|κ|(x)`, the first absolute moment of the total variation.
    pub fn first_abs_moment(&self) -> F {
        let mut s = F::zero();
        for &(x, m) in &self.atoms {
            s = s + x.abs() * m.abs();
        }
        for p in &self.pieces {
            s = s + quad::adaptive_simpson(
                |x: F| x.abs() * p.value(x).abs(),
                p.x_lo,
                p.x_hi,
                F::of(1e-12),
            );
        }
        s
    }

    /// Restriction to `[a, b]` (atoms on the boundary kept).
    pub fn restrict(&self, a: F, b: F) -> Self {
        let atoms = self
            .atoms
            .iter()
            .copied()
            .filter(|&(x, _)| a <= x && x <= b)
            .collect();
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let lo = a.max(p.x_lo);
            let hi = b.min(p.x_hi);
            if hi > lo {
                pieces.push(DensityPiece { x_lo: lo, x_hi: hi, c: p.value(lo), slope: p.slope });
            }
        }
        Self { atoms, pieces }
    }

    /// The measure scaled by `factor`.
    pub fn scaled(&self, factor: F) -> Self {
        if factor == F::zero() {
            return Self::zero();
        }
        Self {
            atoms: self.atoms.iter().map(|&(x, m)| (x, m * factor)).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| DensityPiece { c: p.c * factor, slope: p.slope * factor, ..*p })
                .collect(),
        }
    }

    /// Sum of two measures (atoms merged, overlapping densities summed).
    pub fn plus(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        let mut pieces = self.pieces.clone();
        pieces.extend_from_slice(&other.pieces);
        Self { atoms: normalize_atoms(atoms), pieces: normalize_pieces(pieces) }
    }

    /// `self − other`.
    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(-F::one()))
    }

    /// All structural breakpoints: atom positions and piece endpoints.
    pub fn breakpoints(&self) -> Vec<F> {
        let mut xs: Vec<F> = self.atoms.iter().map(|&(x, _)| x).collect();
        for p in &self.pieces {
            xs.push(p.x_lo);
            xs.push(p.x_hi);
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        xs
    }

    /// `∫ f dκ` with atoms summed exactly and density pieces integrated by
    /// adaptive Simpson quadrature to absolute tolerance `tol` per piece.
    pub fn integrate<G: Fn(F) -> F>(&self, f: G, tol: F) -> F {
        let mut s = F::zero();
        for &(x, m) in &self.atoms {
            s = s + f(x) * m;
        }
        for p in &self.pieces {
            s = s + quad::adaptive_simpson(|x: F| f(x) * p.value(x), p.x_lo, p.x_hi, tol);
        }
        s
    }
}

fn normalize_atoms<F: Real>(mut atoms: Vec<(F, F)>) -> Vec<(F, F)> {
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(F, F)> = Vec::with_capacity(atoms.len());
    for (x, m) in atoms {
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 = last.1 + m,
            _ => out.push((x, m)),
        }
    }
    out.retain(|&(_, m)| m != F::zero());
    out
}

/// Flatten possibly-overlapping pieces into sorted disjoint ones by summing.
fn normalize_pieces<F: Real>(pieces: Vec<DensityPiece<F>>) -> Vec<DensityPiece<F>> {
    if pieces.is_empty() {
        return pieces;
    }
    let mut cuts: Vec<F> = Vec::with_capacity(2 * pieces.len());
    for p in &pieces {
        cuts.push(p.x_lo);
        cuts.push(p.x_hi);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut out = Vec::new();
    for win in cuts.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let mut c = F::zero();
        let mut slope = F::zero();
        for p in &pieces {
            if p.x_lo <= lo && hi <= p.x_hi {
                c = c + p.value(lo);
                slope = slope + p.slope;
            }
        }
        if c != F::zero() || slope != F::zero() {
            out.push(DensityPiece { x_lo: lo, x_hi: hi, c, slope });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_merge_and_sort() {
        let m = RadonMeasure::<f64>::from_atoms(vec![(1.0, 0.5), (-1.0, 1.0), (1.0, 0.25)]).unwrap();
        assert_eq!(m.atoms(), &[(-1.0, 1.0), (1.0, 0.75)]);
        assert_eq!(m.atom_at(1.0), 0.75);
        assert_eq!(m.atom_at(0.0), 0.0);
    }

    #[test]
    fn overlapping_pieces_sum() {
        let m = RadonMeasure::new(
            vec![],
            vec![
                DensityPiece { x_lo: 0.0f64, x_hi: 2.0, c: 1.0, slope: 0.0 },
                DensityPiece { x_lo: 1.0, x_hi: 3.0, c: 2.0, slope: 1.0 },
            ],
        )
        .unwrap();
        assert_eq!(m.pieces().len(), 3);
        assert_eq!(m.density_at(0.5), 1.0);
        assert_eq!(m.density_at(1.5), 1.0 + 2.0 + 0.5);
        assert_eq!(m.density_at(2.5), 2.0 + 1.5);
        // total mass: ∫0..2 1 + ∫1..3 (2 + (x-1))
        let exact = 2.0 + (2.0 * 2.0 + 2.0);
        assert!((m.total_mass() - exact).abs() < 1e-12);
    }

    #[test]
    fn restrict_splits_pieces() {
        let m = RadonMeasure::new(
            vec![(0.0f64, 1.0), (5.0, 1.0)],
            vec![DensityPiece { x_lo: 1.0, x_hi: 4.0, c: 0.0, slope: 1.0 }],
        )
        .unwrap();
        let r = m.restrict(2.0, 5.0);
        assert_eq!(r.atoms(), &[(5.0, 1.0)]);
        assert_eq!(r.pieces().len(), 1);
        assert_eq!(r.pieces()[0].x_lo, 2.0);
        assert_eq!(r.pieces()[0].value(2.0), 1.0); // 0 + 1·(2-1)
        assert!((r.mass_in(2.0, 4.0) - (1.0 + 3.0) * 0.5 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn signed_difference_and_abs_mass() {
        let a = RadonMeasure::<f64>::uniform(0.0, 1.0, 2.0).unwrap();
        let b = RadonMeasure::<f64>::uniform(0.0, 1.0, 1.0).unwrap();
        let d = a.minus(&b);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        let e = b.minus(&a);
        assert!((e.total_mass() + 1.0).abs() < 1e-12);
        assert!((e.abs_mass_in(f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-12);
    }
}
