//! Cluster extraction from a sampled occupation field.

use crate::field::OccupationField;

/// Maximal intervals on which the field is positive, at grid
/// resolution.
///
/// A cluster boundary is any grid point with value exactly zero, or
/// any grid step whose interior-zero indicator is set (the sampler
/// draws those from the exact bridge law, since exact transitions
/// almost surely never produce literal zeros at grid points). Each
/// maximal run of positive values not interrupted by an interior zero
/// is reported as the interval from its first to its last grid point;
/// a run consisting of a single grid point yields a degenerate
/// zero-length interval.
///
/// For intensity `alpha >= 1` the field stays positive, so a sampled
/// field reports a single cluster spanning the grid; for `alpha < 1`
/// the field vanishes infinitely often and the reported count grows as
/// the grid refines. Cluster extents are grid-resolution statistics:
/// the true cluster containing a run extends past its outermost grid
/// points by less than one grid step on each side.
pub fn clusters(field: &OccupationField) -> Vec<(f64, f64)> {
    let grid = field.grid();
    let values = field.values();
    let cuts = field.interior_zero();
    let mut out = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..grid.len() {
        if values[i] > 0.0 {
            if run_start.is_none() {
                run_start = Some(i);
            }
            let step_cut = i + 1 < grid.len() && cuts[i];
            let value_cut = i + 1 >= grid.len() || values[i + 1] == 0.0;
            if step_cut || value_cut {
                let s = run_start.take().expect("open run");
                out.push((grid[s], grid[i]));
            }
        } else {
            debug_assert!(run_start.is_none(), "runs close on zero values");
        }
    }
    out
}
