//! Sampled field containers.

use crate::{require, OccupationResult};

/// A realisation of the occupation field on a finite grid.
///
/// `values[i]` is the field at `grid[i]`, in local-time units relative
/// to the measure `m(x) dx`. `interior_zero[i]` (length one less than
/// the grid) records whether the underlying continuous field vanished
/// strictly between `grid[i]` and `grid[i + 1]`: the sampler draws this
/// indicator from the exact bridge law of the squared Bessel
/// representation, so cluster statistics do not depend on literal
/// floating-point zeros ever being produced.
#[derive(Debug, Clone)]
pub struct OccupationField {
    grid: Vec<f64>,
    values: Vec<f64>,
    interior_zero: Vec<bool>,
}

impl OccupationField {
    /// Build a field from a grid and values, validating shape.
    ///
    /// `interior_zero` flags default to all-false; samplers that know
    /// the bridge law use [`OccupationField::with_interior_zeros`].
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> OccupationResult<Self> {
        let n = grid.len();
        let flags = vec![false; n.saturating_sub(1)];
        Self::with_interior_zeros(grid, values, flags)
    }

    /// Build a field with explicit interior-zero step flags.
    pub fn with_interior_zeros(
        grid: Vec<f64>,
        values: Vec<f64>,
        interior_zero: Vec<bool>,
    ) -> OccupationResult<Self> {
        require(!grid.is_empty(), || "field grid is empty".into())?;
        require(grid.len() == values.len(), || {
            format!("grid has {} points but values has {}", grid.len(), values.len())
        })?;
        require(interior_zero.len() == grid.len() - 1, || {
            format!(
                "expected {} interior-zero flags for {} grid points, got {}",
                grid.len() - 1,
                grid.len(),
                interior_zero.len()
            )
        })?;
        require(grid.windows(2).all(|w| w[0] < w[1]), || {
            "field grid must be strictly increasing".into()
        })?;
        require(grid.iter().all(|x| x.is_finite()), || "field grid must be finite".into())?;
        require(values.iter().all(|v| v.is_finite() && *v >= 0.0), || {
            "field values must be finite and nonnegative".into()
        })?;
        Ok(Self { grid, values, interior_zero })
    }

    /// Grid points, strictly increasing.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Field values aligned with [`OccupationField::grid`].
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Per-step indicators: `true` when the continuous field hit zero
    /// strictly inside `(grid[i], grid[i + 1])`.
    pub fn interior_zero(&self) -> &[bool] {
        &self.interior_zero
    }

    /// Largest jump between consecutive grid values — a cheap modulus
    /// diagnostic for grid adequacy (the continuous field is Hölder;
    /// a coarse grid shows as large jumps relative to the field scale).
    pub fn max_step_jump(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }
}

/// A realisation of the Gaussian free field on a finite grid.
///
/// The field is centred Gaussian with covariance `G(x, y)`; at loop
/// intensity `alpha = 1/2` the occupation field has the law of
/// `phi^2 / 2`.
#[derive(Debug, Clone)]
pub struct GffSample {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl GffSample {
    pub(crate) fn from_parts(grid: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    /// Grid points, strictly increasing.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Gaussian field values aligned with [`GffSample::grid`].
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The pointwise image `phi^2 / 2`: an occupation-field realisation
    /// at intensity `1/2`, for marginal and covariance comparisons.
    /// Interior-zero flags are left unset; use [`crate::sample_field`]
    /// when cluster statistics are needed.
    pub fn squared_half(&self) -> OccupationResult<OccupationField> {
        let values = self.values.iter().map(|p| 0.5 * p * p).collect();
        OccupationField::new(self.grid.clone(), values)
    }
}
