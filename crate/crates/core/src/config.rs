//! JSON description of a generator.
//!
//! ```json
//! {
//!   "interval": ["-inf", "+inf"],
//!   "boundary": ["natural", "natural"],
//!   "m": 1.0,
//!   "w": 2.0,
//!   "kappa": {
//!     "atoms": [[-0.5, 1.0], [0.5, 1.0]],
//!     "density": [[0.0, 1.0, 0.25, 0.0]]
//!   }
//! }
//! ```
//!
//! Interval endpoints are numbers or the strings `"-inf"` / `"+inf"`.
//! `m` and `w` are either a constant or a list of `[x_lo, x_hi, value]`
//! pieces over the defaults `m = 1`, `w = 2` (Brownian convention).
//! Density rows are `[x_lo, x_hi, c, slope]` with value `c + slope·(x−x_lo)`.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, CoreResult};
use crate::generator::{Boundary, GeneratorSpec, Piecewise};
use crate::measure::{DensityPiece, RadonMeasure};

/// One interval endpoint: a number or `"-inf"` / `"+inf"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Num(f64),
    Named(String),
}

impl Endpoint {
    fn value(&self) -> CoreResult<f64> {
        match self {
            Endpoint::Num(x) => Ok(*x),
            Endpoint::Named(s) => match s.as_str() {
                "-inf" => Ok(f64::NEG_INFINITY),
                "+inf" | "inf" => Ok(f64::INFINITY),
                other => Err(CoreError::Config(format!("unknown endpoint {other:?}"))),
            },
        }
    }
}

/// Boundary behaviour name.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryName {
    Killed,
    Natural,
}

impl From<BoundaryName> for Boundary {
    fn from(b: BoundaryName) -> Boundary {
        match b {
            BoundaryName::Killed => Boundary::Killed,
            BoundaryName::Natural => Boundary::Natural,
        }
    }
}

/// Piecewise-constant coefficient: a constant or `[x_lo, x_hi, value]` rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientCfg {
    Const(f64),
    Pieces(Vec<[f64; 3]>),
}

impl CoefficientCfg {
    fn to_piecewise(&self, default: f64) -> CoreResult<Piecewise<f64>> {
        match self {
            CoefficientCfg::Const(v) => {
                if !(*v > 0.0) {
                    return Err(CoreError::Config("coefficient must be positive".into()));
                }
                Ok(Piecewise::constant(*v))
            }
            CoefficientCfg::Pieces(rows) => Piecewise::new(
                default,
                rows.iter().map(|r| (r[0], r[1], r[2])).collect(),
            ),
        }
    }
}

/// Killing measure: atom rows `[x, mass]` and density rows
/// `[x_lo, x_hi, c, slope]`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct KappaCfg {
    #[serde(default)]
    pub atoms: Vec<[f64; 2]>,
    #[serde(default)]
    pub density: Vec<[f64; 4]>,
}

impl KappaCfg {
    fn to_measure(&self) -> CoreResult<RadonMeasure<f64>> {
        RadonMeasure::new(
            self.atoms.iter().map(|a| (a[0], a[1])).collect(),
            self.density
                .iter()
                .map(|d| DensityPiece { x_lo: d[0], x_hi: d[1], c: d[2], slope: d[3] })
                .collect(),
        )?
        .checked_positive()
    }
}

/// The JSON generator description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub interval: [Endpoint; 2],
    pub boundary: [BoundaryName; 2],
    #[serde(default = "default_m")]
    pub m: CoefficientCfg,
    #[serde(default = "default_w")]
    pub w: CoefficientCfg,
    #[serde(default)]
    pub kappa: KappaCfg,
}

fn default_m() -> CoefficientCfg {
    CoefficientCfg::Const(1.0)
}

fn default_w() -> CoefficientCfg {
    CoefficientCfg::Const(2.0)
}

impl GeneratorConfig {
    /// Parse from a JSON string.
    pub fn from_json(s: &str) -> CoreResult<Self> {
        serde_json::from_str(s).map_err(|e| CoreError::Config(e.to_string()))
    }

    /// Build the validated generator.
    pub fn to_spec(&self) -> CoreResult<GeneratorSpec<f64>> {
        GeneratorSpec::new(
            self.interval[0].value()?,
            self.interval[1].value()?,
            self.boundary[0].into(),
            self.boundary[1].into(),
            self.m.to_piecewise(1.0)?,
            self.w.to_piecewise(2.0)?,
            self.kappa.to_measure()?,
        )
    }
}

impl TryFrom<&GeneratorConfig> for GeneratorSpec<f64> {
    type Error = CoreError;
    fn try_from(cfg: &GeneratorConfig) -> CoreResult<Self> {
        cfg.to_spec()
    }
}
