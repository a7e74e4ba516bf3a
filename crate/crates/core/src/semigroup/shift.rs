use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{check_dim, Error, Result};

/// Left shift `T(t)f = f(· + t)` on a periodic 1-d grid.
///
/// Times are snapped to the nearest multiple of the spacing; [`snap`](Self::snap)
/// reports the snapped step count and the snap distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShiftSpec", into = "ShiftSpec")]
pub struct ShiftGrid {
    grid: Grid,
}

impl ShiftGrid {
    pub fn new(grid: Grid) -> Result<Self> {
        grid.validate()?;
        if grid.d != 1 {
            return Err(Error::Unsupported("the shift semigroup is implemented on 1-d grids".into()));
        }
        Ok(ShiftGrid { grid })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `(steps, |t - steps·h|)`.
    pub fn snap(&self, t: f64) -> (usize, f64) {
        let h = self.grid.spacing();
        let steps = (t / h).round();
        (steps as usize, (t - steps * h).abs())
    }

    pub fn apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.grid.len(), f.len())?;
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::param("t", format!("need finite t ≥ 0, got {t}")));
        }
        let n = f.len();
        let k = self.snap(t).0 % n;
        Ok((0..n).map(|i| f[(i + k) % n]).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftSpec {
    grid: Grid,
}

impl TryFrom<ShiftSpec> for ShiftGrid {
    type Error = Error;

    fn try_from(s: ShiftSpec) -> Result<Self> {
        ShiftGrid::new(s.grid)
    }
}

impl From<ShiftGrid> for ShiftSpec {
    fn from(s: ShiftGrid) -> Self {
        ShiftSpec { grid: s.grid }
    }
}
