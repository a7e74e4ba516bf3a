//! Concrete positive semigroups: matrix exponentials of Metzler generators,
//! their resolvents, and heat / shift semigroups on uniform grids.

mod domination;
mod expm;
mod generator;
mod grid;
mod heat;
mod resolvent;
mod shift;

use serde::{Deserialize, Serialize};

pub use domination::{gaussian_domination_check, DominationEntry, DominationReport};
pub use expm::{expm, NEGATIVE_BAND};
pub use generator::MetzlerGenerator;
pub use grid::{Boundary, Grid, GridFunction};
pub use heat::{HeatGrid, HeatKernelSample};
pub use resolvent::{
    exceeds_spectral_bound, gauss_legendre, laplace_resolvent_check, resolvent, resolvent_apply, LaplaceReport,
    QuadratureSpec,
};
pub use shift::ShiftGrid;

pub(crate) use generator::mat_vec;

use crate::error::{check_dim, Result};
use crate::lattice::LatticeVector;

/// Side information from applying a grid semigroup.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ApplyDiagnostics {
    /// Heat step below `h²/4`.
    pub under_resolved: bool,
    /// Distance between the requested and the applied shift time.
    pub snap_distance: f64,
}

/// Uniform interface over the semigroups in this module.
///
/// JSON forms: `{"matrix": [[..]]}`, `{"heat": {"grid": {..}, "boundary": ..}}`,
/// `{"shift": {"grid": {..}}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HandleSpec", into = "HandleSpec")]
pub enum SemigroupHandle {
    Matrix(MetzlerGenerator),
    Heat(HeatGrid),
    Shift(ShiftGrid),
}

impl SemigroupHandle {
    /// The identity semigroup on `ℝⁿ` (generator 0).
    pub fn identity(n: usize) -> Self {
        SemigroupHandle::Matrix(MetzlerGenerator::zero(n))
    }

    pub fn dim(&self) -> usize {
        match self {
            SemigroupHandle::Matrix(a) => a.dim(),
            SemigroupHandle::Heat(h) => h.grid().len(),
            SemigroupHandle::Shift(s) => s.grid().len(),
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match self {
            SemigroupHandle::Matrix(_) => None,
            SemigroupHandle::Heat(h) => Some(h.grid()),
            SemigroupHandle::Shift(s) => Some(s.grid()),
        }
    }

    /// Smallest time worth sampling on `(0, t0]`: `h²/4` for heat, `h` for
    /// the shift, `t0·1e-8` for matrices.
    pub fn natural_t_min(&self, t0: f64) -> f64 {
        let t = match self {
            SemigroupHandle::Matrix(_) => t0 * 1e-8,
            SemigroupHandle::Heat(h) => h.grid().min_resolved_time() / h.diffusion(),
            SemigroupHandle::Shift(s) => s.grid().spacing(),
        };
        t.min(t0)
    }

    pub fn apply(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        match self {
            SemigroupHandle::Matrix(a) => {
                let e = expm(a, t)?;
                Ok(mat_vec(&e, &LatticeVector::new(x.to_vec()))?.into_vec())
            }
            SemigroupHandle::Heat(h) => h.apply(t, x),
            SemigroupHandle::Shift(s) => s.apply(t, x),
        }
    }

    pub fn apply_vector(&self, t: f64, x: &LatticeVector) -> Result<LatticeVector> {
        self.apply(t, x.as_slice()).map(LatticeVector::new)
    }

    pub fn apply_with_diagnostics(&self, t: f64, x: &[f64]) -> Result<(Vec<f64>, ApplyDiagnostics)> {
        let values = self.apply(t, x)?;
        let diag = match self {
            SemigroupHandle::Matrix(_) => ApplyDiagnostics::default(),
            SemigroupHandle::Heat(h) => ApplyDiagnostics { under_resolved: h.under_resolved(t), snap_distance: 0.0 },
            SemigroupHandle::Shift(s) => ApplyDiagnostics { under_resolved: false, snap_distance: s.snap(t).1 },
        };
        Ok((values, diag))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum HandleSpec {
    Matrix(MetzlerGenerator),
    Heat { heat: HeatGrid },
    Shift { shift: ShiftGrid },
}

impl TryFrom<HandleSpec> for SemigroupHandle {
    type Error = crate::error::Error;

    fn try_from(s: HandleSpec) -> Result<Self> {
        Ok(match s {
            HandleSpec::Matrix(a) => SemigroupHandle::Matrix(a),
            HandleSpec::Heat { heat } => SemigroupHandle::Heat(heat),
            HandleSpec::Shift { shift } => SemigroupHandle::Shift(shift),
        })
    }
}

impl From<SemigroupHandle> for HandleSpec {
    fn from(h: SemigroupHandle) -> Self {
        match h {
            SemigroupHandle::Matrix(a) => HandleSpec::Matrix(a),
            SemigroupHandle::Heat(heat) => HandleSpec::Heat { heat },
            SemigroupHandle::Shift(shift) => HandleSpec::Shift { shift },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn handle_json_forms() {
        let m: SemigroupHandle = serde_json::from_str(r#"{"matrix": [[-1, 0], [0, -1]]}"#).unwrap();
        assert_eq!(m.dim(), 2);
        let h: SemigroupHandle =
            serde_json::from_str(r#"{"heat": {"grid": {"d":1,"L":5,"N":64}, "boundary": "zero-pad"}}"#).unwrap();
        assert!(matches!(&h, SemigroupHandle::Heat(g) if g.boundary() == Boundary::ZeroPad));
        let s: SemigroupHandle = serde_json::from_str(r#"{"shift": {"grid": {"d":1,"L":1,"N":8}}}"#).unwrap();
        assert_eq!(s.dim(), 8);
        assert!(serde_json::from_str::<SemigroupHandle>(r#"{"matrix": [[0, -1], [0, 0]]}"#).is_err());
    }

    #[test]
    fn identity_at_time_zero() {
        let x = vec![0.3, -1.0, 2.0];
        let a = MetzlerGenerator::from_rows(&[vec![-1.0, 2.0, 0.0], vec![0.5, -3.0, 1.0], vec![0.0, 0.0, -0.1]]).unwrap();
        assert_eq!(SemigroupHandle::Matrix(a).apply(0.0, &x).unwrap(), x);
    }
}
