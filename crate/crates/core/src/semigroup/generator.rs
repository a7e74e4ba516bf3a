use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::LatticeVector;

/// A square real matrix with nonnegative off-diagonal entries.
///
/// These are exactly the matrices whose exponentials `e^{tA}` are positive
/// for every `t ≥ 0`. JSON form: `{"matrix": [[row], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorSpec", into = "GeneratorSpec")]
pub struct MetzlerGenerator {
    entries: DMatrix<f64>,
}

impl MetzlerGenerator {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::InvalidGenerator(format!(
                "matrix must be square, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidGenerator("matrix is empty".into()));
        }
        if !entries.iter().all(|a| a.is_finite()) {
            return Err(Error::InvalidGenerator("matrix has non-finite entries".into()));
        }
        let n = entries.nrows();
        for i in 0..n {
            for j in 0..n {
                if i != j && entries[(i, j)] < 0.0 {
                    return Err(Error::InvalidGenerator(format!(
                        "off-diagonal entry ({i}, {j}) = {} is negative",
                        entries[(i, j)]
                    )));
                }
            }
        }
        Ok(MetzlerGenerator { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGenerator("rows must all have length equal to the row count".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// The zero generator (identity semigroup).
    pub fn zero(n: usize) -> Self {
        MetzlerGenerator { entries: DMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// `A - ω·I`; still Metzler.
    pub fn shifted(&self, omega: f64) -> Self {
        let mut m = self.entries.clone();
        for i in 0..m.nrows() {
            m[(i, i)] -= omega;
        }
        MetzlerGenerator { entries: m }
    }

    pub fn apply(&self, x: &LatticeVector) -> Result<LatticeVector> {
        mat_vec(&self.entries, x)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.entries.row(i).iter().copied().collect()).collect()
    }
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &LatticeVector) -> Result<LatticeVector> {
    check_dim(m.ncols(), x.len())?;
    let y = m * DVector::from_column_slice(x.as_slice());
    Ok(LatticeVector::new(y.as_slice().to_vec()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorSpec {
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<GeneratorSpec> for MetzlerGenerator {
    type Error = Error;

    fn try_from(spec: GeneratorSpec) -> Result<Self> {
        MetzlerGenerator::from_rows(&spec.matrix)
    }
}

impl From<MetzlerGenerator> for GeneratorSpec {
    fn from(g: MetzlerGenerator) -> Self {
        GeneratorSpec { matrix: g.rows() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_off_diagonal() {
        let err = MetzlerGenerator::from_rows(&[vec![-1.0, -0.1], vec![0.0, -1.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidGenerator(_)));
        assert!(MetzlerGenerator::from_rows(&[vec![-5.0, 0.0], vec![3.0, 2.0]]).is_ok());
        assert!(MetzlerGenerator::from_rows(&[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g: MetzlerGenerator = serde_json::from_str(r#"{"matrix": [[-2, 1], [1, -2]]}"#).unwrap();
        assert_eq!(g.matrix()[(0, 1)], 1.0);
        let back = serde_json::to_string(&g).unwrap();
        assert_eq!(back, r#"{"matrix":[[-2.0,1.0],[1.0,-2.0]]}"#);
        assert!(serde_json::from_str::<MetzlerGenerator>(r#"{"matrix": [[0, -1], [0, 0]]}"#).is_err());
    }
}
