use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{LatticeNorm, LatticeVector};

/// A uniform grid on `[-L, L)^d` with `N` points per axis, stored row-major
/// (last axis fastest). Points sit at `-L + i·h`, `h = 2L/N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub d: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

impl Grid {
    pub fn new(d: usize, half_width: f64, points: usize) -> Result<Self> {
        let g = Grid { d, half_width, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > 3 {
            return Err(Error::param("d", format!("supported dimensions are 1..=3, got {}", self.d)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::param("L", "half-width must be positive and finite"));
        }
        if self.points < 2 {
            return Err(Error::param("N", "need at least 2 points per axis"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// Total number of grid points `N^d`.
    pub fn len(&self) -> usize {
        self.points.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis coordinate of index `i`.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Index of the origin along each axis.
    pub fn center(&self) -> usize {
        self.points / 2
    }

    /// Flat index of the origin.
    pub fn center_index(&self) -> usize {
        (0..self.d).fold(0, |acc, _| acc * self.points + self.center())
    }

    /// Smallest time at which the sampled heat kernel is resolved, `h²/4`.
    pub fn min_resolved_time(&self) -> f64 {
        let h = self.spacing();
        h * h / 4.0
    }

    /// The `L^p` norm with cell-volume weights.
    pub fn lp_norm(&self, p: f64) -> Result<LatticeNorm> {
        LatticeNorm::lp(p)?.with_weights(vec![self.cell_volume(); self.len()])
    }

    /// Samples `f` at every grid point (coordinates passed per axis).
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let n = self.points;
        let mut x = vec![0.0; self.d];
        (0..self.len())
            .map(|flat| {
                let mut rem = flat;
                for k in (0..self.d).rev() {
                    x[k] = self.coord(rem % n);
                    rem /= n;
                }
                f(&x)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Periodic,
    ZeroPad,
}

/// Grid samples, JSON form `{"grid": {"d":1,"L":5,"N":1024}, "values": [..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        check_dim(grid.len(), values.len())?;
        Ok(GridFunction { grid, values })
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        check_dim(self.grid.len(), self.values.len())
    }

    /// Indicator of the `cells`-wide block around the origin (1-d), scaled to unit mass.
    pub fn spike(grid: Grid, cells: usize) -> Result<Self> {
        if grid.d != 1 {
            return Err(Error::Unsupported("spikes are defined on 1-d grids".into()));
        }
        if cells == 0 || cells > grid.points {
            return Err(Error::param("cells", format!("need 1 ≤ cells ≤ {}", grid.points)));
        }
        let start = grid.center() - cells / 2;
        let height = 1.0 / (cells as f64 * grid.spacing());
        let mut values = vec![0.0; grid.points];
        for v in &mut values[start..start + cells] {
            *v = height;
        }
        Ok(GridFunction { grid, values })
    }

    /// Unit-mass point mass at the origin.
    pub fn delta(grid: Grid) -> Self {
        let mut values = vec![0.0; grid.len()];
        values[grid.center_index()] = 1.0 / grid.cell_volume();
        GridFunction { grid, values }
    }

    /// Gaussian bump `exp(-|x - c|² / (2 w²))` centred at `c` (all axes).
    pub fn bump(grid: Grid, centre: f64, width: f64) -> Self {
        let values = grid.sample(|x| {
            let r2: f64 = x.iter().map(|xi| (xi - centre) * (xi - centre)).sum();
            (-r2 / (2.0 * width * width)).exp()
        });
        GridFunction { grid, values }
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn to_vector(&self) -> LatticeVector {
        LatticeVector::new(self.values.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let g = Grid::new(1, 5.0, 1024).unwrap();
        assert_eq!(g.spacing(), 10.0 / 1024.0);
        assert_eq!(g.coord(g.center()), 0.0);
        let g2 = Grid::new(2, 1.0, 4).unwrap();
        assert_eq!(g2.len(), 16);
        assert_eq!(g2.center_index(), 2 * 4 + 2);
        assert!(Grid::new(1, -1.0, 8).is_err());
        assert!(Grid::new(0, 1.0, 8).is_err());
    }

    #[test]
    fn unit_mass_constructors() {
        let g = Grid::new(1, 8.0, 8192).unwrap();
        let s = GridFunction::spike(g, 128).unwrap();
        assert!((s.mass() - 1.0).abs() < 1e-14);
        assert!((GridFunction::delta(g).mass() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn json_shape() {
        let f: GridFunction = serde_json::from_str(r#"{"grid":{"d":1,"L":1,"N":4},"values":[0,1,2,3]}"#).unwrap();
        assert_eq!(f.grid.points, 4);
        assert!(serde_json::from_str::<GridFunction>(r#"{"grid":{"d":1,"L":1,"N":4},"values":[0]}"#)
            .map(|f| f.validate())
            .unwrap()
            .is_err());
    }
}
