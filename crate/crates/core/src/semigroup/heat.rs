use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::grid::{Boundary, Grid};
use crate::error::{check_dim, Error, Result};

/// Heat semigroup `T(t)f = k_{νt} ⋆ f` on a uniform grid, applied as a
/// discrete convolution with the sampled Gaussian kernel
/// `k_t(x) = (4πt)^{-d/2} exp(-|x|²/(4t))`.
///
/// The kernel factorizes over axes, so a `d`-dimensional step is `d` passes
/// of 1-d FFT convolution. With `renormalize` (the default) each 1-d kernel
/// is scaled to unit discrete mass, which makes the periodic grid semigroup
/// exactly mass preserving.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "HeatSpec", into = "HeatSpec")]
pub struct HeatGrid {
    grid: Grid,
    boundary: Boundary,
    diffusion: f64,
    renormalize: bool,
    fft_len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for HeatGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeatGrid")
            .field("grid", &self.grid)
            .field("boundary", &self.boundary)
            .field("diffusion", &self.diffusion)
            .field("renormalize", &self.renormalize)
            .finish()
    }
}

impl PartialEq for HeatGrid {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid
            && self.boundary == other.boundary
            && self.diffusion == other.diffusion
            && self.renormalize == other.renormalize
    }
}

/// Sampled 1-d heat kernel at time `t`, indexed by circular offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelSample {
    pub t: f64,
    pub spacing: f64,
    /// Kernel density at offset `o·h`, stored at position `o mod len`.
    pub values: Vec<f64>,
    pub renormalized: bool,
}

impl HeatKernelSample {
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing
    }
}

impl HeatGrid {
    pub fn new(grid: Grid, boundary: Boundary) -> Result<Self> {
        Self::with_options(grid, boundary, 1.0, true)
    }

    pub fn with_options(grid: Grid, boundary: Boundary, diffusion: f64, renormalize: bool) -> Result<Self> {
        grid.validate()?;
        if !(diffusion > 0.0 && diffusion.is_finite()) {
            return Err(Error::param("diffusion", "must be positive and finite"));
        }
        let fft_len = match boundary {
            Boundary::Periodic => grid.points,
            Boundary::ZeroPad => (2 * grid.points).next_power_of_two(),
        };
        let mut planner = FftPlanner::new();
        Ok(HeatGrid {
            grid,
            boundary,
            diffusion,
            renormalize,
            fft_len,
            forward: planner.plan_fft_forward(fft_len),
            inverse: planner.plan_fft_inverse(fft_len),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    pub fn renormalized(&self) -> bool {
        self.renormalize
    }

    /// Whether `0 < νt < h²/4`, where the sampled kernel under-resolves.
    pub fn under_resolved(&self, t: f64) -> bool {
        t > 0.0 && self.diffusion * t < self.grid.min_resolved_time()
    }

    /// The 1-d kernel profile used at time `t` (diffusion applied).
    pub fn kernel_sample(&self, t: f64) -> Result<HeatKernelSample> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::param("t", "kernel sampling needs finite t > 0"));
        }
        let tau = self.diffusion * t;
        let h = self.grid.spacing();
        let n = self.grid.points;
        let len = self.fft_len;
        let peak = (4.0 * PI * tau).powf(-0.5);
        let k = |o: usize| {
            let x = o as f64 * h;
            peak * (-x * x / (4.0 * tau)).exp()
        };
        let mut values = vec![0.0; len];
        match self.boundary {
            Boundary::Periodic => {
                for (j, v) in values.iter_mut().enumerate() {
                    *v = k(j.min(n - j));
                }
            }
            Boundary::ZeroPad => {
                values[0] = k(0);
                for o in 1..n {
                    values[o] = k(o);
                    values[len - o] = k(o);
                }
            }
        }
        if self.renormalize {
            let mass: f64 = values.iter().sum::<f64>() * h;
            if mass > 0.0 {
                for v in &mut values {
                    *v /= mass;
                }
            }
        }
        Ok(HeatKernelSample { t, spacing: h, values, renormalized: self.renormalize })
    }

    pub fn apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.grid.len(), f.len())?;
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::param("t", format!("need finite t ≥ 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(f.to_vec());
        }
        let kernel = self.kernel_sample(t)?;
        let h = self.grid.spacing();
        let len = self.fft_len;
        let mut spectrum: Vec<Complex<f64>> = kernel.values.iter().map(|&v| Complex::new(v * h, 0.0)).collect();
        self.forward.process(&mut spectrum);

        let n = self.grid.points;
        let d = self.grid.d;
        let mut out = f.to_vec();
        let mut line = vec![Complex::new(0.0, 0.0); len];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len())];
        let scale = 1.0 / len as f64;
        for axis in 0..d {
            let stride = n.pow((d - 1 - axis) as u32);
            let lines = self.grid.len() / n;
            for l in 0..lines {
                // base index of the l-th line along `axis`
                let base = (l / stride) * stride * n + l % stride;
                line.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
                for i in 0..n {
                    let v = out[base + i * stride];
                    // positive part in re, negative part in im; the kernel is
                    // real so the two convolutions do not mix
                    line[i] = Complex::new(v.max(0.0), (-v).max(0.0));
                }
                self.forward.process_with_scratch(&mut line, &mut scratch);
                for (c, k) in line.iter_mut().zip(&spectrum) {
                    *c *= k;
                }
                self.inverse.process_with_scratch(&mut line, &mut scratch);
                for i in 0..n {
                    let c = line[i] * scale;
                    out[base + i * stride] = c.re.max(0.0) - c.im.max(0.0);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeatSpec {
    grid: Grid,
    #[serde(default)]
    boundary: Boundary,
    #[serde(default = "one")]
    diffusion: f64,
    #[serde(default = "yes")]
    renormalize: bool,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl TryFrom<HeatSpec> for HeatGrid {
    type Error = Error;

    fn try_from(s: HeatSpec) -> Result<Self> {
        HeatGrid::with_options(s.grid, s.boundary, s.diffusion, s.renormalize)
    }
}

impl From<HeatGrid> for HeatSpec {
    fn from(h: HeatGrid) -> Self {
        HeatSpec { grid: h.grid, boundary: h.boundary, diffusion: h.diffusion, renormalize: h.renormalize }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::grid::GridFunction;

    fn grid(l: f64, n: usize) -> Grid {
        Grid::new(1, l, n).unwrap()
    }

    #[test]
    fn kernel_peak_and_mass() {
        let g = grid(5.0, 1024);
        let raw = HeatGrid::with_options(g, Boundary::Periodic, 1.0, false).unwrap();
        for &t in &[0.01, 0.1, 1.0] {
            let k = raw.kernel_sample(t).unwrap();
            assert_eq!(k.values[0], (4.0 * PI * t).powf(-0.5));
        }
        let heat = HeatGrid::new(g, Boundary::Periodic).unwrap();
        assert!((heat.kernel_sample(0.3).unwrap().mass() - 1.0).abs() < 1e-12);
        assert!((HeatGrid::new(g, Boundary::ZeroPad).unwrap().kernel_sample(0.3).unwrap().mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_reproduces_sampled_kernel() {
        let g = grid(5.0, 1024);
        let heat = HeatGrid::new(g, Boundary::Periodic).unwrap();
        let t = 0.01;
        let out = heat.apply(t, &GridFunction::delta(g).values).unwrap();
        let residual = (0..g.points)
            .map(|i| {
                let x = g.coord(i);
                let oracle = (4.0 * PI * t).powf(-0.5) * (-x * x / (4.0 * t)).exp();
                (out[i] - oracle).abs()
            })
            .fold(0.0f64, f64::max);
        assert!(residual < 1e-6, "{residual}");
    }

    #[test]
    fn positivity_and_mass() {
        let g = grid(4.0, 256);
        let heat = HeatGrid::new(g, Boundary::Periodic).unwrap();
        let f = GridFunction::spike(g, 5).unwrap();
        let out = heat.apply(0.2, &f.values).unwrap();
        assert!(out.iter().all(|&v| v >= 0.0));
        let mass: f64 = out.iter().sum::<f64>() * g.spacing();
        assert!((mass - 1.0).abs() < 1e-12);
        assert_eq!(heat.apply(0.0, &f.values).unwrap(), f.values);
        assert!(heat.apply(-1.0, &f.values).is_err());
    }

    #[test]
    fn zero_pad_loses_mass_at_the_boundary() {
        let g = grid(1.0, 128);
        let heat = HeatGrid::new(g, Boundary::ZeroPad).unwrap();
        let ones = vec![1.0; 128];
        let out = heat.apply(0.1, &ones).unwrap();
        assert!(out[0] < 0.6 && out[64] > 0.95);
        assert!(out.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn two_dimensional_step_matches_separable_product() {
        let g2 = Grid::new(2, 2.0, 32).unwrap();
        let heat2 = HeatGrid::new(g2, Boundary::Periodic).unwrap();
        let out = heat2.apply(0.05, &GridFunction::delta(g2).values).unwrap();
        let g1 = grid(2.0, 32);
        let line = HeatGrid::new(g1, Boundary::Periodic).unwrap().apply(0.05, &GridFunction::delta(g1).values).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                assert!((out[i * 32 + j] - line[i] * line[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn under_resolution_flag() {
        let g = grid(5.0, 1024);
        let heat = HeatGrid::new(g, Boundary::Periodic).unwrap();
        let t_min = g.min_resolved_time();
        assert!(heat.under_resolved(t_min / 2.0));
        assert!(!heat.under_resolved(t_min));
        assert!(!heat.under_resolved(0.0));
    }
}
