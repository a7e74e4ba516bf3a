//! Sampling schedules for the continuum index sets that appear in the
//! library: time grids on `[0, t0]` for orbit suprema, and decreasing
//! schedules `t_k ↓ 0` that stand in for the net `t ↓ 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of log-spaced points in a [`TimeGrid`].
pub const DEFAULT_TIME_POINTS: usize = 256;

/// Default depth of the dyadic schedule `t_k = 2^{-k}, k = 0..=40`.
pub const DEFAULT_DYADIC_LEVELS: u32 = 40;

/// Increasing list of sample times in `[0, t0]` that contains both endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    /// `{0} ∪ {n log-spaced points in [t_min, t0]}`.
    pub fn log_spaced(t_min: f64, t0: f64, n: usize) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::param("t0", format!("must be positive and finite, got {t0}")));
        }
        if !(t_min > 0.0 && t_min <= t0) {
            return Err(Error::param("t_min", format!("must lie in (0, t0], got {t_min}")));
        }
        if n == 0 {
            return Err(Error::Empty("time grid"));
        }
        let mut times = Vec::with_capacity(n + 1);
        times.push(0.0);
        if n == 1 || t_min == t0 {
            times.push(t0);
        } else {
            let (a, b) = (t_min.ln(), t0.ln());
            for k in 0..n {
                let s = k as f64 / (n - 1) as f64;
                times.push((a + s * (b - a)).exp());
            }
            // pin the endpoint exactly
            *times.last_mut().unwrap() = t0;
        }
        Ok(TimeGrid(times))
    }

    /// `n + 1` equispaced points `k·t0/n`, `k = 0..=n`.
    pub fn uniform(t0: f64, n: usize) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::param("t0", format!("must be positive and finite, got {t0}")));
        }
        if n == 0 {
            return Err(Error::Empty("time grid"));
        }
        let mut times: Vec<f64> = (0..=n).map(|k| t0 * k as f64 / n as f64).collect();
        times[n] = t0;
        Ok(TimeGrid(times))
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        Self::try_from(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn horizon(&self) -> f64 {
        *self.0.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Points inserted by one doubling of the grid: the geometric midpoint of
    /// each positive interval, the arithmetic one for the interval at 0.
    pub fn midpoints(&self) -> Vec<f64> {
        self.0
            .windows(2)
            .map(|w| if w[0] > 0.0 { (w[0] * w[1]).sqrt() } else { 0.5 * w[1] })
            .collect()
    }

    /// The doubled grid (original points plus [`midpoints`](Self::midpoints)).
    pub fn refined(&self) -> TimeGrid {
        let mids = self.midpoints();
        let mut out = Vec::with_capacity(self.0.len() + mids.len());
        for (i, &t) in self.0.iter().enumerate() {
            out.push(t);
            if let Some(&m) = mids.get(i) {
                out.push(m);
            }
        }
        TimeGrid(out)
    }

    /// Restriction to `[0, t]`, with `t` appended if it is not a grid point.
    pub fn truncated(&self, t: f64) -> Result<TimeGrid> {
        let mut times: Vec<f64> = self.0.iter().copied().filter(|&s| s < t).collect();
        times.push(t);
        TimeGrid::try_from(times)
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;

    fn try_from(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Empty("time grid"));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidInput("time grid must start at 0".into()));
        }
        if times.len() < 2 {
            return Err(Error::InvalidInput("time grid needs a positive horizon".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || !times.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidInput("time grid must be strictly increasing and finite".into()));
        }
        Ok(TimeGrid(times))
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(g: TimeGrid) -> Self {
        g.0
    }
}

/// Strictly decreasing positive sample times, read as a co-final sequence of
/// the index set `(0, 1]` ordered conversely to the reals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Schedule(Vec<f64>);

impl Schedule {
    /// `t_k = 2^{-k}` for `k = 0..=levels`.
    pub fn dyadic(levels: u32) -> Self {
        Schedule((0..=levels).map(|k| 0.5f64.powi(k as i32)).collect())
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        Self::try_from(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sample times not exceeding `t`.
    pub fn up_to(&self, t: f64) -> Vec<f64> {
        self.0.iter().copied().filter(|&s| s <= t).collect()
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::dyadic(DEFAULT_DYADIC_LEVELS)
    }
}

impl TryFrom<Vec<f64>> for Schedule {
    type Error = Error;

    fn try_from(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Empty("schedule"));
        }
        if !times.iter().all(|&t| t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput("schedule times must be positive and finite".into()));
        }
        if times.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidInput("schedule must be strictly decreasing".into()));
        }
        Ok(Schedule(times))
    }
}

impl From<Schedule> for Vec<f64> {
    fn from(s: Schedule) -> Self {
        s.0
    }
}
