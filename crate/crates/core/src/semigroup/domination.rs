use serde::{Deserialize, Serialize};

use super::heat::HeatGrid;
use super::SemigroupHandle;
use crate::error::{Error, Result};

/// Relative threshold for domination, scaled by `‖f‖_sup`.
const DOMINATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationEntry {
    pub f_index: usize,
    pub t: f64,
    /// `max_i (S(t)f - c·T(bt)f)_i^+`.
    pub max_violation: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub b: f64,
    pub c: f64,
    pub entries: Vec<DominationEntry>,
    pub max_violation: f64,
    pub certified: bool,
}

/// Checks `S(t)f ≤ c·T(bt)f` for every `f` in `fs` and `t` in `ts ⊂ [0, 1]`.
pub fn gaussian_domination_check(
    s: &SemigroupHandle,
    heat: &HeatGrid,
    b: f64,
    c: f64,
    fs: &[Vec<f64>],
    ts: &[f64],
) -> Result<DominationReport> {
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::param("b", "must be finite and ≥ 0"));
    }
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::param("c", "must be finite and ≥ 1"));
    }
    if let Some(g) = s.grid() {
        if g != heat.grid() {
            return Err(Error::InvalidInput("S and T live on different grids".into()));
        }
    }
    crate::error::check_dim(heat.grid().len(), s.dim())?;
    if let Some(&t) = ts.iter().find(|&&t| !(0.0..=1.0).contains(&t)) {
        return Err(Error::param("ts", format!("times must lie in [0, 1], got {t}")));
    }
    if let Some(i) = fs.iter().position(|f| f.iter().any(|&v| v < 0.0)) {
        return Err(Error::Precondition(format!("f[{i}] has negative entries")));
    }

    let pairs: Vec<(usize, f64)> = (0..fs.len()).flat_map(|i| ts.iter().map(move |&t| (i, t))).collect();
    let entries = crate::par::try_map(&pairs, |&(i, t)| {
        let f = &fs[i];
        let lhs = s.apply(t, f)?;
        let rhs = heat.apply(b * t, f)?;
        let max_violation = lhs.iter().zip(&rhs).map(|(l, r)| (l - c * r).max(0.0)).fold(0.0, f64::max);
        let sup = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(DominationEntry { f_index: i, t, max_violation, threshold: DOMINATION_TOL * sup })
    })?;
    let max_violation = entries.iter().map(|e| e.max_violation).fold(0.0, f64::max);
    let certified = entries.iter().all(|e| e.max_violation <= e.threshold);
    Ok(DominationReport { b, c, entries, max_violation, certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{Boundary, Grid, GridFunction};

    fn setup() -> (Grid, HeatGrid, Vec<Vec<f64>>) {
        let g = Grid::new(1, 5.0, 256).unwrap();
        let heat = HeatGrid::new(g, Boundary::Periodic).unwrap();
        let fs = vec![GridFunction::spike(g, 4).unwrap().values, GridFunction::bump(g, 0.5, 0.3).values];
        (g, heat, fs)
    }

    const TS: [f64; 4] = [0.0, 0.01, 0.3, 1.0];

    #[test]
    fn self_domination_is_exact() {
        let (_, heat, fs) = setup();
        let s = SemigroupHandle::Heat(heat.clone());
        let rep = gaussian_domination_check(&s, &heat, 1.0, 1.0, &fs, &TS).unwrap();
        assert!(rep.certified);
        assert_eq!(rep.max_violation, 0.0);
    }

    #[test]
    fn faster_diffusion_is_dominated_by_rescaled_time() {
        let (g, heat, fs) = setup();
        let nu = 2.5;
        let s = SemigroupHandle::Heat(HeatGrid::with_options(g, Boundary::Periodic, nu, true).unwrap());
        let rep = gaussian_domination_check(&s, &heat, nu, 1.0, &fs, &TS).unwrap();
        assert!(rep.certified, "{}", rep.max_violation);
    }

    #[test]
    fn half_time_reports_a_violation() {
        let (_, heat, fs) = setup();
        let s = SemigroupHandle::Heat(heat.clone());
        let rep = gaussian_domination_check(&s, &heat, 0.5, 1.0, &fs[..1], &[0.3]).unwrap();
        assert!(!rep.certified);
        assert!(rep.max_violation > 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (_, heat, fs) = setup();
        let s = SemigroupHandle::Heat(heat.clone());
        assert!(gaussian_domination_check(&s, &heat, 1.0, 1.0, &fs, &[1.5]).is_err());
        let neg = vec![vec![-1.0; 256]];
        assert!(matches!(
            gaussian_domination_check(&s, &heat, 1.0, 1.0, &neg, &[0.1]),
            Err(Error::Precondition(_))
        ));
        assert!(gaussian_domination_check(&s, &heat, 1.0, 0.5, &fs, &[0.1]).is_err());
    }
}
