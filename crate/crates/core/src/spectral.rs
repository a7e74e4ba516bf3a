//! Spectral bound, growth-bound fits and the orbit-to-norm estimate.

use nalgebra::{DMatrix, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{LatticeNorm, LatticeVector, NormKind};
use crate::schedule::{TimeGrid, DEFAULT_TIME_POINTS};
use crate::semigroup::{exceeds_spectral_bound, expm, mat_vec, resolvent_apply, MetzlerGenerator, SemigroupHandle};

/// Below this spectral gap the generator is treated as (near-)defective.
pub const DEFECTIVE_GAP: f64 = 1e-6;

const SCHUR_MAX_ITER: usize = 10_000;
const BISECTION_STEPS: usize = 200;
const POWER_ITERATIONS: usize = 200;
const MAX_SHRINKS: u32 = 60;

fn eigenvalues(a: &MetzlerGenerator) -> Result<Vec<(f64, f64)>> {
    let schur = Schur::try_new(a.matrix().clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::NoConvergence { iterations: SCHUR_MAX_ITER })?;
    Ok(schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect())
}

/// `s(A) = max Re λ` over the eigenvalues of `A` (real Schur form).
pub fn spectral_bound(a: &MetzlerGenerator) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max))
}

/// Perron cross-check: bisection on `λ` for the M-matrix property of `λI - A`,
/// which holds exactly for `λ > s(A)`.
pub fn perron_bound(a: &MetzlerGenerator) -> f64 {
    let m = a.matrix();
    let n = a.dim();
    let mut lo = (0..n).map(|i| m[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
    let mut hi = (0..n).map(|i| m.row(i).sum()).fold(f64::NEG_INFINITY, f64::max).max(lo);
    if !exceeds_spectral_bound(a, hi) {
        // the row-sum bound is attained; nudge the bracket open
        hi += 1e-12 * (1.0 + hi.abs());
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if exceeds_spectral_bound(a, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Distance from `s(A)` to the largest real part among the other eigenvalues
/// (one copy of the dominant eigenvalue removed); `+∞` when `n = 1`.
pub fn spectral_gap(a: &MetzlerGenerator) -> Result<f64> {
    let mut re: Vec<f64> = eigenvalues(a)?.iter().map(|e| e.0).collect();
    re.sort_by(|x, y| y.total_cmp(x));
    Ok(if re.len() < 2 { f64::INFINITY } else { re[0] - re[1] })
}

/// `[20/gap, 40/gap]`, or `[100, 1000]` with the defective flag when the gap
/// is below [`DEFECTIVE_GAP`].
pub fn default_fit_window(a: &MetzlerGenerator) -> Result<(f64, f64, bool)> {
    let gap = spectral_gap(a)?;
    if gap < DEFECTIVE_GAP {
        Ok((100.0, 1000.0, true))
    } else if gap.is_infinite() {
        Ok((1.0, 2.0, false))
    } else {
        Ok((20.0 / gap, 40.0 / gap, false))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// `None` for grid handles.
    pub s_a: Option<f64>,
    pub omega_fit: f64,
    pub fit_window: [f64; 2],
    pub requested_window: [f64; 2],
    pub discrepancy: Option<f64>,
    /// Number of times the window was halved after overflow.
    pub shrinks: u32,
    pub defective: bool,
    /// `(t, log ‖T(t)‖)`.
    pub samples: Vec<(f64, f64)>,
}

/// A matrix stored as `M·e^{log_scale}` with `max |M| = 1`.
#[derive(Clone)]
struct Scaled {
    m: DMatrix<f64>,
    log_scale: f64,
}

impl Scaled {
    fn new(m: DMatrix<f64>) -> Self {
        Scaled { m, log_scale: 0.0 }.normalized()
    }

    fn normalized(mut self) -> Self {
        let s = self.m.amax();
        if s > 0.0 && s.is_finite() {
            self.m /= s;
            self.log_scale += s.ln();
        }
        self
    }

    fn mul(&self, other: &Scaled) -> Scaled {
        Scaled { m: &self.m * &other.m, log_scale: self.log_scale + other.log_scale }.normalized()
    }

    fn is_finite(&self) -> bool {
        self.log_scale.is_finite() && self.m.iter().all(|v| v.is_finite())
    }
}

/// `e^{tA}` in scaled form: `e^{cA}` with `c = t/⌈t⌉ ≤ 1`, raised to `⌈t⌉` by
/// binary powering.
fn scaled_expm(a: &MetzlerGenerator, t: f64) -> Result<Scaled> {
    let k = t.ceil().max(1.0) as u64;
    let mut base = Scaled::new(expm(a, t / k as f64)?);
    let n = a.dim();
    let mut acc = Scaled::new(DMatrix::identity(n, n));
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    Ok(acc)
}

fn operator_log_norm(m: &Scaled, norm: &LatticeNorm) -> Result<f64> {
    let n = m.m.nrows();
    let w: Vec<f64> = norm.weights().map(|w| w.to_vec()).unwrap_or_else(|| vec![1.0; n]);
    check_dim(n, w.len())?;
    let value = match norm.kind() {
        NormKind::Sup => (0..n).map(|i| m.m.row(i).abs().sum()).fold(0.0, f64::max),
        NormKind::Lp(p) => {
            // D^{1/p} M D^{-1/p} carries the weighted norm to the plain one
            let d: Vec<f64> = w.iter().map(|x| x.powf(1.0 / p)).collect();
            let mw = DMatrix::from_fn(n, n, |i, j| d[i] * m.m[(i, j)] / d[j]);
            if p == 1.0 {
                (0..n).map(|j| mw.column(j).abs().sum()).fold(0.0, f64::max)
            } else if p == 2.0 {
                spectral_norm(&mw)
            } else {
                return Err(Error::Unsupported(format!("operator norm for p = {p}")));
            }
        }
    };
    Ok(value.ln() + m.log_scale)
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    let g = m.transpose() * m;
    let n = g.nrows();
    let mut v = nalgebra::DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = &g * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = v.dot(&w);
        v = w / norm;
    }
    lambda.max(0.0).sqrt()
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    sxy / sxx
}

fn matrix_log_norms(a: &MetzlerGenerator, times: &[f64], norm: &LatticeNorm) -> Result<Option<Vec<(f64, f64)>>> {
    let step = scaled_expm(a, times[1] - times[0])?;
    let mut m = scaled_expm(a, times[0])?;
    let mut out = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        if k > 0 {
            m = step.mul(&m);
        }
        if !m.is_finite() {
            return Ok(None);
        }
        let v = operator_log_norm(&m, norm)?;
        if !v.is_finite() {
            return Ok(None);
        }
        out.push((t, v));
    }
    Ok(Some(out))
}

fn grid_log_norms(handle: &SemigroupHandle, times: &[f64]) -> Result<Option<Vec<(f64, f64)>>> {
    // positive operators: ‖T(t)‖_∞ = ‖T(t)𝟙‖_∞
    let ones = vec![1.0; handle.dim()];
    let values = crate::par::try_map(times, |&t| handle.apply(t, &ones))?;
    let mut out = Vec::with_capacity(times.len());
    for (&t, v) in times.iter().zip(values) {
        let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !(m > 0.0 && m.is_finite()) {
            return Ok(None);
        }
        out.push((t, m.ln()));
    }
    Ok(Some(out))
}

/// Least-squares slope of `log ‖T(t)‖` on `n_points` equispaced times in `[t1, t2]`.
///
/// Matrix handles support the sup, ℓ¹ and ℓ² operator norms; grid handles
/// the sup norm. If the norm leaves floating-point range the window is
/// halved until it does not.
pub fn growth_bound_fit(
    handle: &SemigroupHandle,
    t1: f64,
    t2: f64,
    n_points: usize,
    norm: &LatticeNorm,
) -> Result<SpectralReport> {
    if !(t1 > 0.0 && t2 > t1 && t2.is_finite()) {
        return Err(Error::param("t1/t2", format!("need 0 < t1 < t2 < ∞, got [{t1}, {t2}]")));
    }
    if n_points < 2 {
        return Err(Error::param("n_points", "need at least 2 points"));
    }
    if handle.grid().is_some() && !matches!(norm.kind(), NormKind::Sup) {
        return Err(Error::Unsupported("grid handles fit the sup operator norm only".into()));
    }
    let (s_a, defective) = match handle {
        SemigroupHandle::Matrix(a) => (Some(spectral_bound(a)?), spectral_gap(a)? < DEFECTIVE_GAP),
        _ => (None, false),
    };
    let (mut lo, mut hi) = (t1, t2);
    let mut shrinks = 0;
    loop {
        let times: Vec<f64> = (0..n_points).map(|k| lo + (hi - lo) * k as f64 / (n_points - 1) as f64).collect();
        let samples = match handle {
            SemigroupHandle::Matrix(a) => matrix_log_norms(a, &times, norm)?,
            _ => grid_log_norms(handle, &times)?,
        };
        match samples {
            Some(samples) => {
                let omega_fit = least_squares_slope(&samples);
                return Ok(SpectralReport {
                    s_a,
                    omega_fit,
                    fit_window: [lo, hi],
                    requested_window: [t1, t2],
                    discrepancy: s_a.map(|s| (s - omega_fit).abs()),
                    shrinks,
                    defective,
                    samples,
                });
            }
            None if shrinks < MAX_SHRINKS => {
                shrinks += 1;
                lo *= 0.5;
                hi *= 0.5;
            }
            None => return Err(Error::NoConvergence { iterations: shrinks as usize }),
        }
    }
}

/// [`growth_bound_fit`] on the gap-based default window.
pub fn growth_bound_fit_default(a: &MetzlerGenerator, n_points: usize, norm: &LatticeNorm) -> Result<SpectralReport> {
    let (t1, t2, _) = default_fit_window(a)?;
    growth_bound_fit(&SemigroupHandle::Matrix(a.clone()), t1, t2, n_points, norm)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitNormEntry {
    pub t: f64,
    /// `max_i (e^{tA}x - R(0,A)z)_i^+`.
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitNormReport {
    pub spectral_bound: f64,
    /// Largest `(T(s)x - z)^+` over the sampled `s ∈ [0, 1]`.
    pub precondition_violation: f64,
    pub resolvent_z: LatticeVector,
    pub threshold: f64,
    pub entries: Vec<OrbitNormEntry>,
    pub certified: bool,
}

/// For `0 ≤ T(s)x ≤ z` on `[0, 1]`, checks `T(t)x ≤ R(0,A)z` at the given `t ≥ 1`.
pub fn orbit_bound_to_norm_bound(
    a: &MetzlerGenerator,
    x: &LatticeVector,
    z: &LatticeVector,
    ts: &[f64],
) -> Result<OrbitNormReport> {
    check_dim(a.dim(), x.len())?;
    check_dim(a.dim(), z.len())?;
    if !x.is_nonnegative() || !z.is_nonnegative() {
        return Err(Error::InvalidInput("x and z must be nonnegative".into()));
    }
    if let Some(&t) = ts.iter().find(|&&t| !(t >= 1.0 && t.is_finite())) {
        return Err(Error::param("ts", format!("times must be finite and ≥ 1, got {t}")));
    }
    let s = spectral_bound(a)?;
    if s >= 0.0 {
        return Err(Error::NeedsRescaling { spectral_bound: s, shift: s + 1.0 });
    }
    let threshold = 1e-9 * (1.0 + z.max_abs());
    let grid = TimeGrid::log_spaced(1e-8, 1.0, DEFAULT_TIME_POINTS)?;
    let pre = crate::par::try_map(grid.times(), |&t| {
        let y = mat_vec(&expm(a, t)?, x)?;
        Ok::<_, Error>((t, y.sub(z)?.pos_part().max_abs()))
    })?;
    let (worst_s, precondition_violation) = pre.iter().copied().fold((0.0, 0.0), |m, p| if p.1 > m.1 { p } else { m });
    if precondition_violation > threshold {
        return Err(Error::Precondition(format!(
            "T(s)x ≤ z fails at s = {worst_s} by {precondition_violation:e}"
        )));
    }
    let resolvent_z = resolvent_apply(a, z)?;
    let entries = crate::par::try_map(ts, |&t| {
        let y = mat_vec(&expm(a, t)?, x)?;
        Ok::<_, Error>(OrbitNormEntry { t, violation: y.sub(&resolvent_z)?.pos_part().max_abs() })
    })?;
    let certified = entries.iter().all(|e| e.violation <= threshold);
    Ok(OrbitNormReport { spectral_bound: s, precondition_violation, resolvent_z, threshold, entries, certified })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(rows: &[[f64; 2]]) -> MetzlerGenerator {
        MetzlerGenerator::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn spectral_bound_examples() {
        let cases = [
            (gen(&[[-1.0, 0.0], [0.0, -2.0]]), -1.0),
            (gen(&[[-2.0, 1.0], [1.0, -2.0]]), -1.0),
            (gen(&[[0.0, 1.0], [1.0, 0.0]]), 1.0),
        ];
        for (a, s) in cases {
            assert!((spectral_bound(&a).unwrap() - s).abs() < 1e-14);
            assert!((perron_bound(&a) - s).abs() < 1e-12);
        }
        assert!((spectral_gap(&gen(&[[-2.0, 1.0], [1.0, -2.0]])).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn growth_fit_examples() {
        let h = SemigroupHandle::Matrix(gen(&[[-1.0, 0.0], [0.0, -1.0]]));
        let rep = growth_bound_fit(&h, 1.0, 5.0, 20, &LatticeNorm::sup()).unwrap();
        assert!((rep.omega_fit + 1.0).abs() < 1e-6);

        let a = gen(&[[-2.0, 1.0], [1.0, -2.0]]);
        let rep = growth_bound_fit_default(&a, 40, &LatticeNorm::l1()).unwrap();
        assert!((rep.fit_window[0] - 10.0).abs() < 1e-10 && (rep.fit_window[1] - 20.0).abs() < 1e-10);
        assert!(rep.discrepancy.unwrap() < 1e-6);

        let jordan = gen(&[[-1.0, 1.0], [0.0, -1.0]]);
        let (t1, t2, defective) = default_fit_window(&jordan).unwrap();
        assert!(defective);
        for norm in [LatticeNorm::sup(), LatticeNorm::l1(), LatticeNorm::l2()] {
            let rep = growth_bound_fit(&SemigroupHandle::Matrix(jordan.clone()), t1, t2, 50, &norm).unwrap();
            assert!(rep.defective);
            assert!((rep.omega_fit + 1.0).abs() <= 2.0 * t2.ln() / (t2 - t1), "{}", rep.omega_fit);
        }
    }

    #[test]
    fn long_windows_do_not_underflow() {
        let a = gen(&[[-5.0, 0.5], [0.1, -3.0]]);
        let rep = growth_bound_fit(&SemigroupHandle::Matrix(a.clone()), 500.0, 900.0, 30, &LatticeNorm::sup()).unwrap();
        assert_eq!(rep.shrinks, 0);
        assert!(rep.discrepancy.unwrap() < 1e-8);
    }

    #[test]
    fn overflow_shrinks_the_window() {
        let a = gen(&[[1e300, 0.0], [0.0, 0.0]]);
        let rep = growth_bound_fit(&SemigroupHandle::Matrix(a), 1.0, 2.0, 5, &LatticeNorm::sup());
        match rep {
            Ok(r) => assert!(r.shrinks > 0),
            Err(e) => assert!(e.is_numerical()),
        }
    }

    #[test]
    fn orbit_norm_examples() {
        let a = gen(&[[-1.0, 0.0], [0.0, -1.0]]);
        let zero = orbit_bound_to_norm_bound(&a, &LatticeVector::zeros(2), &LatticeVector::zeros(2), &[1.0, 5.0]).unwrap();
        assert!(zero.certified && zero.entries.iter().all(|e| e.violation == 0.0));

        let ones = LatticeVector::constant(2, 1.0);
        let rep = orbit_bound_to_norm_bound(&a, &ones, &ones, &[1.0, 2.0, 10.0]).unwrap();
        assert!(rep.certified);

        let too_small = LatticeVector::constant(2, 0.5);
        assert!(matches!(orbit_bound_to_norm_bound(&a, &ones, &too_small, &[1.0]), Err(Error::Precondition(_))));
        assert!(orbit_bound_to_norm_bound(&a, &ones, &ones, &[0.5]).is_err());
    }
}
