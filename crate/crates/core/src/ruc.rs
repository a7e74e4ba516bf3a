//! Order bounds of orbits, the domain regulators `R(0,A)|Ay|` and
//! `t·R(0,A)|A²y|`, and the sampled certification of the four equivalent
//! characterizations of relatively uniform continuity.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{common_regulator, first_certified, ru_eps, LatticeNorm, LatticeVector, Regulator, RuVerdict};
use crate::schedule::{Schedule, TimeGrid, DEFAULT_TIME_POINTS};
use crate::semigroup::{expm, mat_vec, resolvent, Boundary, HeatGrid, MetzlerGenerator, SemigroupHandle};
use crate::spectral::spectral_bound;

/// Relative change of an orbit bound under time-grid doubling above which
/// the bound is considered unresolved.
pub const STABILITY_THRESHOLD: f64 = 1e-3;

/// Default ε targets for sampled ru certification.
pub const DEFAULT_EPS_TARGETS: [f64; 3] = [1e-1, 1e-2, 1e-3];

const DOMINATION_TIMES: usize = 200;
const APPROXIMANTS: usize = 4;
const SMOOTHNESS_TOL: f64 = 1e-3;

/// Pointwise supremum of `|T(t)x|` over a sampled time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitBound {
    pub y: LatticeVector,
    pub t0: f64,
    pub time_grid: TimeGrid,
    /// `‖y‖_sup`.
    pub norm_of_bound: f64,
    /// `‖y_fine - y‖_sup / ‖y_fine‖_sup` with `y_fine` over the doubled grid.
    pub stability: f64,
    pub under_resolved: bool,
    pub max_snap_distance: f64,
}

impl OrbitBound {
    pub fn is_stable(&self) -> bool {
        self.y.is_finite() && self.stability <= STABILITY_THRESHOLD
    }
}

/// `{0} ∪` 256 log-spaced times in `[t_min, t0]` (`t_min` from the handle),
/// or every grid multiple of the spacing for the shift.
pub fn default_time_grid(handle: &SemigroupHandle, t0: f64) -> Result<TimeGrid> {
    match handle {
        SemigroupHandle::Shift(s) => {
            let steps = (t0 / s.grid().spacing()).round().max(1.0) as usize;
            TimeGrid::uniform(t0, steps)
        }
        _ => TimeGrid::log_spaced(handle.natural_t_min(t0), t0, DEFAULT_TIME_POINTS),
    }
}

fn abs_orbit_max(handle: &SemigroupHandle, x: &[f64], times: &[f64]) -> Result<(Vec<f64>, bool, f64)> {
    let applied = crate::par::try_map(times, |&t| handle.apply_with_diagnostics(t, x))?;
    let mut y = vec![0.0f64; x.len()];
    let mut under = false;
    let mut snap = 0.0f64;
    for (v, d) in &applied {
        for (a, b) in y.iter_mut().zip(v) {
            *a = f64::max(*a, b.abs());
        }
        under |= d.under_resolved;
        snap = snap.max(d.snap_distance);
    }
    Ok((y, under, snap))
}

/// Maximal function `y = max_t |T(t)x|` over `grid`, with refinement stability.
pub fn maximal_function(handle: &SemigroupHandle, x: &LatticeVector, grid: &TimeGrid) -> Result<OrbitBound> {
    check_dim(handle.dim(), x.len())?;
    let (y, under_resolved, snap) = abs_orbit_max(handle, x.as_slice(), grid.times())?;
    let (mid, _, _) = abs_orbit_max(handle, x.as_slice(), &grid.midpoints())?;
    let fine: Vec<f64> = y.iter().zip(&mid).map(|(a, b)| a.max(*b)).collect();
    let fine_norm = fine.iter().fold(0.0f64, |m, v| m.max(*v));
    let change = y.iter().zip(&fine).fold(0.0f64, |m, (a, b)| m.max(b - a));
    let stability = if fine_norm > 0.0 { change / fine_norm } else { 0.0 };
    let y = LatticeVector::new(y);
    Ok(OrbitBound {
        norm_of_bound: y.max_abs(),
        y,
        t0: grid.horizon(),
        time_grid: grid.clone(),
        stability,
        under_resolved,
        max_snap_distance: snap,
    })
}

/// Shift `ω = s(A) + 1` the caller should subtract before retrying.
fn require_negative_bound(a: &MetzlerGenerator) -> Result<f64> {
    let s = spectral_bound(a)?;
    if s >= 0.0 {
        return Err(Error::NeedsRescaling { spectral_bound: s, shift: s + 1.0 });
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainRegulator {
    pub y: LatticeVector,
    /// `z = R(0,A)|Ay|`.
    pub z: LatticeVector,
    /// `max_t max_i (|e^{tA}y| - z)_i^+` over the tested times.
    pub max_violation: f64,
    pub threshold: f64,
    pub dominated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainRegulatorReport {
    pub spectral_bound: f64,
    pub times: Vec<f64>,
    pub regulators: Vec<DomainRegulator>,
}

impl DomainRegulatorReport {
    pub fn all_dominated(&self) -> bool {
        self.regulators.iter().all(|r| r.dominated)
    }
}

/// `z = R(0,A)|Ay|` for each `y`, with `|e^{tA}y| ≤ z` checked at `t = 0` and
/// 199 log-spaced times in `[10^{-6}·T, T]`, `T = 100/|s(A)|`.
pub fn regulator_from_dom_a(a: &MetzlerGenerator, ys: &[LatticeVector]) -> Result<DomainRegulatorReport> {
    for y in ys {
        check_dim(a.dim(), y.len())?;
    }
    let s = require_negative_bound(a)?;
    let horizon = 100.0 / s.abs();
    let grid = TimeGrid::log_spaced(1e-6 * horizon, horizon, DOMINATION_TIMES - 1)?;
    let maps = crate::par::try_map(grid.times(), |&t| expm(a, t))?;
    let r = resolvent(a, 0.0)?;
    let regulators = ys
        .iter()
        .map(|y| {
            let z = mat_vec(&r, &a.apply(y)?.abs())?;
            let threshold = 1e-9 * (1.0 + z.max_abs());
            let mut max_violation = 0.0f64;
            for m in &maps {
                let orbit = mat_vec(m, y)?.abs();
                max_violation = max_violation.max(orbit.sub(&z)?.pos_part().max_abs());
            }
            Ok(DomainRegulator { y: y.clone(), z, max_violation, threshold, dominated: max_violation <= threshold })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DomainRegulatorReport { spectral_bound: s, times: grid.times().to_vec(), regulators })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub t: f64,
    /// `max_i (|e^{tA}y - y| - t·R(0,A)|A²y|)_i^+`.
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub spectral_bound: f64,
    /// `R(0,A)|A²y|`.
    pub rate: LatticeVector,
    pub threshold: f64,
    pub entries: Vec<RateEntry>,
    pub max_violation: f64,
    pub certified: bool,
}

/// Checks `|e^{tA}y - y| ≤ t·R(0,A)|A²y|` at each `t` in `ts`.
pub fn rate_dom_a2(a: &MetzlerGenerator, y: &LatticeVector, ts: &[f64]) -> Result<RateReport> {
    let maps = crate::par::try_map(ts, |&t| expm(a, t))?;
    rate_dom_a2_with(a, y, ts, &maps)
}

/// [`rate_dom_a2`] with precomputed `e^{tA}` for each `t` in `ts`.
pub fn rate_dom_a2_with(
    a: &MetzlerGenerator,
    y: &LatticeVector,
    ts: &[f64],
    maps: &[nalgebra::DMatrix<f64>],
) -> Result<RateReport> {
    check_dim(a.dim(), y.len())?;
    check_dim(ts.len(), maps.len())?;
    let s = require_negative_bound(a)?;
    let rate = mat_vec(&resolvent(a, 0.0)?, &a.apply(&a.apply(y)?)?.abs())?;
    let threshold = 1e-9 * (1.0 + y.max_abs());
    let entries = ts
        .iter()
        .zip(maps)
        .map(|(&t, m)| {
            let diff = mat_vec(m, y)?.sub(y)?.abs();
            Ok(RateEntry { t, violation: diff.sub(&rate.scale(t))?.pos_part().max_abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_violation = entries.iter().map(|e| e.violation).fold(0.0, f64::max);
    Ok(RateReport { spectral_bound: s, rate, threshold, entries, max_violation, certified: max_violation <= threshold })
}

/// [`regulator_from_dom_a`] for a single `y`, reusing the same times.
pub fn regulator_from_dom_a_single(a: &MetzlerGenerator, y: &LatticeVector) -> Result<DomainRegulator> {
    Ok(regulator_from_dom_a(a, std::slice::from_ref(y))?.regulators.remove(0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    NotCertified,
    /// Follows from a certified stronger condition.
    Implied,
}

impl Verdict {
    pub fn holds(self) -> bool {
        !matches!(self, Verdict::NotCertified)
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Certified
        } else {
            Verdict::NotCertified
        }
    }
}

/// Verdicts for (i) ru-continuity, (ii) order continuity, (iii) local order
/// boundedness of orbits, (iv) order boundedness on every finite interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conditions {
    pub i: Verdict,
    pub ii: Verdict,
    pub iii: Verdict,
    pub iv: Verdict,
}

impl Conditions {
    pub fn all_hold(&self) -> bool {
        self.i.holds() && self.ii.holds() && self.iii.holds() && self.iv.holds()
    }

    fn meet(self, other: Conditions) -> Conditions {
        let m = |a: Verdict, b: Verdict| if a.holds() && b.holds() { a } else { Verdict::NotCertified };
        Conditions { i: m(self.i, other.i), ii: m(self.ii, other.ii), iii: m(self.iii, other.iii), iv: m(self.iv, other.iv) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetVerdict {
    pub eps: f64,
    pub verdict: RuVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleCertificate {
    pub conditions: Conditions,
    /// Whether `x` itself served as its approximating sequence.
    pub smooth: bool,
    /// `‖x_n - x‖_sup` for the approximants used.
    pub approximation_errors: Vec<f64>,
    /// Common regulator `u` of the approximant convergences.
    pub common_regulator: LatticeVector,
    pub common_tail_bound: f64,
    /// Final regulator `v + 2u`.
    pub regulator: LatticeVector,
    pub regulator_norm: f64,
    /// `(t, ru_eps(T(t)x, x, v + 2u))` along decreasing `t`.
    pub eps_schedule: Vec<(f64, f64)>,
    pub targets: Vec<TargetVerdict>,
    /// Orbit bound of `x` on `[0, t0]`.
    pub orbit: OrbitBound,
    /// Stability of the orbit bound of `x` on `[0, 4·t0]`.
    pub extended_stability: f64,
    /// Stability of the orbit bound `v` of the regulator `u` (horizon `t0`).
    pub regulator_orbit_stability: f64,
    /// `sup_{t ≤ t0} ε(t)`.
    pub eps_star: f64,
    /// Sampled `t` and coordinates where `|T(t)x| ≤ ε*·(v + 2u) + |x|` fails.
    pub implication_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RucCertificate {
    pub conditions: Conditions,
    /// (iii) ⇒ (i) and (i) ⇒ order bound hold on every sample.
    pub consistent: bool,
    /// Coordinatewise max of the per-sample regulators, with the worst ε per time.
    pub regulator: Regulator,
    pub stability: f64,
    pub t0: f64,
    /// Decreasing sample times used for the ru test.
    pub schedule: Vec<f64>,
    pub samples: Vec<SampleCertificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyOptions {
    pub eps_targets: Vec<f64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { eps_targets: DEFAULT_EPS_TARGETS.to_vec() }
    }
}

/// Decreasing union of the schedule (up to `t0`) and the positive grid times.
fn certification_times(schedule: &Schedule, grid: &TimeGrid, t0: f64) -> Vec<f64> {
    let mut times: Vec<f64> = schedule.up_to(t0);
    times.extend(grid.times().iter().copied().filter(|&t| t > 0.0));
    times.sort_by(|a, b| b.total_cmp(a));
    times.dedup();
    times
}

/// `x` itself when it is smooth at grid scale, otherwise heat-mollified
/// approximants `x_n = H(h²·2^{2-n})x`, `n = 1..4`.
fn approximants(handle: &SemigroupHandle, x: &LatticeVector) -> Result<(bool, Vec<LatticeVector>)> {
    let Some(grid) = handle.grid() else {
        return Ok((true, vec![x.clone()]));
    };
    let boundary = match handle {
        SemigroupHandle::Heat(h) => h.boundary(),
        _ => Boundary::Periodic,
    };
    let heat = HeatGrid::new(*grid, boundary)?;
    let h2 = grid.spacing() * grid.spacing();
    let probe = LatticeVector::new(heat.apply(h2, x.as_slice())?);
    if probe.sub(x)?.max_abs() <= SMOOTHNESS_TOL * x.max_abs() {
        return Ok((true, vec![x.clone()]));
    }
    let xs = (1..=APPROXIMANTS)
        .map(|n| Ok(LatticeVector::new(heat.apply(h2 * 2f64.powi(2 - n as i32), x.as_slice())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((false, xs))
}

fn certify_sample(
    handle: &SemigroupHandle,
    x: &LatticeVector,
    t0: f64,
    grid: &TimeGrid,
    times: &[f64],
    opts: &CertifyOptions,
) -> Result<SampleCertificate> {
    let sup = LatticeNorm::sup();
    let orbit = maximal_function(handle, x, grid)?;
    let extended = maximal_function(handle, x, &default_time_grid(handle, 4.0 * t0)?)?;

    let (smooth, xs) = approximants(handle, x)?;
    let mut regulators = Vec::with_capacity(xs.len() + 1);
    for xn in &xs {
        let un = crate::par::max_reduce(times, vec![0.0; x.len()], |&t| {
            match handle.apply(t, xn.as_slice()) {
                Ok(v) => v.iter().zip(xn.iter()).map(|(a, b)| (a - b).abs() / t).collect(),
                Err(_) => vec![f64::NAN; x.len()],
            }
        });
        let un = LatticeVector::new(un);
        if !un.is_finite() {
            return Err(Error::InvalidInput("semigroup produced non-finite values".into()));
        }
        let norm = sup.norm(&un)?;
        regulators.push((un, norm));
    }
    let diffs = xs.iter().map(|xn| xn.sub(x)).collect::<Result<Vec<_>>>()?;
    let approximation_errors: Vec<f64> = diffs.iter().map(|d| d.max_abs()).collect();
    if approximation_errors.iter().any(|&e| e > 0.0) {
        // |x_n - x| ≤ e_n·d for every n
        let mut d = vec![0.0; x.len()];
        for (diff, &e) in diffs.iter().zip(&approximation_errors) {
            if e > 0.0 {
                for (a, b) in d.iter_mut().zip(diff.iter()) {
                    *a = f64::max(*a, b.abs() / e);
                }
            }
        }
        let d = LatticeVector::new(d);
        let norm = sup.norm(&d)?;
        regulators.push((d, norm));
    }
    let common = common_regulator(x.len(), &regulators)?;
    let u = common.u;
    let v = maximal_function(handle, &u, grid)?;
    let regulator = v.y.add_scaled(2.0, &u)?;

    let images = crate::par::try_map(times, |&t| handle.apply_vector(t, x))?;
    let eps: Vec<f64> = images.iter().map(|img| ru_eps(img, x, &regulator)).collect::<Result<_>>()?;
    let targets: Vec<TargetVerdict> = opts
        .eps_targets
        .iter()
        .map(|&e| TargetVerdict { eps: e, verdict: first_certified(&eps, e, |k| times[k]) })
        .collect();
    let ru_ok = !targets.is_empty() && targets.iter().all(|t| t.verdict.is_certified());

    let eps_star = times.iter().zip(&eps).filter(|(&t, _)| t <= t0).fold(0.0f64, |m, (_, &e)| m.max(e));
    let abs_x = x.abs();
    let mut implication_violations = 0;
    if ru_ok {
        for img in crate::par::try_map(grid.times(), |&t| handle.apply(t, x.as_slice()))? {
            for ((a, b), r) in img.iter().zip(abs_x.iter()).zip(regulator.iter()) {
                let bound = eps_star * r + b;
                if a.abs() > bound + 4.0 * f64::EPSILON * (a.abs() + bound) {
                    implication_violations += 1;
                }
            }
        }
    }

    let iii = orbit.is_stable();
    let iv = iii && extended.is_stable();
    let conditions = Conditions {
        i: Verdict::from_bool(ru_ok),
        ii: if ru_ok { Verdict::Implied } else { Verdict::NotCertified },
        iii: Verdict::from_bool(iii),
        iv: Verdict::from_bool(iv),
    };
    Ok(SampleCertificate {
        conditions,
        smooth,
        approximation_errors,
        common_regulator: u,
        common_tail_bound: common.tail_bound,
        regulator_norm: regulator.max_abs(),
        regulator,
        eps_schedule: times.iter().copied().zip(eps).collect(),
        targets,
        orbit,
        extended_stability: extended.stability,
        regulator_orbit_stability: v.stability,
        eps_star,
        implication_violations,
    })
}

/// Sampled certification of (i)-(iv) for each sample vector, running the
/// order-bound-to-regulator construction with horizon `t_u = t0`.
pub fn certify_theorem21(
    handle: &SemigroupHandle,
    samples: &[LatticeVector],
    t0: f64,
    schedule: &Schedule,
    opts: &CertifyOptions,
) -> Result<RucCertificate> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::param("t0", "must be positive and finite"));
    }
    if samples.is_empty() {
        return Err(Error::Empty("sample list"));
    }
    if let Some(&e) = opts.eps_targets.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::param("eps_targets", format!("targets must be positive, got {e}")));
    }
    for x in samples {
        check_dim(handle.dim(), x.len())?;
    }
    let grid = default_time_grid(handle, t0)?;
    let times = certification_times(schedule, &grid, t0);
    let certs: Vec<SampleCertificate> = samples
        .iter()
        .map(|x| certify_sample(handle, x, t0, &grid, &times, opts))
        .collect::<Result<_>>()?;

    let all = Conditions { i: Verdict::Certified, ii: Verdict::Implied, iii: Verdict::Certified, iv: Verdict::Certified };
    let conditions = certs.iter().fold(all, |acc, c| acc.meet(c.conditions));
    let consistent = certs.iter().all(|c| {
        let forward = !c.conditions.iii.holds() || c.conditions.i.holds();
        forward && c.implication_violations == 0
    });
    let mut u = vec![0.0; handle.dim()];
    for c in &certs {
        for (a, b) in u.iter_mut().zip(c.regulator.iter()) {
            *a = f64::max(*a, *b);
        }
    }
    let u = LatticeVector::new(u);
    let mut eps_schedule = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let mut e = 0.0f64;
        for (x, c) in samples.iter().zip(&certs) {
            let img = handle.apply_vector(t, x)?;
            e = e.max(ru_eps(&img, x, &u)?);
            debug_assert!(c.eps_schedule[k].0 == t);
        }
        eps_schedule.push((t, e));
    }
    let stability = certs.iter().map(|c| c.orbit.stability.max(c.extended_stability)).fold(0.0, f64::max);
    Ok(RucCertificate {
        conditions,
        consistent,
        regulator: Regulator { u, eps_schedule },
        stability,
        t0,
        schedule: times,
        samples: certs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{Grid, GridFunction, ShiftGrid};

    fn gen(rows: &[[f64; 2]]) -> MetzlerGenerator {
        MetzlerGenerator::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn v(x: &[f64]) -> LatticeVector {
        LatticeVector::new(x.to_vec())
    }

    #[test]
    fn maximal_function_examples() {
        let id = SemigroupHandle::identity(3);
        let x = v(&[1.0, -2.0, 0.5]);
        let grid = default_time_grid(&id, 1.0).unwrap();
        assert_eq!(maximal_function(&id, &x, &grid).unwrap().y, x.abs());

        let g = Grid::new(1, 0.5, 16).unwrap();
        let shift = SemigroupHandle::Shift(ShiftGrid::new(g).unwrap());
        let e = LatticeVector::unit(16, 9);
        let grid = default_time_grid(&shift, 1.0).unwrap();
        let ob = maximal_function(&shift, &e, &grid).unwrap();
        assert_eq!(ob.y, LatticeVector::constant(16, 1.0));
        assert_eq!(ob.max_snap_distance, 0.0);
        let half = maximal_function(&shift, &e, &default_time_grid(&shift, 0.25).unwrap()).unwrap();
        let visited: Vec<usize> = (0..16).filter(|&i| half.y[i] == 1.0).collect();
        assert_eq!(visited, vec![5, 6, 7, 8, 9]);
    }

    #[test]
    fn domain_regulator_examples() {
        let rep = regulator_from_dom_a(&gen(&[[-1.0, 0.0], [0.0, -1.0]]), &[v(&[1.0, -2.0]), v(&[0.0, 0.0])]).unwrap();
        assert_eq!(rep.times.len(), 200);
        assert_eq!(rep.regulators[0].z, v(&[1.0, 2.0]));
        assert_eq!(rep.regulators[1].z, v(&[0.0, 0.0]));
        assert_eq!(rep.regulators[1].max_violation, 0.0);
        assert!(rep.all_dominated());

        let r = regulator_from_dom_a_single(&gen(&[[-2.0, 1.0], [1.0, -2.0]]), &v(&[1.0, 0.0])).unwrap();
        assert!((r.z[0] - 5.0 / 3.0).abs() < 1e-15 && (r.z[1] - 4.0 / 3.0).abs() < 1e-15);
        assert!(r.dominated);

        let err = regulator_from_dom_a(&gen(&[[0.0, 1.0], [1.0, 0.0]]), &[v(&[1.0, 0.0])]);
        assert!(matches!(err, Err(Error::NeedsRescaling { shift, .. }) if (shift - 2.0).abs() < 1e-12));
    }

    #[test]
    fn rate_examples() {
        let a = gen(&[[-1.0, 0.0], [0.0, -1.0]]);
        let zero = rate_dom_a2(&a, &v(&[0.0, 0.0]), &[0.1, 1.0]).unwrap();
        assert!(zero.entries.iter().all(|e| e.violation == 0.0));
        let ts: Vec<f64> = (0..50).map(|k| 1e-4 * 1.3f64.powi(k)).collect();
        assert!(rate_dom_a2(&a, &v(&[1.0, 0.0]), &ts).unwrap().certified);
        assert!(rate_dom_a2(&gen(&[[-2.0, 1.0], [1.0, -2.0]]), &v(&[1.0, 0.0]), &[0.1, 1.0, 10.0]).unwrap().certified);
    }

    #[test]
    fn theorem21_matrix_and_zero() {
        let a = gen(&[[-2.0, 1.0], [1.0, -2.0]]);
        let h = SemigroupHandle::Matrix(a);
        let cert =
            certify_theorem21(&h, &[v(&[1.0, -3.0]), v(&[0.2, 0.0])], 1.0, &Schedule::default(), &CertifyOptions::default())
                .unwrap();
        assert!(cert.conditions.all_hold(), "{:?}", cert.conditions);
        assert_eq!(cert.conditions.ii, Verdict::Implied);
        assert!(cert.consistent);

        let zero = certify_theorem21(&h, &[v(&[0.0, 0.0])], 1.0, &Schedule::default(), &CertifyOptions::default()).unwrap();
        assert!(zero.conditions.all_hold());
        assert_eq!(zero.samples[0].regulator, v(&[0.0, 0.0]));

        let id = SemigroupHandle::identity(2);
        let c = certify_theorem21(&id, &[v(&[1.0, 2.0])], 1.0, &Schedule::default(), &CertifyOptions::default()).unwrap();
        assert!(c.conditions.all_hold());
    }

    #[test]
    fn theorem21_heat_bumps() {
        let g = Grid::new(1, 5.0, 256).unwrap();
        let h = SemigroupHandle::Heat(HeatGrid::new(g, Boundary::Periodic).unwrap());
        let samples: Vec<LatticeVector> =
            [-1.0, 0.0, 1.5].iter().map(|&c| GridFunction::bump(g, c, 0.5).to_vector()).collect();
        let cert = certify_theorem21(&h, &samples, 1.0, &Schedule::default(), &CertifyOptions::default()).unwrap();
        assert!(cert.conditions.all_hold(), "{:?}", cert.conditions);
        assert!(cert.consistent);
        assert!(cert.samples.iter().all(|s| s.regulator_norm.is_finite() && s.regulator_norm > 0.0));
    }

    #[test]
    fn certificate_json_fields() {
        let h = SemigroupHandle::identity(2);
        let cert = certify_theorem21(&h, &[v(&[1.0, 0.0])], 1.0, &Schedule::dyadic(4), &CertifyOptions::default()).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        for key in ["conditions", "regulator", "stability"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["conditions"]["ii"], "implied");
        assert!(json["regulator"]["eps_schedule"].is_array());
    }
}
