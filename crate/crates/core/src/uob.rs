//! The order-bound norm on finite families, its series bound, estimation of
//! uniform order boundedness constants, and the heat / shift maximal
//! function experiments.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{LatticeNorm, LatticeVector, NormKind};
use crate::ruc::{default_time_grid, maximal_function};
use crate::schedule::{TimeGrid, DEFAULT_TIME_POINTS};
use crate::semigroup::{Boundary, Grid, GridFunction, HeatGrid, SemigroupHandle, ShiftGrid};

/// A finite family `u(I)` of vectors over a common coordinate set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<LatticeVector>", into = "Vec<LatticeVector>")]
pub struct ObFamily {
    members: Vec<LatticeVector>,
}

impl ObFamily {
    pub fn new(members: Vec<LatticeVector>) -> Result<Self> {
        let first = members.first().ok_or(Error::Empty("family"))?;
        for m in &members {
            check_dim(first.len(), m.len())?;
        }
        Ok(ObFamily { members })
    }

    pub fn members(&self) -> &[LatticeVector] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].len()
    }

    /// Pointwise supremum of `|members|`, the minimal order bound.
    pub fn order_bound(&self) -> LatticeVector {
        let mut y = vec![0.0f64; self.dim()];
        for m in &self.members {
            for (a, b) in y.iter_mut().zip(m.iter()) {
                *a = a.max(b.abs());
            }
        }
        LatticeVector::new(y)
    }

    /// Memberwise sum; both families must be indexed by the same set.
    pub fn add(&self, other: &ObFamily) -> Result<ObFamily> {
        check_dim(self.members.len(), other.members.len())?;
        let members = self.members.iter().zip(&other.members).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        ObFamily::new(members)
    }

    pub fn sub(&self, other: &ObFamily) -> Result<ObFamily> {
        check_dim(self.members.len(), other.members.len())?;
        let members = self.members.iter().zip(&other.members).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        ObFamily::new(members)
    }

    pub fn scale(&self, c: f64) -> ObFamily {
        ObFamily { members: self.members.iter().map(|m| m.scale(c)).collect() }
    }
}

impl TryFrom<Vec<LatticeVector>> for ObFamily {
    type Error = Error;

    fn try_from(v: Vec<LatticeVector>) -> Result<Self> {
        ObFamily::new(v)
    }
}

impl From<ObFamily> for Vec<LatticeVector> {
    fn from(f: ObFamily) -> Self {
        f.members
    }
}

/// `(‖y*‖, y*)` with `y*` the pointwise supremum of `|members|`.
pub fn ob_norm(fam: &ObFamily, norm: &LatticeNorm) -> Result<(f64, LatticeVector)> {
    let y = fam.order_bound();
    Ok((norm.norm(&y)?, y))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObSupComparison {
    pub supnorm: f64,
    pub obnorm: f64,
    pub holds: bool,
}

/// `max_i ‖u(i)‖` against `‖u‖_ob`.
pub fn ob_vs_sup_inequality(fam: &ObFamily, norm: &LatticeNorm) -> Result<ObSupComparison> {
    let supnorm = fam.members.iter().map(|m| norm.norm(m)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    let obnorm = ob_norm(fam, norm)?.0;
    Ok(ObSupComparison { supnorm, obnorm, holds: supnorm <= obnorm + 1e-12 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObSeriesReport {
    pub truncation: usize,
    /// `‖y_n‖` for each term.
    pub term_bound_norms: Vec<f64>,
    /// `‖y‖` for `y = Σ y_n`.
    pub bound_norm: f64,
    /// `‖u - Σ_{n≤N} u_n‖_ob`.
    pub tail_obnorm: f64,
    /// `‖z_N‖` for `z_N = Σ_{n>N} y_n`.
    pub z_norm: f64,
    pub holds: bool,
}

/// Sums the list `u_1, …, u_K` memberwise and checks the truncation bound
/// `‖u - Σ_{n≤N} u_n‖_ob ≤ ‖z_N‖`.
pub fn ob_series(terms: &[ObFamily], norm: &LatticeNorm, truncation: usize) -> Result<ObSeriesReport> {
    let first = terms.first().ok_or(Error::Empty("series"))?;
    for t in terms {
        check_dim(first.members.len(), t.members.len())?;
        check_dim(first.dim(), t.dim())?;
    }
    if truncation == 0 || truncation > terms.len() {
        return Err(Error::param("truncation", format!("need 1 ≤ N ≤ {}", terms.len())));
    }
    let bounds: Vec<LatticeVector> = terms.iter().map(|t| t.order_bound()).collect();
    let term_bound_norms = bounds.iter().map(|y| norm.norm(y)).collect::<Result<Vec<_>>>()?;
    let sum_vec = |vs: &[LatticeVector]| -> Result<LatticeVector> {
        vs.iter().try_fold(LatticeVector::zeros(first.dim()), |acc, v| acc.add(v))
    };
    let y = sum_vec(&bounds)?;
    let z = sum_vec(&bounds[truncation..])?;
    let sum_fam = |ts: &[ObFamily]| -> Result<ObFamily> {
        ts.iter().skip(1).try_fold(ts[0].clone(), |acc, t| acc.add(t))
    };
    let u = sum_fam(terms)?;
    let partial = sum_fam(&terms[..truncation])?;
    let tail_obnorm = ob_norm(&u.sub(&partial)?, norm)?.0;
    let z_norm = norm.norm(&z)?;
    Ok(ObSeriesReport {
        truncation,
        term_bound_norms,
        bound_norm: norm.norm(&y)?,
        tail_obnorm,
        z_norm,
        holds: tail_obnorm <= z_norm + 1e-12,
    })
}

/// The operators whose common order bound is estimated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorFamily {
    /// Square matrices, each given as a list of rows.
    Matrices(#[serde(with = "row_major")] Vec<DMatrix<f64>>),
    Semigroup { handle: SemigroupHandle, times: Vec<f64> },
}

mod row_major {
    use nalgebra::DMatrix;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ms: &[DMatrix<f64>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Vec<f64>>> =
            ms.iter().map(|m| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()).collect();
        s.collect_seq(rows)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DMatrix<f64>>, D::Error> {
        let raw = Vec::<Vec<Vec<f64>>>::deserialize(d)?;
        raw.into_iter()
            .map(|rows| {
                let n = rows.len();
                if n == 0 || rows.iter().any(|r| r.len() != n) {
                    return Err(D::Error::custom("each matrix must be a non-empty square list of rows"));
                }
                Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
            })
            .collect()
    }
}

impl OperatorFamily {
    pub fn dim(&self) -> Result<usize> {
        match self {
            OperatorFamily::Matrices(ms) => {
                let m = ms.first().ok_or(Error::Empty("operator family"))?;
                for t in ms {
                    if t.nrows() != m.nrows() || t.ncols() != m.nrows() {
                        return Err(Error::InvalidInput("operators must be square and of equal size".into()));
                    }
                }
                Ok(m.nrows())
            }
            OperatorFamily::Semigroup { handle, times } => {
                if times.is_empty() {
                    return Err(Error::Empty("time list"));
                }
                Ok(handle.dim())
            }
        }
    }

    /// `sup_i |T_i x|`.
    pub fn sup_abs(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0f64; x.len()];
        let mut absorb = |v: &[f64]| {
            for (a, b) in y.iter_mut().zip(v) {
                *a = a.max(b.abs());
            }
        };
        match self {
            OperatorFamily::Matrices(ms) => {
                let xv = nalgebra::DVector::from_column_slice(x);
                for m in ms {
                    absorb((m * &xv).as_slice());
                }
            }
            OperatorFamily::Semigroup { handle, times } => {
                for &t in times {
                    absorb(&handle.apply(t, x)?);
                }
            }
        }
        Ok(y)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSpec {
    pub budget: usize,
    pub seed: u64,
    pub batch_size: usize,
    /// Share of the budget reserved for coordinate-ascent polish.
    pub polish_fraction: f64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec { budget: 10_000, seed: 0, batch_size: 256, polish_fraction: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UobEstimate {
    pub m_lower: f64,
    pub witness: LatticeVector,
    pub method: SamplingSpec,
    pub n_evals: usize,
    /// Whether all sign vectors were enumerated (sup input, `n ≤ 10`).
    pub exhaustive_signs: bool,
    /// `(evaluations so far, running max)` after each stage.
    pub trace: Vec<(usize, f64)>,
    /// Running max unchanged (relative `1e-9`) over the second half of the trace.
    pub converged: bool,
}

struct Objective<'a> {
    ops: &'a OperatorFamily,
    n_in: &'a LatticeNorm,
    n_out: &'a LatticeNorm,
}

impl Objective<'_> {
    fn normalize(&self, x: &mut [f64]) -> Result<bool> {
        let n = self.n_in.norm_slice(x)?;
        if !(n > 0.0 && n.is_finite()) {
            return Ok(false);
        }
        x.iter_mut().for_each(|v| *v /= n);
        Ok(true)
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let num = self.n_out.norm_slice(&self.ops.sup_abs(x)?)?;
        Ok(num / self.n_in.norm_slice(x)?)
    }
}

/// Larger value first, then lexicographically larger witness.
fn better(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| {
        b.1.iter().zip(&a.1).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    })
}

fn best_of(cands: impl IntoIterator<Item = (f64, Vec<f64>)>) -> Option<(f64, Vec<f64>)> {
    cands.into_iter().filter(|c| c.0.is_finite()).min_by(better)
}

/// Lower bound for `sup_{‖x‖_in = 1} ‖sup_i |T_i x|‖_out` by seeded search.
///
/// Candidates are the scaled unit vectors, all sign vectors when the input
/// norm is sup and `n ≤ 10`, and batches of normalized Gaussian directions
/// (batch `b` draws from ChaCha stream `b`); the best is polished by
/// coordinate ascent. Batches are merged by value, ties by witness.
pub fn uob_constant(
    ops: &OperatorFamily,
    n_in: &LatticeNorm,
    n_out: &LatticeNorm,
    spec: &SamplingSpec,
    polish: bool,
) -> Result<UobEstimate> {
    if spec.budget == 0 {
        return Err(Error::param("budget", "must be at least 1"));
    }
    if spec.batch_size == 0 {
        return Err(Error::param("batch_size", "must be at least 1"));
    }
    let n = ops.dim()?;
    let obj = Objective { ops, n_in, n_out };
    let mut evals = 0usize;
    let mut trace = Vec::new();
    let polish_budget = if polish { (spec.budget as f64 * spec.polish_fraction.clamp(0.0, 1.0)) as usize } else { 0 };
    let mut remaining = spec.budget - polish_budget.min(spec.budget - 1);

    let mut structured: Vec<Vec<f64>> = (0..n).map(|i| LatticeVector::unit(n, i).into_vec()).collect();
    let exhaustive_signs = matches!(n_in.kind(), NormKind::Sup) && n <= 10;
    if exhaustive_signs {
        structured.extend((0..1usize << n).map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect()));
    }
    structured.truncate(remaining);
    let scored = crate::par::try_map(&structured, |x| {
        let mut x = x.clone();
        obj.normalize(&mut x)?;
        Ok::<_, Error>((obj.value(&x)?, x))
    })?;
    evals += scored.len();
    remaining -= scored.len();
    let mut best = best_of(scored).ok_or(Error::Empty("candidate set"))?;
    trace.push((evals, best.0));

    let batches: Vec<(u64, usize)> = (0..remaining.div_ceil(spec.batch_size))
        .map(|b| (b as u64, spec.batch_size.min(remaining - b * spec.batch_size)))
        .collect();
    let batch_best = crate::par::try_map(&batches, |&(b, size)| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(b);
        let mut out: Option<(f64, Vec<f64>)> = None;
        for _ in 0..size {
            let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            if !obj.normalize(&mut x)? {
                continue;
            }
            let c = (obj.value(&x)?, x);
            if out.as_ref().is_none_or(|o| better(&c, o).is_lt()) {
                out = Some(c);
            }
        }
        Ok::<_, Error>(out)
    })?;
    for (cand, &(_, size)) in batch_best.into_iter().zip(&batches) {
        evals += size;
        if let Some(c) = cand {
            if better(&c, &best).is_lt() {
                best = c;
            }
        }
        trace.push((evals, best.0));
    }

    if polish_budget > 0 {
        let mut step = 0.5;
        let mut used = 0;
        while used < polish_budget && step > 1e-12 {
            let mut improved = false;
            for i in 0..n {
                for sign in [1.0, -1.0] {
                    if used >= polish_budget {
                        break;
                    }
                    let mut x = best.1.clone();
                    x[i] += sign * step;
                    used += 1;
                    if !obj.normalize(&mut x)? {
                        continue;
                    }
                    let c = (obj.value(&x)?, x);
                    if c.0 > best.0 {
                        best = c;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        evals += used;
        trace.push((evals, best.0));
    }

    let witness = LatticeVector::new(best.1);
    let m_lower = obj.value(witness.as_slice())?;
    let half = trace.len() / 2;
    let converged = trace[half..].iter().all(|&(_, v)| (m_lower - v) <= 1e-9 * m_lower.abs().max(1e-300));
    Ok(UobEstimate { m_lower, witness, method: spec.clone(), n_evals: evals, exhaustive_signs, trace, converged })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub sigma: f64,
    pub p: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTable {
    pub grid: Grid,
    pub t0: f64,
    pub rows: Vec<RatioRow>,
    /// Largest refinement-stability value among the orbit bounds.
    pub stability: f64,
    pub p1_strictly_increasing: bool,
    /// Last over first `p = 1` ratio.
    pub p1_growth: f64,
    /// Max over min `p = 2` ratio.
    pub p2_spread: f64,
}

/// `‖M f_σ‖_p / ‖f_σ‖_p` for unit-mass indicator spikes `f_σ`, `M` the heat
/// maximal function on `[0, t0]`, `p ∈ {1, 2}`.
pub fn heat_l1_divergence(grid: Grid, sigmas: &[f64], t0: f64) -> Result<DivergenceTable> {
    grid.validate()?;
    if grid.d != 1 {
        return Err(Error::Unsupported("the divergence experiment runs on 1-d grids".into()));
    }
    if sigmas.is_empty() {
        return Err(Error::Empty("sigma list"));
    }
    if sigmas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::param("sigmas", "must be strictly decreasing"));
    }
    let h = grid.spacing();
    let cells: Vec<usize> = sigmas
        .iter()
        .map(|&s| {
            let c = (s / h).round();
            if c < 2.0 {
                Err(Error::Resolution { requested: s, minimal: 2.0 * h })
            } else if c as usize > grid.points {
                Err(Error::param("sigmas", format!("width {s} exceeds the domain")))
            } else {
                Ok(c as usize)
            }
        })
        .collect::<Result<_>>()?;
    let handle = SemigroupHandle::Heat(HeatGrid::new(grid, Boundary::Periodic)?);
    let times = TimeGrid::log_spaced(grid.min_resolved_time().min(t0), t0, DEFAULT_TIME_POINTS)?;
    let norms = [grid.lp_norm(1.0)?, grid.lp_norm(2.0)?];
    let per_sigma = crate::par::try_map(&cells, |&c| {
        let f = GridFunction::spike(grid, c)?.to_vector();
        let ob = maximal_function(&handle, &f, &times)?;
        let r1 = norms[0].norm(&ob.y)? / norms[0].norm(&f)?;
        let r2 = norms[1].norm(&ob.y)? / norms[1].norm(&f)?;
        Ok::<_, Error>((r1, r2, ob.stability))
    })?;
    let mut rows = Vec::with_capacity(2 * sigmas.len());
    for p in [1.0, 2.0] {
        for (&sigma, r) in sigmas.iter().zip(&per_sigma) {
            rows.push(RatioRow { sigma, p, ratio: if p == 1.0 { r.0 } else { r.1 } });
        }
    }
    let p1: Vec<f64> = per_sigma.iter().map(|r| r.0).collect();
    let p2: Vec<f64> = per_sigma.iter().map(|r| r.1).collect();
    let p2_max = p2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let p2_min = p2.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DivergenceTable {
        grid,
        t0,
        stability: per_sigma.iter().map(|r| r.2).fold(0.0, f64::max),
        p1_strictly_increasing: p1.windows(2).all(|w| w[1] > w[0]),
        p1_growth: p1[p1.len() - 1] / p1[0],
        p2_spread: p2_max / p2_min,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub delta: f64,
    pub p: f64,
    pub ratio: f64,
    /// `((t0 + δ)/δ)^{1/p}`.
    pub closed_form: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupTable {
    pub grid: Grid,
    pub t0: f64,
    pub rows: Vec<BlowupRow>,
    pub max_relative_error: f64,
}

/// Shift maximal function of width-`δ` indicator spikes against the closed
/// form `((t0 + δ)/δ)^{1/p}`.
pub fn shift_maximal_blowup(grid: Grid, deltas: &[f64], t0: f64, ps: &[f64]) -> Result<BlowupTable> {
    let shift = ShiftGrid::new(grid)?;
    let h = grid.spacing();
    if deltas.is_empty() || ps.is_empty() {
        return Err(Error::Empty("delta or p list"));
    }
    for &d in deltas {
        if (d / h).round() < 1.0 {
            return Err(Error::Resolution { requested: d, minimal: h });
        }
        if t0 + d >= 2.0 * grid.half_width {
            return Err(Error::param("t0", format!("t0 + δ = {} must stay below the domain length", t0 + d)));
        }
    }
    let handle = SemigroupHandle::Shift(shift);
    let times = default_time_grid(&handle, t0)?;
    let norms = ps.iter().map(|&p| grid.lp_norm(p)).collect::<Result<Vec<_>>>()?;
    let per_delta = crate::par::try_map(deltas, |&d| {
        let f = GridFunction::spike(grid, (d / h).round() as usize)?.to_vector();
        let ob = maximal_function(&handle, &f, &times)?;
        norms.iter().map(|n| Ok(n.norm(&ob.y)? / n.norm(&f)?)).collect::<Result<Vec<f64>>>()
    })?;
    let mut rows = Vec::new();
    for (k, &p) in ps.iter().enumerate() {
        for (&delta, ratios) in deltas.iter().zip(&per_delta) {
            let closed_form = ((t0 + delta) / delta).powf(1.0 / p);
            let ratio = ratios[k];
            rows.push(BlowupRow { delta, p, ratio, closed_form, relative_error: (ratio - closed_form).abs() / closed_form });
        }
    }
    let max_relative_error = rows.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    Ok(BlowupTable { grid, t0, rows, max_relative_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(ms: &[&[f64]]) -> ObFamily {
        ObFamily::new(ms.iter().map(|m| LatticeVector::new(m.to_vec())).collect()).unwrap()
    }

    #[test]
    fn ob_norm_examples() {
        let single = fam(&[&[3.0, -4.0]]);
        let (n, y) = ob_norm(&single, &LatticeNorm::l2()).unwrap();
        assert_eq!((n, y), (5.0, LatticeVector::new(vec![3.0, 4.0])));
        let e = fam(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(ob_norm(&e, &LatticeNorm::sup()).unwrap(), (1.0, LatticeVector::constant(2, 1.0)));
        let l1 = LatticeNorm::l1().with_weights(vec![1.0, 1.0]).unwrap();
        assert_eq!(ob_norm(&e, &l1).unwrap().0, 2.0);
        assert!(ObFamily::new(vec![]).is_err());

        let c = ob_vs_sup_inequality(&e, &l1).unwrap();
        assert_eq!((c.supnorm, c.obnorm, c.holds), (1.0, 2.0, true));
        let c = ob_vs_sup_inequality(&single, &LatticeNorm::l1()).unwrap();
        assert_eq!(c.supnorm, c.obnorm);
    }

    #[test]
    fn ob_series_examples() {
        let base = fam(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let terms: Vec<ObFamily> = (1..=10).map(|n| base.scale(0.5f64.powi(n))).collect();
        let rep = ob_series(&terms, &LatticeNorm::l1(), 3).unwrap();
        assert!(rep.holds);
        assert!(rep.z_norm <= 0.125 * 2.0);
        assert!((rep.z_norm - 2.0 * (0.125 - 0.5f64.powi(10))).abs() < 1e-15);

        let one = ob_series(&terms[..1], &LatticeNorm::l1(), 1).unwrap();
        assert_eq!((one.tail_obnorm, one.z_norm), (0.0, 0.0));
        let zeros: Vec<ObFamily> = (0..4).map(|_| base.scale(0.0)).collect();
        let z = ob_series(&zeros, &LatticeNorm::sup(), 2).unwrap();
        assert_eq!((z.bound_norm, z.tail_obnorm, z.z_norm), (0.0, 0.0, 0.0));
    }

    fn swap_family() -> OperatorFamily {
        OperatorFamily::Matrices(vec![DMatrix::identity(2, 2), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])])
    }

    #[test]
    fn uob_examples() {
        let spec = SamplingSpec { budget: 2000, seed: 7, ..Default::default() };
        let id = OperatorFamily::Matrices(vec![DMatrix::identity(3, 3)]);
        let e = uob_constant(&id, &LatticeNorm::l2(), &LatticeNorm::l2(), &spec, true).unwrap();
        assert!((e.m_lower - 1.0).abs() < 1e-12);

        let e = uob_constant(&swap_family(), &LatticeNorm::sup(), &LatticeNorm::sup(), &spec, true).unwrap();
        assert!((e.m_lower - 1.0).abs() < 1e-12);
        assert!(e.exhaustive_signs);

        let e = uob_constant(&swap_family(), &LatticeNorm::l1(), &LatticeNorm::l1(), &spec, true).unwrap();
        assert_eq!(e.m_lower, 2.0);
        assert_eq!(e.witness, LatticeVector::unit(2, 0));
        assert!(e.n_evals <= spec.budget);

        assert!(uob_constant(&swap_family(), &LatticeNorm::l1(), &LatticeNorm::l1(), &SamplingSpec { budget: 0, ..spec }, true).is_err());
    }

    #[test]
    fn uob_is_reproducible() {
        let spec = SamplingSpec { budget: 3000, seed: 11, batch_size: 100, ..Default::default() };
        let ops = OperatorFamily::Matrices(vec![
            DMatrix::from_row_slice(3, 3, &[0.5, 0.2, 0.0, 0.1, 0.3, 0.7, 0.0, 0.0, 1.0]),
            DMatrix::identity(3, 3),
        ]);
        let a = uob_constant(&ops, &LatticeNorm::l2(), &LatticeNorm::l1(), &spec, true).unwrap();
        let b = uob_constant(&ops, &LatticeNorm::l2(), &LatticeNorm::l1(), &spec, true).unwrap();
        assert_eq!(a, b);
        let direct = LatticeNorm::l1().norm_slice(&ops.sup_abs(a.witness.as_slice()).unwrap()).unwrap()
            / LatticeNorm::l2().norm(&a.witness).unwrap();
        assert_eq!(a.m_lower, direct);
    }

    #[test]
    fn heat_divergence_small_grid() {
        let g = Grid::new(1, 4.0, 1024).unwrap();
        let sigmas = [0.5, 0.25, 0.125, 0.0625];
        let t = heat_l1_divergence(g, &sigmas, 1.0).unwrap();
        assert!(t.p1_strictly_increasing);
        assert!(t.p2_spread < 3.0);
        assert_eq!(t.rows.len(), 8);
        assert!(matches!(heat_l1_divergence(g, &[0.001], 1.0), Err(Error::Resolution { .. })));
        assert!(heat_l1_divergence(g, &[0.1, 0.2], 1.0).is_err());

        let full = heat_l1_divergence(g, &[8.0], 1.0).unwrap();
        assert!((full.rows[0].ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn shift_blowup_matches_closed_form() {
        let g = Grid::new(1, 1.0, 2048).unwrap();
        let deltas: Vec<f64> = (3..=7).map(|k| 0.5f64.powi(k)).collect();
        let t = shift_maximal_blowup(g, &deltas, 1.0, &[1.0, 2.0]).unwrap();
        assert!(t.max_relative_error < 1e-12, "{}", t.max_relative_error);
        assert!(shift_maximal_blowup(g, &[0.5], 1.9, &[1.0]).is_err());
    }

    #[test]
    fn operator_family_json() {
        let fam: OperatorFamily = serde_json::from_str(r#"{"matrices": [[[1, 0], [0, 2]], [[0, 1], [1, 0]]]}"#).unwrap();
        let OperatorFamily::Matrices(ms) = &fam else { panic!() };
        assert_eq!(ms[0][(1, 1)], 2.0);
        assert_eq!(ms[1][(0, 1)], 1.0);
        let back = serde_json::to_string(&fam).unwrap();
        assert_eq!(back, r#"{"matrices":[[[1.0,0.0],[0.0,2.0]],[[0.0,1.0],[1.0,0.0]]]}"#);
        assert!(serde_json::from_str::<OperatorFamily>(r#"{"matrices": [[[1, 0]]]}"#).is_err());
    }
}
