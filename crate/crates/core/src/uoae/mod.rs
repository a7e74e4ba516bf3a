//! Unbounded order convergence of sampled nets: tail envelopes, the
//! co-final witness construction for nets that fail to order converge, and
//! the selection of pointwise convergent representatives on a measure model
//! with explicit null points.

mod net;
mod select;

use serde::{Deserialize, Serialize};

pub use net::{IndexModel, IndexedNet, NetFamily, NetSchedule};
pub use select::{
    orbit_ae_continuity, select_representatives, AeContinuityReport, Override, PointTrace, PointwiseSummary,
    SelectionReport, POINTWISE_TOL,
};

use crate::error::{check_dim, Error, Result};
use crate::lattice::LatticeVector;

/// Default absolute thresholds the envelope must fall below.
pub const DEFAULT_UO_THRESHOLDS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Relative size `‖y‖ / ‖y_1‖` below which the infimum envelope counts as 0.
pub const VANISHING_TOL: f64 = 1e-6;

/// A finite measure space: weighted atoms plus labelled points of mass 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct MeasureSpaceModel {
    atoms: Vec<(String, f64)>,
    null_points: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSpec {
    atoms: Vec<(String, f64)>,
    #[serde(default)]
    null_points: Vec<String>,
}

impl TryFrom<ModelSpec> for MeasureSpaceModel {
    type Error = Error;

    fn try_from(s: ModelSpec) -> Result<Self> {
        MeasureSpaceModel::new(s.atoms, s.null_points)
    }
}

impl From<MeasureSpaceModel> for ModelSpec {
    fn from(m: MeasureSpaceModel) -> Self {
        ModelSpec { atoms: m.atoms, null_points: m.null_points }
    }
}

impl MeasureSpaceModel {
    pub fn new(atoms: Vec<(String, f64)>, null_points: Vec<String>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty("atom list"));
        }
        if let Some((label, m)) = atoms.iter().find(|(_, m)| !(*m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidInput(format!("atom `{label}` has mass {m}; masses must be positive and finite")));
        }
        let mut seen = std::collections::BTreeSet::new();
        for label in atoms.iter().map(|(l, _)| l).chain(&null_points) {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate point label `{label}`")));
            }
        }
        Ok(MeasureSpaceModel { atoms, null_points })
    }

    /// `n` atoms `a0, a1, ..` of mass `1/n` and `m` null points `n0, n1, ..`.
    pub fn uniform(n: usize, m: usize) -> Result<Self> {
        Self::new(
            (0..n).map(|i| (format!("a{i}"), 1.0 / n as f64)).collect(),
            (0..m).map(|i| format!("n{i}")).collect(),
        )
    }

    pub fn atoms(&self) -> &[(String, f64)] {
        &self.atoms
    }

    pub fn null_points(&self) -> &[String] {
        &self.null_points
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn n_null(&self) -> usize {
        self.null_points.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    /// Label of point `k`, atoms first.
    pub fn label(&self, k: usize) -> &str {
        if k < self.atoms.len() {
            &self.atoms[k].0
        } else {
            &self.null_points[k - self.atoms.len()]
        }
    }

    pub fn check(&self, f: &RepresentedFunction) -> Result<()> {
        check_dim(self.n_atoms(), f.class_values.len())?;
        check_dim(self.n_null(), f.null_values.len())
    }
}

/// A pointwise representative: the class part lives on atoms, the null part
/// is extra data invisible to norms and lattice operations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentedFunction {
    pub class_values: Vec<f64>,
    #[serde(default)]
    pub null_values: Vec<f64>,
}

impl RepresentedFunction {
    pub fn new(class_values: Vec<f64>, null_values: Vec<f64>) -> Self {
        RepresentedFunction { class_values, null_values }
    }

    pub fn class(&self) -> LatticeVector {
        LatticeVector::new(self.class_values.clone())
    }

    pub fn class_eq(&self, other: &Self) -> bool {
        self.class_values == other.class_values
    }

    /// Values at every point, atoms first.
    pub fn point_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.class_values.iter().chain(&self.null_values).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdHit {
    pub threshold: f64,
    /// First co-final position whose envelope is below the threshold.
    pub position: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UoReport {
    /// `g(j_n) = sup_{j ⪰ j_n} |x_j - x| ∧ u` over the resolved positions.
    pub envelope: Vec<LatticeVector>,
    /// `‖g(j_n)‖_sup`.
    pub envelope_norms: Vec<f64>,
    pub thresholds: Vec<ThresholdHit>,
    pub converges: bool,
}

fn envelope_report(envelope: Vec<LatticeVector>, thresholds: &[f64]) -> UoReport {
    let envelope_norms: Vec<f64> = envelope.iter().map(LatticeVector::max_abs).collect();
    let thresholds: Vec<ThresholdHit> = thresholds
        .iter()
        .map(|&threshold| ThresholdHit { threshold, position: envelope_norms.iter().position(|&g| g <= threshold) })
        .collect();
    let converges = thresholds.iter().all(|h| h.position.is_some());
    UoReport { envelope, envelope_norms, thresholds, converges }
}

/// Coordinatewise `sup_{j ⪰ j_n} φ(x_j)` for each resolved position `n`.
fn tail_sups<V: Sync>(
    net: &IndexedNet<V>,
    positions: usize,
    dim: usize,
    phi: impl Fn(&V) -> Vec<f64> + Sync + Send,
) -> Vec<LatticeVector> {
    let mapped = crate::par::map(&net.values, phi);
    crate::par::map_range(positions, |n| {
        let mut acc = vec![f64::NEG_INFINITY; dim];
        for j in net.tail(n) {
            for (a, b) in acc.iter_mut().zip(&mapped[j]) {
                if *b > *a || b.is_nan() {
                    *a = *b;
                }
            }
        }
        LatticeVector::new(acc)
    })
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.is_empty() {
        return Err(Error::Empty("threshold list"));
    }
    match thresholds.iter().find(|&&t| !(t > 0.0)) {
        Some(t) => Err(Error::param("thresholds", format!("thresholds must be positive, got {t}"))),
        None => Ok(()),
    }
}

fn check_values(net: &IndexedNet<LatticeVector>, dim: usize) -> Result<()> {
    net.validate()?;
    net.values.iter().try_for_each(|v| check_dim(dim, v.len()))
}

/// Tail envelope of `|x_j - x| ∧ u`; the verdict is "converges" when the
/// envelope's sup norm falls below every threshold.
pub fn uo_check(net: &IndexedNet<LatticeVector>, x: &LatticeVector, u: &LatticeVector, thresholds: &[f64]) -> Result<UoReport> {
    check_dim(x.len(), u.len())?;
    check_values(net, x.len())?;
    check_thresholds(thresholds)?;
    if !u.is_nonnegative() {
        return Err(Error::InvalidInput("test vector u must be nonnegative".into()));
    }
    let env = tail_sups(net, net.resolved_positions(), x.len(), |v| {
        v.iter().zip(x.iter()).zip(u.iter()).map(|((a, b), c)| (a - b).abs().min(*c)).collect()
    });
    Ok(envelope_report(env, thresholds))
}

/// [`uo_check`] without truncation: the order-convergence envelope test
/// `sup_{j ⪰ j_n} |x_j - x|`.
pub fn order_check(net: &IndexedNet<LatticeVector>, x: &LatticeVector, thresholds: &[f64]) -> Result<UoReport> {
    check_values(net, x.len())?;
    check_thresholds(thresholds)?;
    let env = tail_sups(net, net.resolved_positions(), x.len(), |v| {
        v.iter().zip(x.iter()).map(|(a, b)| (a - b).abs()).collect()
    });
    if let Some(g) = env.iter().find(|g| !g.is_finite()) {
        return Err(Error::OrderUnbounded(format!("tail supremum {:?}", g.as_slice())));
    }
    Ok(envelope_report(env, thresholds))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    /// Tail suprema `y_n = sup_{j ⪰ j_n} |x_j|` over the resolved positions.
    pub tails: Vec<LatticeVector>,
    /// `y = inf_n y_n`.
    pub y: LatticeVector,
    pub y_norm: f64,
    pub first_norm: f64,
    /// `‖y‖_sup ≤ VANISHING_TOL · ‖y_1‖_sup`.
    pub vanishes: bool,
}

/// Tail suprema of `|x_j|` along the co-final sequence and their infimum.
pub fn cofinal_envelope(net: &IndexedNet<LatticeVector>) -> Result<EnvelopeReport> {
    let dim = net.values.first().map_or(0, LatticeVector::len);
    check_values(net, dim)?;
    let tails = tail_sups(net, net.resolved_positions(), dim, |v| v.abs().into_vec());
    if let Some((n, _)) = tails.iter().enumerate().find(|(_, y)| !y.is_finite()) {
        return Err(Error::OrderUnbounded(format!("tail supremum at co-final position {n} is not finite")));
    }
    let mut y = tails[0].clone();
    for t in &tails[1..] {
        y = y.inf(t)?;
    }
    let y_norm = y.max_abs();
    let first_norm = tails[0].max_abs();
    let vanishes = y_norm <= VANISHING_TOL * first_norm;
    Ok(EnvelopeReport { tails, y, y_norm, first_norm, vanishes })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WitnessOutcome {
    NoWitnessNeeded { y_norm: f64 },
    Witness(CofinalWitness),
}

/// A co-final sequence `(i_n)` along which `|x_{i_n}|` does not order
/// converge to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CofinalWitness {
    /// The finite sets `F_n`, in selection order.
    pub blocks: Vec<Vec<usize>>,
    /// Concatenation of the blocks.
    pub sequence: Vec<usize>,
    /// `‖y_n - sup_{F_n} |x_j|‖_sup` per block.
    pub approximation_errors: Vec<f64>,
    /// `inf_n sup_{j ∈ F_n} |x_j|`, a lower bound for the limsup of the sequence.
    pub limsup: LatticeVector,
    pub limsup_norm: f64,
    pub y: LatticeVector,
    pub y_norm: f64,
    /// Every resolved `j_n` is dominated by some element of the sequence.
    pub cofinal: bool,
}

impl CofinalWitness {
    pub fn dominates_half(&self) -> bool {
        self.limsup_norm >= 0.5 * self.y_norm
    }
}

/// Builds a co-final sequence whose values stay away from 0 in order, or
/// signals that the net order converges to 0.
pub fn cofinal_witness(net: &IndexedNet<LatticeVector>) -> Result<WitnessOutcome> {
    let env = cofinal_envelope(net)?;
    if env.vanishes {
        return Ok(WitnessOutcome::NoWitnessNeeded { y_norm: env.y_norm });
    }
    let dim = env.y.len();
    let abs: Vec<LatticeVector> = net.values.iter().map(LatticeVector::abs).collect();
    let blocks_and_errors: Vec<(Vec<usize>, f64)> = crate::par::map_range(env.tails.len(), |n| {
        let target = &env.tails[n];
        let tolerance = 0.5f64.powi(n as i32 + 2) * env.y_norm;
        let tail = net.tail(n);
        let mut cur = vec![0.0f64; dim];
        let mut block = Vec::new();
        let gap = |cur: &[f64]| target.iter().zip(cur).fold(0.0f64, |m, (a, b)| m.max(a - b));
        while gap(&cur) > tolerance {
            // largest single-coordinate gain; earliest index on ties
            let mut best = (f64::NEG_INFINITY, tail[0]);
            for &j in &tail {
                let gain = abs[j].iter().zip(&cur).fold(0.0f64, |m, (a, b)| m.max(a - b));
                if gain > best.0 {
                    best = (gain, j);
                }
            }
            block.push(best.1);
            for (c, v) in cur.iter_mut().zip(abs[best.1].iter()) {
                *c = c.max(*v);
            }
        }
        let err = gap(&cur);
        (block, err)
    });
    let (blocks, approximation_errors): (Vec<_>, Vec<_>) = blocks_and_errors.into_iter().unzip();

    let mut limsup: Option<LatticeVector> = None;
    for block in &blocks {
        let mut s = LatticeVector::zeros(dim);
        for &j in block {
            s = s.sup(&abs[j])?;
        }
        limsup = Some(match limsup {
            None => s,
            Some(l) => l.inf(&s)?,
        });
    }
    let limsup = limsup.unwrap_or_else(|| LatticeVector::zeros(dim));
    let sequence: Vec<usize> = blocks.iter().flatten().copied().collect();
    let cofinal = (0..env.tails.len()).all(|n| sequence.iter().any(|&i| net.model.succeq(i, net.cofinal[n])));
    Ok(WitnessOutcome::Witness(CofinalWitness {
        limsup_norm: limsup.max_abs(),
        blocks,
        sequence,
        approximation_errors,
        limsup,
        y: env.y,
        y_norm: env.y_norm,
        cofinal,
    }))
}
