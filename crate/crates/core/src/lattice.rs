//! Finite-dimensional Banach lattice arithmetic.
//!
//! Vectors are real coordinates with the coordinatewise order. Besides the
//! lattice operations this module provides the relatively uniform (ru)
//! convergence machinery: the smallest ε with `|x_j - x| ≤ ε·u`, sampled ru
//! certification of nets, and the weighted-sum construction of a common
//! regulator for countably many ru-convergent sequences.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Relative slack used when comparing a computed ε against a target, so that
/// a difference like `(1 + t)·x - x` does not fail against `t` by one ulp.
pub const ROUNDOFF_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(Vec<f64>);

impl LatticeVector {
    pub fn new(values: Vec<f64>) -> Self {
        LatticeVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        LatticeVector(vec![0.0; n])
    }

    pub fn constant(n: usize, c: f64) -> Self {
        LatticeVector(vec![c; n])
    }

    /// The `k`-th unit vector of length `n`.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        LatticeVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        LatticeVector(self.0.iter().map(|&a| f(a)).collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_dim(self.len(), other.len())?;
        Ok(LatticeVector(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect()))
    }

    /// Modulus `|x| = x ∨ (-x)`.
    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn pos_part(&self) -> Self {
        self.map(|a| a.max(0.0))
    }

    pub fn neg_part(&self) -> Self {
        self.map(|a| (-a).max(0.0))
    }

    pub fn sup(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::max)
    }

    pub fn inf(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::min)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|a| c * a)
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + c * b)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&a| a >= 0.0)
    }

    /// Coordinatewise `self ≤ other`.
    pub fn le(&self, other: &Self) -> Result<bool> {
        check_dim(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }
}

impl Index<usize> for LatticeVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for LatticeVector {
    fn from(v: Vec<f64>) -> Self {
        LatticeVector(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    Lp(f64),
    Sup,
}

/// A weighted lattice norm: `(Σ w_i |x_i|^p)^{1/p}` or `max_i |x_i|`.
///
/// Weights are coordinate masses; the sup norm ignores them. Serialized as
/// `{"kind": "lp"|"sup", "p": number, "weights": [..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormSpec", into = "NormSpec")]
pub struct LatticeNorm {
    kind: NormKind,
    weights: Option<Vec<f64>>,
}

impl LatticeNorm {
    pub fn lp(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::param("p", format!("need 1 ≤ p < ∞, got {p}")));
        }
        Ok(LatticeNorm { kind: NormKind::Lp(p), weights: None })
    }

    pub fn l1() -> Self {
        LatticeNorm { kind: NormKind::Lp(1.0), weights: None }
    }

    pub fn l2() -> Self {
        LatticeNorm { kind: NormKind::Lp(2.0), weights: None }
    }

    pub fn sup() -> Self {
        LatticeNorm { kind: NormKind::Sup, weights: None }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if !weights.iter().all(|&w| w > 0.0 && w.is_finite()) {
            return Err(Error::param("weights", "weights must be positive and finite"));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn norm(&self, x: &LatticeVector) -> Result<f64> {
        self.norm_slice(x.as_slice())
    }

    pub fn norm_slice(&self, x: &[f64]) -> Result<f64> {
        if let Some(w) = &self.weights {
            if !matches!(self.kind, NormKind::Sup) {
                check_dim(w.len(), x.len())?;
            }
        }
        let m = x.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        Ok(match self.kind {
            NormKind::Sup => m,
            NormKind::Lp(_) if m == 0.0 || !m.is_finite() => m,
            NormKind::Lp(p) => {
                // scaled by the max modulus to keep |x_i|^p in range
                let sum: f64 = match &self.weights {
                    Some(w) => x.iter().zip(w).map(|(a, w)| w * (a.abs() / m).powf(p)).sum(),
                    None => x.iter().map(|a| (a.abs() / m).powf(p)).sum(),
                };
                m * sum.powf(1.0 / p)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum NormTag {
    Lp,
    Sup,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormSpec {
    kind: NormTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

impl TryFrom<NormSpec> for LatticeNorm {
    type Error = Error;

    fn try_from(spec: NormSpec) -> Result<Self> {
        let base = match spec.kind {
            NormTag::Sup => LatticeNorm::sup(),
            NormTag::Lp => LatticeNorm::lp(spec.p.ok_or_else(|| Error::param("p", "required for kind \"lp\""))?)?,
        };
        match spec.weights {
            Some(w) => base.with_weights(w),
            None => Ok(base),
        }
    }
}

impl From<LatticeNorm> for NormSpec {
    fn from(n: LatticeNorm) -> Self {
        let (kind, p) = match n.kind {
            NormKind::Lp(p) => (NormTag::Lp, Some(p)),
            NormKind::Sup => (NormTag::Sup, None),
        };
        NormSpec { kind, p, weights: n.weights }
    }
}

/// Smallest `ε ≥ 0` with `|x_j - x| ≤ ε·u` coordinatewise.
///
/// A coordinate with zero difference contributes 0 even where `u` vanishes;
/// a nonzero difference over a vanishing `u_i` makes the result `+∞`.
pub fn ru_eps(x_j: &LatticeVector, x: &LatticeVector, u: &LatticeVector) -> Result<f64> {
    check_dim(x.len(), x_j.len())?;
    check_dim(x.len(), u.len())?;
    let mut eps = 0.0f64;
    for ((a, b), w) in x_j.iter().zip(x.iter()).zip(u.iter()) {
        let d = (a - b).abs();
        if d == 0.0 {
            continue;
        }
        if *w <= 0.0 {
            return Ok(f64::INFINITY);
        }
        eps = eps.max(d / w);
    }
    Ok(eps)
}

/// One sampled member of a net, listed along its co-final sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetSample {
    pub index: f64,
    pub value: LatticeVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RuVerdict {
    /// All samples from `position` on satisfy `ru_eps ≤ eps_target`.
    Certified { position: usize, index: f64, tail_eps: f64 },
    NotCertified { final_tail_eps: f64 },
}

impl RuVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, RuVerdict::Certified { .. })
    }
}

/// Sampled ru-convergence test: the first sample beyond which every sampled
/// `ru_eps` is within `eps_target`.
pub fn ru_converges(
    samples: &[NetSample],
    limit: &LatticeVector,
    u: &LatticeVector,
    eps_target: f64,
) -> Result<RuVerdict> {
    if samples.is_empty() {
        return Err(Error::Empty("net"));
    }
    if !(eps_target > 0.0) {
        return Err(Error::param("eps_target", "must be positive"));
    }
    if !u.is_nonnegative() {
        return Err(Error::InvalidInput("regulator must be nonnegative".into()));
    }
    let eps = samples
        .iter()
        .map(|s| ru_eps(&s.value, limit, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(first_certified(&eps, eps_target, |k| samples[k].index))
}

/// Shared by every sampled certification: `eps[k]` listed along a co-final
/// sequence, certification at the first position whose tail maximum is
/// within target.
pub(crate) fn first_certified(eps: &[f64], eps_target: f64, index_of: impl Fn(usize) -> f64) -> RuVerdict {
    let tails = tail_max(eps);
    let bound = eps_target * (1.0 + ROUNDOFF_SLACK);
    match tails.iter().position(|&e| e <= bound) {
        Some(k) => RuVerdict::Certified { position: k, index: index_of(k), tail_eps: tails[k] },
        None => RuVerdict::NotCertified { final_tail_eps: *tails.last().unwrap_or(&f64::INFINITY) },
    }
}

/// `out[k] = max(v[k..])`.
pub(crate) fn tail_max(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    let mut m = f64::NEG_INFINITY;
    for k in (0..v.len()).rev() {
        m = m.max(v[k]);
        out[k] = m;
    }
    out
}

/// A regulator `u` together with the recorded ε for each sampled index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regulator {
    pub u: LatticeVector,
    /// `(index, ε)` with ε the smallest value such that `|x_j - x| ≤ ε·u`.
    pub eps_schedule: Vec<(f64, f64)>,
}

impl Regulator {
    pub fn from_samples(u: LatticeVector, samples: &[NetSample], limit: &LatticeVector) -> Result<Self> {
        if !u.is_nonnegative() {
            return Err(Error::InvalidInput("regulator must be nonnegative".into()));
        }
        let eps_schedule = samples
            .iter()
            .map(|s| Ok((s.index, ru_eps(&s.value, limit, &u)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Regulator { u, eps_schedule })
    }

    /// Largest recorded ε.
    pub fn max_eps(&self) -> f64 {
        self.eps_schedule.iter().fold(0.0, |m, &(_, e)| m.max(e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonRegulator {
    pub u: LatticeVector,
    /// Norm bound `2^{-N}` on the discarded tail of the weighted series.
    pub tail_bound: f64,
}

/// `u = Σ_{n=1}^N u_n / (2^n (‖u_n‖ + 1))` for the given regulators and their norms.
///
/// Each term has norm below `2^{-n}`, so the series continued past the list
/// would change `u` by at most `2^{-N}` in norm.
pub fn common_regulator(dim: usize, regulators: &[(LatticeVector, f64)]) -> Result<CommonRegulator> {
    let mut u = vec![0.0; dim];
    let mut weight = 1.0;
    for (n, (r, norm)) in regulators.iter().enumerate() {
        check_dim(dim, r.len())?;
        if !r.is_nonnegative() {
            return Err(Error::InvalidInput(format!("regulator {} has a negative entry", n + 1)));
        }
        if !(*norm >= 0.0) {
            return Err(Error::InvalidInput(format!("regulator {} has invalid norm {norm}", n + 1)));
        }
        weight *= 0.5;
        let c = weight / (norm + 1.0);
        for (acc, v) in u.iter_mut().zip(r.iter()) {
            *acc += c * v;
        }
    }
    Ok(CommonRegulator { u: LatticeVector(u), tail_bound: 0.5f64.powi(regulators.len() as i32) })
}
