use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::LatticeVector;

/// A directed index set, sampled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexModel {
    /// Sample times in `(0, 1]`; `s ⪰ t` iff `s ≤ t`.
    ReversedUnitInterval { times: Vec<f64> },
    /// `relation[a][b]` is true iff `a ⪰ b`.
    FinitePoset { relation: Vec<Vec<bool>> },
}

impl IndexModel {
    pub fn len(&self) -> usize {
        match self {
            IndexModel::ReversedUnitInterval { times } => times.len(),
            IndexModel::FinitePoset { relation } => relation.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `a ⪰ b`.
    pub fn succeq(&self, a: usize, b: usize) -> bool {
        match self {
            IndexModel::ReversedUnitInterval { times } => times[a] <= times[b],
            IndexModel::FinitePoset { relation } => relation[a][b],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            IndexModel::ReversedUnitInterval { times } => {
                if times.is_empty() {
                    return Err(Error::Empty("index set"));
                }
                if !times.iter().all(|&t| t > 0.0 && t <= 1.0) {
                    return Err(Error::InvalidInput("interval indices must lie in (0, 1]".into()));
                }
                Ok(())
            }
            IndexModel::FinitePoset { relation } => {
                let n = relation.len();
                if n == 0 {
                    return Err(Error::Empty("index set"));
                }
                for row in relation {
                    check_dim(n, row.len())?;
                }
                for a in 0..n {
                    if !relation[a][a] {
                        return Err(Error::InvalidInput(format!("relation is not reflexive at {a}")));
                    }
                    for b in 0..n {
                        if a != b && relation[a][b] && relation[b][a] {
                            return Err(Error::InvalidInput(format!("relation is not antisymmetric at ({a}, {b})")));
                        }
                        for c in 0..n {
                            if relation[a][b] && relation[b][c] && !relation[a][c] {
                                return Err(Error::InvalidInput(format!("relation is not transitive at ({a}, {b}, {c})")));
                            }
                        }
                        if !(0..n).any(|c| relation[c][a] && relation[c][b]) {
                            return Err(Error::InvalidInput(format!("{a} and {b} have no common upper bound")));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// A sampled net `j ↦ x_j` with a designated co-final sequence `(j_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexedNet<V> {
    pub model: IndexModel,
    pub values: Vec<V>,
    pub cofinal: Vec<usize>,
}

impl<V> IndexedNet<V> {
    pub fn new(model: IndexModel, values: Vec<V>, cofinal: Vec<usize>) -> Result<Self> {
        let net = IndexedNet { model, values, cofinal };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        check_dim(self.model.len(), self.values.len())?;
        if self.cofinal.is_empty() {
            return Err(Error::Empty("co-final sequence"));
        }
        if let Some(&j) = self.cofinal.iter().find(|&&j| j >= self.values.len()) {
            return Err(Error::InvalidInput(format!("co-final index {j} out of range")));
        }
        if let Some(w) = self.cofinal.windows(2).find(|w| !self.model.succeq(w[1], w[0])) {
            return Err(Error::InvalidInput(format!("co-final sequence is not increasing at {} → {}", w[0], w[1])));
        }
        if let Some(j) = (0..self.values.len()).find(|&j| !self.cofinal.iter().any(|&c| self.model.succeq(c, j))) {
            return Err(Error::InvalidInput(format!("index {j} is not dominated by the co-final sequence")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sampled tail `{j : j ⪰ j_n}` for co-final position `n` (0-based).
    pub fn tail(&self, n: usize) -> Vec<usize> {
        let jn = self.cofinal[n];
        (0..self.values.len()).filter(|&j| self.model.succeq(j, jn)).collect()
    }

    /// Co-final positions whose sampled tails are long enough to stand in for
    /// the full tail: the first three quarters on the interval model (the
    /// last quarter only serves as lookahead), all of them on a poset.
    pub fn resolved_positions(&self) -> usize {
        match self.model {
            IndexModel::ReversedUnitInterval { .. } => (3 * self.cofinal.len()).div_ceil(4),
            IndexModel::FinitePoset { .. } => self.cofinal.len(),
        }
    }

    pub fn map<W>(&self, f: impl Fn(&V) -> W) -> IndexedNet<W> {
        IndexedNet { model: self.model.clone(), values: self.values.iter().map(f).collect(), cofinal: self.cofinal.clone() }
    }
}

/// Dyadic samples `t_k = 2^{-1-k/per_octave}`, `k = 0..=octaves·per_octave`,
/// with every `per_octave`-th sample on the co-final sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetSchedule {
    pub octaves: u32,
    pub per_octave: u32,
}

impl Default for NetSchedule {
    fn default() -> Self {
        NetSchedule { octaves: 40, per_octave: 4 }
    }
}

impl NetSchedule {
    pub fn times(&self) -> Vec<f64> {
        let p = self.per_octave.max(1);
        (0..=self.octaves * p).map(|k| 2f64.powf(-1.0 - k as f64 / p as f64)).collect()
    }

    pub fn cofinal(&self) -> Vec<usize> {
        let p = self.per_octave.max(1) as usize;
        (0..=self.octaves as usize).map(|n| n * p).collect()
    }

    pub fn model(&self) -> IndexModel {
        IndexModel::ReversedUnitInterval { times: self.times() }
    }

    /// Tabulates `f(t)` on the schedule.
    pub fn net<V>(&self, f: impl Fn(f64) -> V) -> IndexedNet<V> {
        let times = self.times();
        let values = times.iter().map(|&t| f(t)).collect();
        IndexedNet { model: IndexModel::ReversedUnitInterval { times }, values, cofinal: self.cofinal() }
    }
}

/// Closed-form nets over `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetFamily {
    /// `f + t·direction` (direction defaults to all ones).
    Linear { f: Vec<f64>, direction: Option<Vec<f64>> },
    /// `(1, 0)` on the bands `[2^{-2k-1}, 2^{-2k}]`, `(0, 1)` elsewhere.
    BandAlternating,
    /// `e_{⌈log₂(1/t)⌉ mod n}`.
    MovingSpike { n: usize },
    Constant { value: Vec<f64> },
    /// `t^exponent · base`.
    Power { base: Vec<f64>, exponent: f64 },
}

impl NetFamily {
    pub fn dim(&self) -> usize {
        match self {
            NetFamily::Linear { f, .. } => f.len(),
            NetFamily::BandAlternating => 2,
            NetFamily::MovingSpike { n } => *n,
            NetFamily::Constant { value } => value.len(),
            NetFamily::Power { base, .. } => base.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NetFamily::Linear { f, direction: Some(d) } => check_dim(f.len(), d.len()),
            NetFamily::MovingSpike { n: 0 } => Err(Error::param("n", "need at least one coordinate")),
            NetFamily::Power { exponent, .. } if !exponent.is_finite() => Err(Error::param("exponent", "must be finite")),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> LatticeVector {
        LatticeVector::new(match self {
            NetFamily::Linear { f, direction } => match direction {
                Some(d) => f.iter().zip(d).map(|(a, b)| a + t * b).collect(),
                None => f.iter().map(|a| a + t).collect(),
            },
            NetFamily::BandAlternating => {
                // t ∈ [2^{-2k-1}, 2^{-2k}] iff ⌊-log₂ t⌋ is even, endpoints included
                let e = -t.log2();
                let in_band = e.fract() == 0.0 || (e.floor() as i64) % 2 == 0;
                if in_band {
                    vec![1.0, 0.0]
                } else {
                    vec![0.0, 1.0]
                }
            }
            NetFamily::MovingSpike { n } => {
                let k = (1.0 / t).log2().ceil().max(0.0) as usize % n;
                LatticeVector::unit(*n, k).into_vec()
            }
            NetFamily::Constant { value } => value.clone(),
            NetFamily::Power { base, exponent } => base.iter().map(|b| t.powf(*exponent) * b).collect(),
        })
    }

    /// The closed-form limit as `t ↓ 0`, where one exists.
    pub fn limit(&self) -> Option<LatticeVector> {
        match self {
            NetFamily::Linear { f, .. } => Some(LatticeVector::new(f.clone())),
            NetFamily::Constant { value } => Some(LatticeVector::new(value.clone())),
            NetFamily::Power { base, exponent } if *exponent > 0.0 => Some(LatticeVector::zeros(base.len())),
            _ => None,
        }
    }

    pub fn sample(&self, schedule: &NetSchedule) -> Result<IndexedNet<LatticeVector>> {
        self.validate()?;
        Ok(schedule.net(|t| self.eval(t)))
    }
}
