use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{uo_check, IndexedNet, MeasureSpaceModel, NetSchedule, RepresentedFunction, UoReport, DEFAULT_UO_THRESHOLDS};
use crate::error::{Error, Result};
use crate::ruc::{certify_theorem21, CertifyOptions, Conditions};
use crate::schedule::Schedule;
use crate::semigroup::SemigroupHandle;

/// Absolute tail deviation below which a point counts as convergent.
pub const POINTWISE_TOL: f64 = 1e-3;

/// One null-point value replaced by the limit's value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Override {
    pub index: usize,
    pub point: String,
    pub old: f64,
    pub new: f64,
}

/// Tail suprema `sup_{j ⪰ j_n} |f̂_j(ω) - f̂(ω)|` at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointTrace {
    pub label: String,
    pub null: bool,
    pub tails: Vec<f64>,
    pub converges: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseSummary {
    pub points: Vec<PointTrace>,
    /// Convergence at every point.
    pub all_points: bool,
    /// Convergence at every atom, i.e. off a null set.
    pub atoms_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub representatives: Vec<RepresentedFunction>,
    pub overrides: Vec<Override>,
    /// The co-final sequence after thinning to a strictly increasing one.
    pub cofinal: Vec<usize>,
    /// Block `n` with `j ⪰ j_n`, `j ⋡ j_{n+1}`; `None` for indices above no `j_n`.
    pub partition: Vec<Option<usize>>,
    pub j0_size: usize,
    /// `max_ω g_n(ω)` over atoms.
    pub atom_envelope: Vec<f64>,
    /// `ĝ_n` on null points.
    pub null_envelope: Vec<f64>,
    pub uo: UoReport,
    pub pre: PointwiseSummary,
    pub post: PointwiseSummary,
}

impl SelectionReport {
    pub fn class_values_unchanged(&self, net: &IndexedNet<RepresentedFunction>) -> bool {
        self.representatives.iter().zip(&net.values).all(|(a, b)| a.class_values == b.class_values)
    }
}

fn thin(net: &IndexedNet<RepresentedFunction>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(net.cofinal.len());
    for &j in &net.cofinal {
        match out.last() {
            Some(&k) if net.model.succeq(k, j) => {}
            _ => out.push(j),
        }
    }
    out
}

fn pointwise(
    model: &MeasureSpaceModel,
    net: &IndexedNet<RepresentedFunction>,
    values: &[RepresentedFunction],
    f: &RepresentedFunction,
) -> PointwiseSummary {
    let positions = net.resolved_positions();
    let tails: Vec<Vec<usize>> = (0..positions).map(|n| net.tail(n)).collect();
    let limit: Vec<f64> = f.point_values().collect();
    let dev: Vec<Vec<f64>> = crate::par::map(values, |v| v.point_values().zip(&limit).map(|(a, b)| (a - b).abs()).collect());
    let points: Vec<PointTrace> = crate::par::map_range(limit.len(), |k| {
        let tails: Vec<f64> = tails.iter().map(|t| t.iter().fold(0.0f64, |m, &j| m.max(dev[j][k]))).collect();
        let converges = tails.last().is_some_and(|&g| g <= POINTWISE_TOL);
        PointTrace { label: model.label(k).to_string(), null: k >= model.n_atoms(), tails, converges }
    });
    let all_points = points.iter().all(|p| p.converges);
    let atoms_only = points.iter().filter(|p| !p.null).all(|p| p.converges);
    PointwiseSummary { points, all_points, atoms_only }
}

/// Chooses representatives `f̂_j` of the classes `f_j` that converge to `f̂`
/// at every point, changing values only on null points.
///
/// With `g_n = sup_{j ⪰ j_n} |f_j - f| ∧ u` on atoms and a decreasing `ĝ_n`
/// on null points, an index in block `n` keeps its null value unless
/// `|f̃_j - f̂| ∧ û > ĝ_n` there, in which case it is replaced by `f̂`.
pub fn select_representatives(
    model: &MeasureSpaceModel,
    net: &IndexedNet<RepresentedFunction>,
    f: &RepresentedFunction,
    u: &RepresentedFunction,
) -> Result<SelectionReport> {
    net.validate()?;
    model.check(f)?;
    model.check(u)?;
    for v in &net.values {
        model.check(v)?;
    }
    if let Some(k) = u.point_values().position(|v| !(v > 0.0)) {
        return Err(Error::Precondition(format!("u must be strictly positive at every point; it vanishes at `{}`", model.label(k))));
    }
    let class_net = net.map(RepresentedFunction::class);
    let uo = uo_check(&class_net, &f.class(), &u.class(), &DEFAULT_UO_THRESHOLDS)?;
    if !uo.converges {
        return Err(Error::Precondition("the classes do not uo-converge to f at sample resolution".into()));
    }

    let cofinal = thin(net);
    let n_atoms = model.n_atoms();
    let atom_envelope: Vec<f64> = crate::par::map(&cofinal, |&jn| {
        (0..net.len())
            .filter(|&j| net.model.succeq(j, jn))
            .flat_map(|j| {
                let fj = &net.values[j];
                (0..n_atoms).map(move |i| (fj.class_values[i] - f.class_values[i]).abs().min(u.class_values[i]))
            })
            .fold(0.0f64, f64::max)
    });
    let mut null_envelope = Vec::with_capacity(cofinal.len());
    let mut running = f64::INFINITY;
    for (n, &g) in atom_envelope.iter().enumerate() {
        running = running.min(g.max(0.5f64.powi(n as i32 + 1)));
        null_envelope.push(running);
    }

    let partition: Vec<Option<usize>> = (0..net.len())
        .map(|j| (0..cofinal.len()).rev().find(|&n| net.model.succeq(j, cofinal[n])))
        .collect();
    let j0_size = partition.iter().filter(|p| p.is_none()).count();

    let per_index: Vec<(RepresentedFunction, Vec<Override>)> = crate::par::map_range(net.len(), |j| {
        let mut rep = net.values[j].clone();
        let mut changes = Vec::new();
        if let Some(n) = partition[j] {
            for (k, v) in rep.null_values.iter_mut().enumerate() {
                let target = f.null_values[k];
                if (*v - target).abs().min(u.null_values[k]) > null_envelope[n] {
                    changes.push(Override { index: j, point: model.null_points()[k].clone(), old: *v, new: target });
                    *v = target;
                }
            }
        }
        (rep, changes)
    });
    let (representatives, overrides): (Vec<_>, Vec<_>) = per_index.into_iter().unzip();
    let overrides: Vec<Override> = overrides.into_iter().flatten().collect();

    let pre = pointwise(model, net, &net.values, f);
    let post = pointwise(model, net, &representatives, f);
    Ok(SelectionReport {
        representatives,
        overrides,
        cofinal,
        partition,
        j0_size,
        atom_envelope,
        null_envelope,
        uo,
        pre,
        post,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AeContinuityReport {
    pub seed: u64,
    pub conditions: Conditions,
    pub selection: SelectionReport,
    pub pre_converges: bool,
    pub post_converges: bool,
}

/// Runs representative selection on `t ↦ T(t)f` with null values perturbed
/// by `±U(0.5, 1.5)` (seeded), after certifying ru-continuity at `f`.
pub fn orbit_ae_continuity(
    handle: &SemigroupHandle,
    model: &MeasureSpaceModel,
    f: &RepresentedFunction,
    u: &RepresentedFunction,
    schedule: &NetSchedule,
    seed: u64,
) -> Result<AeContinuityReport> {
    model.check(f)?;
    crate::error::check_dim(handle.dim(), model.n_atoms())?;
    let times = schedule.times();
    let t0 = times[0];
    let cert = certify_theorem21(handle, &[f.class()], t0, &Schedule::default(), &CertifyOptions::default())?;
    if !cert.conditions.all_hold() {
        return Err(Error::Precondition(format!("ru-continuity is not certified at f: {:?}", cert.conditions)));
    }
    let classes = crate::par::try_map(&times, |&t| handle.apply(t, &f.class_values))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<RepresentedFunction> = classes
        .into_iter()
        .map(|class| {
            let nulls = f
                .null_values
                .iter()
                .map(|&v| {
                    let size = rng.random_range(0.5..1.5);
                    if rng.random_bool(0.5) {
                        v + size
                    } else {
                        v - size
                    }
                })
                .collect();
            RepresentedFunction::new(class, nulls)
        })
        .collect();
    let net = IndexedNet::new(schedule.model(), values, schedule.cofinal())?;
    let selection = select_representatives(model, &net, f, u)?;
    Ok(AeContinuityReport {
        seed,
        conditions: cert.conditions,
        pre_converges: selection.pre.all_points,
        post_converges: selection.post.all_points,
        selection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{Boundary, Grid, GridFunction, HeatGrid, MetzlerGenerator};
    use crate::uoae::IndexModel;

    fn linear_net(f: &RepresentedFunction, nulls: impl Fn(f64) -> Vec<f64>) -> IndexedNet<RepresentedFunction> {
        NetSchedule::default().net(|t| RepresentedFunction::new(f.class_values.iter().map(|v| v + t).collect(), nulls(t)))
    }

    #[test]
    fn consistent_nulls_are_left_alone() {
        let model = MeasureSpaceModel::uniform(2, 1).unwrap();
        let f = RepresentedFunction::new(vec![1.0, 2.0], vec![7.0]);
        let u = RepresentedFunction::new(vec![1.0, 1.0], vec![1.0]);
        let net = linear_net(&f, |_| vec![7.0]);
        let rep = select_representatives(&model, &net, &f, &u).unwrap();
        assert!(rep.overrides.is_empty());
        assert_eq!(rep.representatives, net.values);
        assert!(rep.pre.all_points && rep.post.all_points);
    }

    #[test]
    fn adversarial_nulls_are_overridden_everywhere() {
        let model = MeasureSpaceModel::uniform(2, 1).unwrap();
        let f = RepresentedFunction::new(vec![1.0, 2.0], vec![3.0]);
        let u = RepresentedFunction::new(vec![1.0, 1.0], vec![1.0]);
        let net = linear_net(&f, |_| vec![4.0]);
        let rep = select_representatives(&model, &net, &f, &u).unwrap();
        assert_eq!(rep.overrides.len(), net.len());
        assert!(rep.representatives.iter().all(|r| r.null_values == [3.0]));
        assert!(rep.class_values_unchanged(&net));
        assert!(!rep.pre.all_points && rep.pre.atoms_only);
        assert!(rep.post.all_points);
        assert_eq!(rep.j0_size, 0);
        assert!(rep.null_envelope.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn oscillations_removed_on_eight_indices() {
        // chain of 8 indices, j_n every other one
        let n = 8;
        let relation: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a >= b).collect()).collect();
        let model = MeasureSpaceModel::uniform(1, 1).unwrap();
        let f = RepresentedFunction::new(vec![2.0], vec![0.0]);
        let u = RepresentedFunction::new(vec![1.0], vec![1.0]);
        let values = (0..n).map(|j| RepresentedFunction::new(vec![2.0], vec![if j % 2 == 0 { 1.0 } else { -1.0 }])).collect();
        let net = IndexedNet::new(IndexModel::FinitePoset { relation }, values, vec![1, 3, 5, 7]).unwrap();
        let rep = select_representatives(&model, &net, &f, &u).unwrap();
        assert_eq!(rep.partition, vec![None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(2), Some(3)]);
        assert_eq!(rep.j0_size, 1);
        assert_eq!(rep.null_envelope, vec![0.5, 0.25, 0.125, 0.0625]);
        let changed: Vec<usize> = rep.overrides.iter().map(|o| o.index).collect();
        assert_eq!(changed, (1..8).collect::<Vec<_>>());
        assert_eq!(rep.representatives[0].null_values, [1.0]);
        assert!(rep.post.all_points);
    }

    #[test]
    fn idempotent() {
        let model = MeasureSpaceModel::uniform(2, 2).unwrap();
        let f = RepresentedFunction::new(vec![0.0, 1.0], vec![0.0, -1.0]);
        let u = RepresentedFunction::new(vec![1.0, 2.0], vec![0.3, 1.0]);
        let net = linear_net(&f, |t| vec![(1.0 / t).sin(), 2.0 + t]);
        let once = select_representatives(&model, &net, &f, &u).unwrap();
        let again = IndexedNet { values: once.representatives.clone(), ..net.clone() };
        let twice = select_representatives(&model, &again, &f, &u).unwrap();
        assert!(twice.overrides.is_empty());
        assert_eq!(twice.representatives, once.representatives);
        assert!(once.post.all_points);
    }

    #[test]
    fn vanishing_test_function_is_rejected_by_name() {
        let model = MeasureSpaceModel::uniform(1, 2).unwrap();
        let f = RepresentedFunction::new(vec![0.0], vec![0.0, 0.0]);
        let u = RepresentedFunction::new(vec![1.0], vec![1.0, 0.0]);
        let net = linear_net(&f, |_| vec![0.0, 0.0]);
        match select_representatives(&model, &net, &f, &u) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("`n1`"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn orbit_identity_and_matrix() {
        let model = MeasureSpaceModel::uniform(3, 2).unwrap();
        let f = RepresentedFunction::new(vec![1.0, 0.5, 2.0], vec![0.25, -1.0]);
        let u = RepresentedFunction::new(vec![1.0; 3], vec![1.0; 2]);
        let id = orbit_ae_continuity(&SemigroupHandle::identity(3), &model, &f, &u, &NetSchedule::default(), 1).unwrap();
        assert!(id.post_converges && !id.pre_converges);

        let a = MetzlerGenerator::from_rows(&[vec![-1.0, 0.5, 0.0], vec![0.2, -2.0, 1.0], vec![0.0, 0.3, -0.5]]).unwrap();
        let rep = orbit_ae_continuity(&SemigroupHandle::Matrix(a), &model, &f, &u, &NetSchedule::default(), 7).unwrap();
        assert!(rep.conditions.all_hold());
        assert!(rep.post_converges && !rep.pre_converges);
        assert!(rep.selection.overrides.iter().all(|o| o.point.starts_with('n')));
    }

    #[test]
    fn heat_orbit_has_nothing_to_select() {
        let g = Grid::new(1, 5.0, 256).unwrap();
        let heat = HeatGrid::new(g, Boundary::Periodic).unwrap();
        let bump = GridFunction::bump(g, 0.0, 0.5).values;
        let model = MeasureSpaceModel::uniform(g.len(), 0).unwrap();
        let f = RepresentedFunction::new(bump, vec![]);
        let u = RepresentedFunction::new(vec![1.0; g.len()], vec![]);
        let rep = orbit_ae_continuity(&SemigroupHandle::Heat(heat), &model, &f, &u, &NetSchedule::default(), 3).unwrap();
        assert!(rep.selection.overrides.is_empty());
        assert!(rep.pre_converges && rep.post_converges);
    }
}
