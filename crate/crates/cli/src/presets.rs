//! One function per preset: typed config in, report value and tables out.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruclab::lattice::LatticeVector;
use ruclab::random::{random_vector, with_spectral_bound};
use ruclab::ruc::{certify_theorem21, rate_dom_a2, regulator_from_dom_a, CertifyOptions, DEFAULT_EPS_TARGETS, STABILITY_THRESHOLD};
use ruclab::schedule::{Schedule, TimeGrid, DEFAULT_DYADIC_LEVELS, DEFAULT_TIME_POINTS};
use ruclab::semigroup::{resolvent_apply, Boundary, Grid, GridFunction, HeatGrid, MetzlerGenerator, SemigroupHandle};
use ruclab::spectral::{growth_bound_fit, growth_bound_fit_default, orbit_bound_to_norm_bound};
use ruclab::uoae::{
    cofinal_envelope, cofinal_witness, orbit_ae_continuity, select_representatives, uo_check, IndexedNet,
    MeasureSpaceModel, NetFamily, NetSchedule, PointwiseSummary, RepresentedFunction, SelectionReport, WitnessOutcome,
    DEFAULT_UO_THRESHOLDS,
};
use ruclab::uob::{heat_l1_divergence, shift_maximal_blowup, uob_constant, OperatorFamily, SamplingSpec};
use ruclab::ruc::maximal_function;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{parse, NormArg, Source};
use crate::error::CliError;

pub const PRESETS: [&str; 9] = [
    "check theorem21",
    "check sb-gb",
    "check lemma22",
    "uob estimate",
    "experiment heat-maximal",
    "experiment shift-maximal",
    "experiment heat-l1-divergence",
    "ae select",
    "net cofinal-witness",
];

pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Outcome {
    /// The config with defaults filled in.
    pub config: Value,
    pub result: Value,
    pub tables: Vec<Table>,
    pub passed: bool,
}

pub fn run(experiment: &str, body: &Value, seed: u64) -> Result<Outcome, CliError> {
    match experiment {
        "check theorem21" => theorem21(parse(body)?, seed),
        "check sb-gb" => sb_gb(parse(body)?),
        "check lemma22" => lemma22(parse(body)?, seed),
        "uob estimate" => uob(parse(body)?, seed),
        "experiment heat-maximal" => heat_maximal(parse(body)?),
        "experiment shift-maximal" => shift_maximal(parse(body)?),
        "experiment heat-l1-divergence" => heat_divergence(parse(body)?),
        "ae select" => ae_select(parse(body)?, seed),
        "net cofinal-witness" => witness(parse(body)?),
        other => Err(CliError::usage(format!(
            "experiment: unknown preset `{other}`; expected one of: {}",
            PRESETS.join(", ")
        ))),
    }
}

/// Shortest round-trip text; scientific outside `[1e-4, 1e7)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn one() -> f64 {
    1.0
}

fn five() -> usize {
    5
}

// check theorem21

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Theorem21Config {
    semigroup: Source<SemigroupHandle>,
    #[serde(default)]
    samples: Option<Source<Vec<LatticeVector>>>,
    /// Number of seeded samples when `samples` is absent.
    #[serde(default = "five")]
    n_samples: usize,
    #[serde(default = "one")]
    t0: f64,
    #[serde(default = "default_levels")]
    levels: u32,
    #[serde(default = "default_targets")]
    eps_targets: Vec<f64>,
}

fn default_levels() -> u32 {
    DEFAULT_DYADIC_LEVELS
}

fn default_targets() -> Vec<f64> {
    DEFAULT_EPS_TARGETS.to_vec()
}

/// Seeded samples: uniform vectors for matrices, Gaussian bumps on grids.
fn seeded_samples(handle: &SemigroupHandle, n: usize, seed: u64) -> Vec<LatticeVector> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| match handle.grid() {
            None => LatticeVector::new(random_vector(&mut rng, handle.dim())),
            Some(g) => {
                let centre = rng.random_range(-0.5..0.5) * g.half_width;
                let width = rng.random_range(0.05..0.25) * g.half_width;
                GridFunction::bump(*g, centre, width).to_vector()
            }
        })
        .collect()
}

fn theorem21(cfg: Theorem21Config, seed: u64) -> Result<Outcome, CliError> {
    let handle = cfg.semigroup.load("semigroup")?;
    let samples = match &cfg.samples {
        Some(s) => s.load("samples")?,
        None => seeded_samples(&handle, cfg.n_samples, seed),
    };
    let opts = CertifyOptions { eps_targets: cfg.eps_targets.clone() };
    let cert = certify_theorem21(&handle, &samples, cfg.t0, &Schedule::dyadic(cfg.levels), &opts)?;
    let rows = cert
        .samples
        .iter()
        .enumerate()
        .flat_map(|(k, s)| s.eps_schedule.iter().map(move |&(t, e)| vec![k.to_string(), num(t), num(e)]))
        .collect();
    Ok(Outcome {
        config: to_value(&cfg),
        passed: cert.conditions.all_hold() && cert.consistent,
        result: to_value(&cert),
        tables: vec![Table { name: "eps_schedule", header: vec!["sample", "t", "eps"], rows }],
    })
}

// check sb-gb

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrbitCheck {
    x: LatticeVector,
    /// Defaults to `x + R(0,A)|Ax|`.
    #[serde(default)]
    z: Option<LatticeVector>,
    #[serde(default = "default_orbit_times")]
    ts: Vec<f64>,
}

fn default_orbit_times() -> Vec<f64> {
    (0..=36).map(|k| 1.0 + 0.25 * k as f64).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SbGbConfig {
    generator: Source<MetzlerGenerator>,
    #[serde(default)]
    t1: Option<f64>,
    #[serde(default)]
    t2: Option<f64>,
    #[serde(default = "default_fit_points")]
    n_points: usize,
    #[serde(default)]
    norm: NormArg,
    #[serde(default = "default_sb_tolerance")]
    tolerance: f64,
    #[serde(default)]
    orbit: Option<OrbitCheck>,
}

fn default_fit_points() -> usize {
    64
}

fn default_sb_tolerance() -> f64 {
    1e-2
}

fn sb_gb(cfg: SbGbConfig) -> Result<Outcome, CliError> {
    let a = cfg.generator.load("generator")?;
    let norm = cfg.norm.resolve("norm")?;
    let report = match (cfg.t1, cfg.t2) {
        (Some(t1), Some(t2)) => growth_bound_fit(&SemigroupHandle::Matrix(a.clone()), t1, t2, cfg.n_points, &norm)?,
        (None, None) => growth_bound_fit_default(&a, cfg.n_points, &norm)?,
        _ => return Err(CliError::usage("t1, t2: give both or neither")),
    };
    let mut passed = report.discrepancy.is_some_and(|d| d <= cfg.tolerance);
    let fit_rows = report.samples.iter().map(|&(t, l)| vec![num(t), num(l)]).collect();
    let mut tables = vec![Table { name: "fit", header: vec!["t", "log_norm"], rows: fit_rows }];
    let orbit = match &cfg.orbit {
        None => Value::Null,
        Some(o) => {
            let z = match &o.z {
                Some(z) => z.clone(),
                None => resolvent_apply(&a, &a.apply(&o.x)?.abs())?.add(&o.x.abs())?,
            };
            let rep = orbit_bound_to_norm_bound(&a, &o.x, &z, &o.ts)?;
            passed &= rep.certified;
            let rows = rep.entries.iter().map(|e| vec![num(e.t), num(e.violation)]).collect();
            tables.push(Table { name: "orbit", header: vec!["t", "violation"], rows });
            to_value(&rep)
        }
    };
    Ok(Outcome {
        config: to_value(&cfg),
        result: json!({ "spectral": to_value(&report), "orbit": orbit }),
        tables,
        passed,
    })
}

// check lemma22

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Lemma22Config {
    generator: Source<MetzlerGenerator>,
    #[serde(default)]
    ys: Option<Source<Vec<LatticeVector>>>,
    #[serde(default = "five")]
    n_samples: usize,
    /// Shift the generator so that its spectral bound equals this value.
    #[serde(default)]
    rescale_to: Option<f64>,
    #[serde(default)]
    rate_times: Option<Vec<f64>>,
}

fn lemma22(cfg: Lemma22Config, seed: u64) -> Result<Outcome, CliError> {
    let mut a = cfg.generator.load("generator")?;
    if let Some(target) = cfg.rescale_to {
        a = with_spectral_bound(&a, target)?;
    }
    let ys = match &cfg.ys {
        Some(s) => s.load("ys")?,
        None => {
            let mut rng = rng(seed);
            (0..cfg.n_samples).map(|_| LatticeVector::new(random_vector(&mut rng, a.dim()))).collect()
        }
    };
    let ts: Vec<f64> = match &cfg.rate_times {
        Some(ts) => ts.clone(),
        None => TimeGrid::log_spaced(1e-4, 10.0, 200)?.times()[1..].to_vec(),
    };
    let regulators = regulator_from_dom_a(&a, &ys)?;
    let rates = ys.iter().map(|y| rate_dom_a2(&a, y, &ts)).collect::<Result<Vec<_>, _>>()?;
    let passed = regulators.all_dominated() && rates.iter().all(|r| r.certified);
    let reg_rows = regulators
        .regulators
        .iter()
        .enumerate()
        .map(|(k, r)| vec![k.to_string(), num(r.max_violation), num(r.threshold)])
        .collect();
    let rate_rows = rates
        .iter()
        .enumerate()
        .flat_map(|(k, r)| r.entries.iter().map(move |e| vec![k.to_string(), num(e.t), num(e.violation)]))
        .collect();
    Ok(Outcome {
        config: to_value(&cfg),
        result: json!({ "regulators": to_value(&regulators), "rates": to_value(&rates) }),
        tables: vec![
            Table { name: "regulator", header: vec!["sample", "max_violation", "threshold"], rows: reg_rows },
            Table { name: "rate", header: vec!["sample", "t", "violation"], rows: rate_rows },
        ],
        passed,
    })
}

// uob estimate

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UobConfig {
    family: Source<OperatorFamily>,
    #[serde(default)]
    norm_in: NormArg,
    #[serde(default)]
    norm_out: NormArg,
    #[serde(default = "default_budget")]
    budget: usize,
    #[serde(default = "default_batch")]
    batch_size: usize,
    #[serde(default = "default_polish_fraction")]
    polish_fraction: f64,
    #[serde(default = "yes")]
    polish: bool,
}

fn default_budget() -> usize {
    SamplingSpec::default().budget
}

fn default_batch() -> usize {
    SamplingSpec::default().batch_size
}

fn default_polish_fraction() -> f64 {
    SamplingSpec::default().polish_fraction
}

fn yes() -> bool {
    true
}

fn uob(cfg: UobConfig, seed: u64) -> Result<Outcome, CliError> {
    let ops = cfg.family.load("family")?;
    let spec = SamplingSpec { budget: cfg.budget, seed, batch_size: cfg.batch_size, polish_fraction: cfg.polish_fraction };
    let est = uob_constant(&ops, &cfg.norm_in.resolve("norm_in")?, &cfg.norm_out.resolve("norm_out")?, &spec, cfg.polish)?;
    let rows = est.trace.iter().map(|&(n, m)| vec![n.to_string(), num(m)]).collect();
    Ok(Outcome {
        config: to_value(&cfg),
        result: to_value(&est),
        tables: vec![Table { name: "trace", header: vec!["evaluations", "m_lower"], rows }],
        passed: true,
    })
}

// experiment heat-maximal

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeatMaximalConfig {
    #[serde(default = "default_heat")]
    heat: HeatGrid,
    /// Input function; defaults to a unit-mass spike of width `sigma`.
    #[serde(default)]
    f: Option<Source<GridFunction>>,
    #[serde(default = "default_sigma")]
    sigma: f64,
    #[serde(default = "one")]
    t0: f64,
    #[serde(default = "default_ps")]
    ps: Vec<f64>,
}

fn default_heat() -> HeatGrid {
    HeatGrid::new(Grid { d: 1, half_width: 5.0, points: 1024 }, Boundary::Periodic).expect("valid default grid")
}

fn default_sigma() -> f64 {
    0.125
}

fn default_ps() -> Vec<f64> {
    vec![1.0, 2.0]
}

fn heat_maximal(cfg: HeatMaximalConfig) -> Result<Outcome, CliError> {
    let grid = *cfg.heat.grid();
    let f = match &cfg.f {
        Some(src) => {
            let f = src.load("f")?;
            if f.grid != grid {
                return Err(CliError::usage("f.grid: must match heat.grid"));
            }
            f.validate()?;
            f
        }
        None => {
            let cells = (cfg.sigma / grid.spacing()).round();
            if cells < 1.0 {
                return Err(ruclab::Error::Resolution { requested: cfg.sigma, minimal: grid.spacing() }.into());
            }
            GridFunction::spike(grid, cells as usize)?
        }
    };
    let handle = SemigroupHandle::Heat(cfg.heat.clone());
    let times = TimeGrid::log_spaced(grid.min_resolved_time().min(cfg.t0) / cfg.heat.diffusion().max(1.0), cfg.t0, DEFAULT_TIME_POINTS)?;
    let ob = maximal_function(&handle, &f.to_vector(), &times)?;
    let mut ratios = Vec::new();
    for &p in &cfg.ps {
        let norm = grid.lp_norm(p)?;
        let fn_ = norm.norm(&f.to_vector())?;
        let mn = norm.norm(&ob.y)?;
        ratios.push(json!({ "p": p, "f_norm": fn_, "maximal_norm": mn, "ratio": mn / fn_ }));
    }
    let rows = (0..grid.len())
        .map(|i| {
            let x = if grid.d == 1 { num(grid.coord(i)) } else { String::new() };
            vec![i.to_string(), x, num(f.values[i]), num(ob.y[i])]
        })
        .collect();
    Ok(Outcome {
        config: to_value(&cfg),
        passed: ob.is_stable(),
        result: json!({
            "t0": cfg.t0,
            "ratios": ratios,
            "norm_of_bound": ob.norm_of_bound,
            "stability": ob.stability,
            "stability_threshold": STABILITY_THRESHOLD,
            "under_resolved": ob.under_resolved,
        }),
        tables: vec![Table { name: "maximal", header: vec!["index", "x", "f", "maximal"], rows }],
    })
}

// experiment shift-maximal

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftMaximalConfig {
    #[serde(default = "default_shift_grid")]
    grid: Grid,
    #[serde(default = "default_deltas")]
    deltas: Vec<f64>,
    #[serde(default = "one")]
    t0: f64,
    #[serde(default = "default_ps")]
    ps: Vec<f64>,
    #[serde(default = "default_blowup_tolerance")]
    tolerance: f64,
}

fn default_shift_grid() -> Grid {
    Grid { d: 1, half_width: 1.0, points: 2048 }
}

fn default_deltas() -> Vec<f64> {
    (3..=7).map(|k| 0.5f64.powi(k)).collect()
}

fn default_blowup_tolerance() -> f64 {
    0.05
}

fn shift_maximal(cfg: ShiftMaximalConfig) -> Result<Outcome, CliError> {
    let table = shift_maximal_blowup(cfg.grid, &cfg.deltas, cfg.t0, &cfg.ps)?;
    let rows = table
        .rows
        .iter()
        .map(|r| vec![num(r.delta), num(r.p), num(r.ratio), num(r.closed_form), num(r.relative_error)])
        .collect();
    Ok(Outcome {
        config: to_value(&cfg),
        passed: table.max_relative_error <= cfg.tolerance,
        result: to_value(&table),
        tables: vec![Table { name: "blowup", header: vec!["delta", "p", "ratio", "closed_form", "relative_error"], rows }],
    })
}

// experiment heat-l1-divergence

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeatDivergenceConfig {
    #[serde(default = "default_divergence_grid")]
    grid: Grid,
    #[serde(default = "default_sigmas")]
    sigmas: Vec<f64>,
    #[serde(default = "one")]
    t0: f64,
    /// Required last/first ratio of the `p = 1` column.
    #[serde(default = "default_min_growth")]
    min_growth: f64,
    /// Allowed max/min ratio of the `p = 2` column.
    #[serde(default = "default_max_spread")]
    max_spread: f64,
}

fn default_divergence_grid() -> Grid {
    Grid { d: 1, half_width: 8.0, points: 8192 }
}

fn default_sigmas() -> Vec<f64> {
    (2..=7).map(|k| 0.5f64.powi(k)).collect()
}

fn default_min_growth() -> f64 {
    2.0
}

fn default_max_spread() -> f64 {
    3.0
}

fn heat_divergence(cfg: HeatDivergenceConfig) -> Result<Outcome, CliError> {
    let table = heat_l1_divergence(cfg.grid, &cfg.sigmas, cfg.t0)?;
    let rows = table.rows.iter().map(|r| vec![num(r.sigma), num(r.p), num(r.ratio)]).collect();
    let passed = table.p1_strictly_increasing && table.p1_growth >= cfg.min_growth && table.p2_spread <= cfg.max_spread;
    Ok(Outcome {
        config: to_value(&cfg),
        passed,
        result: to_value(&table),
        tables: vec![Table { name: "divergence", header: vec!["sigma", "p", "ratio"], rows }],
    })
}

// ae select

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AeSelectConfig {
    model: Source<MeasureSpaceModel>,
    f: Source<RepresentedFunction>,
    /// Defaults to 1 at every point.
    #[serde(default)]
    u: Option<Source<RepresentedFunction>>,
    #[serde(default)]
    net: Option<Source<IndexedNet<RepresentedFunction>>>,
    /// Closed-form class values; null values are perturbed from `f` by the seed.
    #[serde(default)]
    family: Option<NetFamily>,
    #[serde(default)]
    semigroup: Option<Source<SemigroupHandle>>,
    #[serde(default)]
    schedule: NetSchedule,
}

fn perturbed_nulls(rng: &mut ChaCha8Rng, f: &RepresentedFunction) -> Vec<f64> {
    f.null_values
        .iter()
        .map(|&v| {
            let size = rng.random_range(0.5..1.5);
            if rng.random_bool(0.5) {
                v + size
            } else {
                v - size
            }
        })
        .collect()
}

fn pointwise_rows(pre: &PointwiseSummary, post: &PointwiseSummary) -> Vec<Vec<String>> {
    pre.points
        .iter()
        .zip(&post.points)
        .map(|(a, b)| {
            let last = |p: &ruclab::uoae::PointTrace| p.tails.last().copied().unwrap_or(0.0);
            vec![
                a.label.clone(),
                a.null.to_string(),
                num(last(a)),
                num(last(b)),
                a.converges.to_string(),
                b.converges.to_string(),
            ]
        })
        .collect()
}

fn selection_tables(sel: &SelectionReport) -> Vec<Table> {
    vec![
        Table {
            name: "pointwise",
            header: vec!["point", "null", "pre_tail", "post_tail", "pre_converges", "post_converges"],
            rows: pointwise_rows(&sel.pre, &sel.post),
        },
        Table {
            name: "overrides",
            header: vec!["index", "point", "old", "new"],
            rows: sel.overrides.iter().map(|o| vec![o.index.to_string(), o.point.clone(), num(o.old), num(o.new)]).collect(),
        },
    ]
}

fn ae_select(cfg: AeSelectConfig, seed: u64) -> Result<Outcome, CliError> {
    let model = cfg.model.load("model")?;
    let f = cfg.f.load("f")?;
    let u = match &cfg.u {
        Some(u) => u.load("u")?,
        None => RepresentedFunction::new(vec![1.0; model.n_atoms()], vec![1.0; model.n_null()]),
    };
    let given = [cfg.net.is_some(), cfg.family.is_some(), cfg.semigroup.is_some()];
    if given.iter().filter(|&&b| b).count() != 1 {
        return Err(CliError::usage("net, family, semigroup: give exactly one"));
    }
    let (result, sel_tables, passed) = if let Some(src) = &cfg.semigroup {
        let handle = src.load("semigroup")?;
        let rep = orbit_ae_continuity(&handle, &model, &f, &u, &cfg.schedule, seed)?;
        (to_value(&rep), selection_tables(&rep.selection), rep.post_converges)
    } else {
        let net = match (&cfg.net, &cfg.family) {
            (Some(src), _) => src.load("net")?,
            (None, Some(family)) => {
                family.validate()?;
                let mut rng = rng(seed);
                let values: Vec<RepresentedFunction> = cfg
                    .schedule
                    .times()
                    .iter()
                    .map(|&t| RepresentedFunction::new(family.eval(t).into_vec(), perturbed_nulls(&mut rng, &f)))
                    .collect();
                IndexedNet::new(cfg.schedule.model(), values, cfg.schedule.cofinal())?
            }
            (None, None) => unreachable!("exactly one source is present"),
        };
        let sel = select_representatives(&model, &net, &f, &u)?;
        (to_value(&sel), selection_tables(&sel), sel.post.all_points)
    };
    Ok(Outcome { config: to_value(&cfg), result, tables: sel_tables, passed })
}

// net cofinal-witness

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessConfig {
    #[serde(default)]
    net: Option<Source<IndexedNet<LatticeVector>>>,
    #[serde(default)]
    family: Option<NetFamily>,
    #[serde(default)]
    schedule: NetSchedule,
    /// The candidate limit `x`; the envelope runs on `x_j - x`. Defaults to the
    /// family's closed-form limit, else 0.
    #[serde(default)]
    limit: Option<LatticeVector>,
    /// Test vector for an additional uo check.
    #[serde(default)]
    u: Option<LatticeVector>,
}

fn witness(cfg: WitnessConfig) -> Result<Outcome, CliError> {
    let net = match (&cfg.net, &cfg.family) {
        (Some(src), None) => src.load("net")?,
        (None, Some(family)) => family.sample(&cfg.schedule)?,
        _ => return Err(CliError::usage("net, family: give exactly one")),
    };
    let dim = net.values.first().map_or(0, LatticeVector::len);
    let limit = cfg
        .limit
        .clone()
        .or_else(|| cfg.family.as_ref().and_then(NetFamily::limit))
        .unwrap_or_else(|| LatticeVector::zeros(dim));
    let mut shifted = Vec::with_capacity(net.len());
    for v in &net.values {
        shifted.push(v.sub(&limit)?);
    }
    let centred = IndexedNet::new(net.model.clone(), shifted, net.cofinal.clone())?;
    let envelope = cofinal_envelope(&centred)?;
    let outcome = cofinal_witness(&centred)?;
    let uo = match &cfg.u {
        Some(u) => to_value(&uo_check(&net, &limit, u, &DEFAULT_UO_THRESHOLDS)?),
        None => Value::Null,
    };
    let passed = match &outcome {
        WitnessOutcome::NoWitnessNeeded { .. } => true,
        WitnessOutcome::Witness(w) => w.cofinal && w.dominates_half(),
    };
    let env_rows = envelope
        .tails
        .iter()
        .enumerate()
        .map(|(n, y)| vec![n.to_string(), net.cofinal[n].to_string(), num(y.max_abs())])
        .collect();
    let mut tables = vec![Table { name: "envelope", header: vec!["position", "index", "tail_norm"], rows: env_rows }];
    if let WitnessOutcome::Witness(w) = &outcome {
        let rows = w
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(b, block)| block.iter().map(move |&j| vec![b.to_string(), j.to_string()]))
            .collect();
        tables.push(Table { name: "witness", header: vec!["block", "index"], rows });
    }
    Ok(Outcome {
        config: to_value(&cfg),
        result: json!({ "limit": to_value(&limit), "envelope": to_value(&envelope), "witness": to_value(&outcome), "uo": uo }),
        tables,
        passed,
    })
}
