//! Parallel parameter sweeps.
//!
//! Every `(cell, trial)` pair is an independent task whose seed is derived
//! from `(base_seed, ix, iy, trial)`. Results land in pre-allocated slots
//! keyed by index, so a diagram is a pure function of its spec no matter
//! how many workers evaluate it or in which order.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify_run, ClassifierThresholds, Macrostate, RunOutcome};
use crate::error::{Result, SwarmError};
use crate::geom::Point;
use crate::init::{random_connected_init, regular_polygon_mill, Spin};
use crate::mill::{predicted_radius, DEFAULT_TOL_PHI};
use crate::params::{SimConfig, SwarmParams};
use crate::seed::derive_seed;
use crate::state::Microstate;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "SWARMKIT_WORKERS";

pub const DEFAULT_TRIALS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    Gamma,
    V,
    Omega,
    Phi,
    N,
}

impl ParamName {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Gamma => "gamma",
            ParamName::V => "v",
            ParamName::Omega => "omega",
            ParamName::Phi => "phi",
            ParamName::N => "n",
        }
    }
}

/// One sweep axis. `phi` values are radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: ParamName,
    pub values: Vec<f64>,
}

/// Opening angle for parameters not on an axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiSetting {
    Radians(f64),
    /// `2 pi / N` for each cell's `N`.
    Critical,
}

/// Values of the parameters not swept. Entries for swept parameters are
/// ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    pub gamma: f64,
    pub v: f64,
    pub omega: f64,
    pub phi: PhiSetting,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    RandomConnected,
    /// Perfect polygon at the predicted radius, turning in the mill sense.
    Polygon,
}

/// Radius of the disk random initial positions are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spread {
    Fixed(f64),
    /// `k * gamma * sqrt(N)`, which keeps the expected number of agents
    /// within sensing range of one another independent of `N`.
    Scaled(f64),
}

impl Spread {
    pub fn radius(self, params: &SwarmParams) -> f64 {
        match self {
            Spread::Fixed(r) => r,
            Spread::Scaled(k) => k * params.gamma() * (params.n() as f64).sqrt(),
        }
    }
}

/// Integration settings shared by the cells of a sweep. `dt` defaults to
/// each cell's [`SwarmParams::default_dt`]; with `per_omega` the horizon
/// is measured in units of `1 / omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimTemplate {
    pub horizon: f64,
    #[serde(default)]
    pub per_omega: bool,
    #[serde(default)]
    pub dt: Option<f64>,
    pub samples: u64,
}

impl SimTemplate {
    pub fn config_for(&self, params: &SwarmParams, seed: u64) -> Result<SimConfig> {
        let horizon = if self.per_omega {
            self.horizon / params.omega()
        } else {
            self.horizon
        };
        let base = SimConfig::for_params(params, horizon, seed, self.samples)?;
        match self.dt {
            None => Ok(base),
            Some(dt) => {
                let steps = ((horizon / dt) - 1e-9).ceil().max(1.0) as u64;
                SimConfig::new(dt, horizon, seed, (steps / self.samples.max(1)).max(1))
            }
        }
    }
}

/// Optional overrides on top of [`ClassifierThresholds::for_params`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdOverrides {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub delta_c: Option<f64>,
    pub delta_omega: Option<f64>,
    pub eps_lambda: Option<f64>,
    pub tail_fraction: Option<f64>,
    pub range_slack: Option<f64>,
}

impl ThresholdOverrides {
    pub fn resolve(&self, params: &SwarmParams) -> ClassifierThresholds {
        let d = ClassifierThresholds::for_params(params);
        ClassifierThresholds {
            c1: self.c1.unwrap_or(d.c1),
            c2: self.c2.unwrap_or(d.c2),
            delta_c: self.delta_c.unwrap_or(d.delta_c),
            delta_omega: self.delta_omega.unwrap_or(d.delta_omega),
            eps_lambda: self.eps_lambda.unwrap_or(d.eps_lambda),
            tail_fraction: self.tail_fraction.unwrap_or(d.tail_fraction),
            range_slack: self.range_slack.unwrap_or(d.range_slack),
        }
    }
}

/// Shared trial settings for any set of cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSettings {
    pub trials: usize,
    pub init: InitKind,
    pub spread: Spread,
    pub base_seed: u64,
    pub sim: SimTemplate,
    pub thresholds: ThresholdOverrides,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis_x: Axis,
    /// Absent for one-dimensional sweeps.
    #[serde(default)]
    pub axis_y: Option<Axis>,
    pub fixed: FixedParams,
    #[serde(default = "default_trials")]
    pub trials_per_cell: usize,
    pub init: InitKind,
    pub spread: Spread,
    pub base_seed: u64,
    pub sim: SimTemplate,
    #[serde(default)]
    pub thresholds: ThresholdOverrides,
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SwarmError::InvalidSweep(m));
        let mut axes = vec![&self.axis_x];
        if let Some(y) = &self.axis_y {
            if y.param == self.axis_x.param {
                return bad(format!("both axes sweep {}", y.param.as_str()));
            }
            axes.push(y);
        }
        for a in axes {
            if a.values.is_empty() {
                return bad(format!("axis {} has no values", a.param.as_str()));
            }
            if a.values.windows(2).any(|w| !(w[1] > w[0])) {
                return bad(format!("axis {} must be strictly increasing", a.param.as_str()));
            }
            if a.param == ParamName::N && a.values.iter().any(|v| v.fract() != 0.0 || *v < 2.0) {
                return bad("axis n must hold integers >= 2".into());
            }
        }
        if self.trials_per_cell == 0 {
            return bad("trials_per_cell must be >= 1".into());
        }
        if self.sim.samples == 0 || !(self.sim.horizon > 0.0) {
            return bad("sim needs horizon > 0 and samples >= 1".into());
        }
        // every cell must give valid parameters
        for iy in 0..self.ny() {
            for ix in 0..self.nx() {
                self.cell_params(ix, iy)?;
            }
        }
        Ok(())
    }

    pub fn nx(&self) -> usize {
        self.axis_x.values.len()
    }

    pub fn ny(&self) -> usize {
        self.axis_y.as_ref().map_or(1, |a| a.values.len())
    }

    pub fn settings(&self) -> TrialSettings {
        TrialSettings {
            trials: self.trials_per_cell,
            init: self.init,
            spread: self.spread,
            base_seed: self.base_seed,
            sim: self.sim,
            thresholds: self.thresholds,
        }
    }

    /// Parameters of cell `(ix, iy)`.
    pub fn cell_params(&self, ix: usize, iy: usize) -> Result<SwarmParams> {
        let f = &self.fixed;
        let (mut gamma, mut v, mut omega, mut n) = (f.gamma, f.v, f.omega, f.n);
        let mut phi = f.phi;
        let mut set = |axis: &Axis, i: usize| {
            let x = axis.values[i];
            match axis.param {
                ParamName::Gamma => gamma = x,
                ParamName::V => v = x,
                ParamName::Omega => omega = x,
                ParamName::Phi => phi = PhiSetting::Radians(x),
                ParamName::N => n = x as usize,
            }
        };
        set(&self.axis_x, ix);
        if let Some(y) = &self.axis_y {
            set(y, iy);
        }
        let phi = match phi {
            PhiSetting::Radians(p) => p,
            PhiSetting::Critical => TAU / n.max(1) as f64,
        };
        SwarmParams::new(gamma, v, omega, phi, n)
    }
}

/// Outcome of a single trial; `None` marks a run that failed (non-finite state).
pub type TrialLabel = Option<Macrostate>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub ix: usize,
    pub iy: usize,
    pub params: SwarmParams,
    /// Majority label; `None` when failed runs are the majority.
    pub label: TrialLabel,
    /// Tallies indexed like [`Macrostate::ALL`].
    pub label_counts: [usize; 6],
    pub failed: usize,
    /// Mean measured radius over the trials labeled M or P.
    pub mean_mill_radius: Option<f64>,
    /// Mean over successful trials of the tail circliness supremum.
    pub mean_tail_circliness: Option<f64>,
    pub trial_labels: Vec<TrialLabel>,
}

impl CellResult {
    pub fn count(&self, m: Macrostate) -> usize {
        self.label_counts[m.index()]
    }

    pub fn fraction(&self, m: Macrostate) -> f64 {
        self.count(m) as f64 / self.trial_labels.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub spec: SweepSpec,
    /// Row-major: `cells[iy * nx + ix]`.
    pub cells: Vec<CellResult>,
}

impl PhaseDiagram {
    pub fn cell(&self, ix: usize, iy: usize) -> &CellResult {
        &self.cells[iy * self.spec.nx() + ix]
    }
}

/// Majority over trial labels; ties go to the most severe label
/// (S, C, P, M, E, U, then failed).
pub fn majority(labels: &[TrialLabel]) -> TrialLabel {
    let mut best: (usize, TrialLabel) = (0, None);
    let failed = labels.iter().filter(|l| l.is_none()).count();
    for m in Macrostate::ALL {
        let c = labels.iter().filter(|&&l| l == Some(m)).count();
        if c > best.0 {
            best = (c, Some(m));
        }
    }
    if failed > best.0 {
        None
    } else {
        best.1
    }
}

/// Seed of trial `trial` in cell `(ix, iy)`.
pub fn trial_seed(base_seed: u64, ix: usize, iy: usize, trial: usize) -> u64 {
    derive_seed(base_seed, &[ix as u64, iy as u64, trial as u64])
}

/// Initial state for one trial.
pub fn initial_state(params: &SwarmParams, settings: &TrialSettings, seed: u64) -> Result<Microstate> {
    match settings.init {
        InitKind::RandomConnected => random_connected_init(params, settings.spread.radius(params), seed),
        InitKind::Polygon => {
            let r = predicted_radius(params.gamma(), params.n())?;
            regular_polygon_mill(params, r, Point::ORIGIN, Spin::MILL)
        }
    }
}

/// Runs one trial. Errors are surfaced so that callers can decide whether
/// they abort (setup mistakes) or are tallied as failed runs.
pub fn run_trial(params: &SwarmParams, settings: &TrialSettings, seed: u64) -> Result<RunOutcome> {
    let init = initial_state(params, settings, seed)?;
    let cfg = settings.sim.config_for(params, seed)?;
    let th = settings.thresholds.resolve(params);
    classify_run(&init, params, &cfg, &th)
}

/// Worker count: explicit argument, else the environment override, else
/// rayon's default.
pub fn worker_count(requested: Option<usize>) -> usize {
    requested
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|s| s.parse().ok()))
        .filter(|&w| w > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Evaluates every trial of every cell. `cells` holds `(ix, iy, params)`.
pub fn evaluate_cells(
    cells: &[(usize, usize, SwarmParams)],
    settings: &TrialSettings,
    workers: Option<usize>,
) -> Result<Vec<CellResult>> {
    let trials = settings.trials;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(workers))
        .build()
        .map_err(|e| SwarmError::InvalidSweep(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<Option<RunOutcome>>> = pool.install(|| {
        (0..cells.len() * trials)
            .into_par_iter()
            .map(|k| {
                let (ix, iy, params) = &cells[k / trials];
                let seed = trial_seed(settings.base_seed, *ix, *iy, k % trials);
                match run_trial(params, settings, seed) {
                    Ok(o) => Ok(Some(o)),
                    Err(SwarmError::NonFinite { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect()
    });
    let mut outcomes = outcomes.into_iter();
    cells
        .iter()
        .map(|&(ix, iy, params)| {
            let runs: Vec<Option<RunOutcome>> = outcomes.by_ref().take(trials).collect::<Result<_>>()?;
            Ok(aggregate(ix, iy, params, &runs))
        })
        .collect()
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, k) = xs.fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    (k > 0).then(|| s / k as f64)
}

fn aggregate(ix: usize, iy: usize, params: SwarmParams, runs: &[Option<RunOutcome>]) -> CellResult {
    let trial_labels: Vec<TrialLabel> = runs.iter().map(|r| r.as_ref().map(|o| o.label)).collect();
    let mut label_counts = [0usize; 6];
    for l in trial_labels.iter().flatten() {
        label_counts[l.index()] += 1;
    }
    CellResult {
        ix,
        iy,
        params,
        label: majority(&trial_labels),
        label_counts,
        failed: trial_labels.iter().filter(|l| l.is_none()).count(),
        mean_mill_radius: mean(runs.iter().flatten().filter_map(|o| o.mill_radius)),
        mean_tail_circliness: mean(runs.iter().flatten().map(|o| o.stats.c_sup)),
        trial_labels,
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<PhaseDiagram> {
    run_sweep_with_workers(spec, None)
}

pub fn run_sweep_with_workers(spec: &SweepSpec, workers: Option<usize>) -> Result<PhaseDiagram> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.nx() * spec.ny());
    for iy in 0..spec.ny() {
        for ix in 0..spec.nx() {
            cells.push((ix, iy, spec.cell_params(ix, iy)?));
        }
    }
    let cells = evaluate_cells(&cells, &spec.settings(), workers)?;
    Ok(PhaseDiagram {
        spec: spec.clone(),
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusPoint {
    pub n: usize,
    pub label: TrialLabel,
    /// Fraction of trials labeled M or P.
    pub mill_fraction: f64,
    pub measured: Option<f64>,
    /// Closed-form radius, present only where `phi = 2 pi / N`.
    pub predicted: Option<f64>,
}

/// Measured versus predicted mill radius along an `N` sweep.
pub fn radius_study(spec: &SweepSpec, workers: Option<usize>) -> Result<Vec<RadiusPoint>> {
    if spec.axis_x.param != ParamName::N || spec.axis_y.is_some() {
        return Err(SwarmError::InvalidSweep("radius study sweeps n alone".into()));
    }
    let diagram = run_sweep_with_workers(spec, workers)?;
    Ok(diagram
        .cells
        .iter()
        .map(|c| {
            let n = c.params.n();
            let critical = (c.params.phi() - TAU / n as f64).abs() <= DEFAULT_TOL_PHI;
            RadiusPoint {
                n,
                label: c.label,
                mill_fraction: (c.count(Macrostate::M) + c.count(Macrostate::P)) as f64 / c.trial_labels.len() as f64,
                measured: c.mean_mill_radius,
                predicted: critical.then(|| predicted_radius(c.params.gamma(), n).expect("n >= 2")),
            }
        })
        .collect())
}

/// Settings for the turning-radius versus mill-radius separation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    /// Agent count, fixed across the grid.
    pub n: usize,
    /// Forward speed, fixed; `omega` is solved from the turning radius.
    pub v: f64,
    pub turning_radii: Vec<f64>,
    pub mill_radii: Vec<f64>,
    pub settings: TrialSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub turning_radius: f64,
    pub mill_radius: f64,
    pub label: TrialLabel,
    pub m_fraction: f64,
    pub trial_labels: Vec<TrialLabel>,
}

impl BoundarySpec {
    /// Parameters with `gamma = 2 R_m sin(pi / N)`, `phi = 2 pi / N` and
    /// `omega = v / turning_radius`.
    pub fn params(&self, turning_radius: f64, mill_radius: f64) -> Result<SwarmParams> {
        let gamma = 2.0 * mill_radius * (PI / self.n as f64).sin();
        SwarmParams::critical(gamma, self.v, self.v / turning_radius, self.n)
    }
}

pub fn boundary_study(spec: &BoundarySpec, workers: Option<usize>) -> Result<Vec<BoundaryPoint>> {
    let mut cells = Vec::new();
    for (iy, &rm) in spec.mill_radii.iter().enumerate() {
        for (ix, &rt) in spec.turning_radii.iter().enumerate() {
            cells.push((ix, iy, spec.params(rt, rm)?));
        }
    }
    let results = evaluate_cells(&cells, &spec.settings, workers)?;
    Ok(results
        .into_iter()
        .map(|c| BoundaryPoint {
            turning_radius: spec.turning_radii[c.ix],
            mill_radius: spec.mill_radii[c.iy],
            label: c.label,
            m_fraction: c.fraction(Macrostate::M),
            trial_labels: c.trial_labels,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_tie_break_prefers_severity() {
        use Macrostate::*;
        assert_eq!(majority(&[Some(M), Some(S)]), Some(S));
        assert_eq!(majority(&[Some(U), Some(E), Some(E)]), Some(E));
        assert_eq!(majority(&[Some(U), None, None]), None);
        assert_eq!(majority(&[Some(U), None]), Some(U));
        assert_eq!(majority(&[Some(P), Some(M), Some(C), Some(U)]), Some(C));
    }

    fn spec() -> SweepSpec {
        SweepSpec {
            axis_x: Axis {
                param: ParamName::N,
                values: vec![3.0, 4.0],
            },
            axis_y: Some(Axis {
                param: ParamName::V,
                values: vec![0.1, 0.2],
            }),
            fixed: FixedParams {
                gamma: 1.0,
                v: 1.0,
                omega: 1.0,
                phi: PhiSetting::Critical,
                n: 5,
            },
            trials_per_cell: 2,
            init: InitKind::Polygon,
            spread: Spread::Scaled(0.3),
            base_seed: 9,
            sim: SimTemplate {
                horizon: 5.0,
                per_omega: true,
                dt: Some(0.05),
                samples: 40,
            },
            thresholds: ThresholdOverrides::default(),
        }
    }

    #[test]
    fn cell_parameters_follow_axes() {
        let s = spec();
        let p = s.cell_params(1, 1).unwrap();
        assert_eq!(p.n(), 4);
        assert_eq!(p.v(), 0.2);
        assert!((p.phi() - TAU / 4.0).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let mut s = spec();
        s.validate().unwrap();
        s.axis_y.as_mut().unwrap().param = ParamName::N;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.axis_x.values = vec![3.0, 3.5];
        assert!(s.validate().is_err());
        let mut s = spec();
        s.axis_x.values = vec![4.0, 3.0];
        assert!(s.validate().is_err());
        let mut s = spec();
        s.trials_per_cell = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn diagram_shape_and_counts() {
        let d = run_sweep_with_workers(&spec(), Some(2)).unwrap();
        assert_eq!(d.cells.len(), 4);
        for c in &d.cells {
            assert_eq!(c.label_counts.iter().sum::<usize>() + c.failed, 2);
            assert_eq!(majority(&c.trial_labels), c.label);
        }
    }
}
