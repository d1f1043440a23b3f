//! Subcommand implementations. Each writes its results to the given sink;
//! `main` wires them to stdout and turns errors into a single stderr line.

use std::f64::consts::TAU;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use swarmkit::classify::{classify_trajectory, ClassifierThresholds, RunOutcome};
use swarmkit::dynamics::run;
use swarmkit::io::{config::RunConfig, csv, svg, trajectory};
use swarmkit::metrics::metric_series;
use swarmkit::mill::{deploy_set, predicted_breakup_n, predicted_radius, pstar_membership, SpeedTurnBox, DEFAULT_TOL_PHI};
use swarmkit::params::SwarmParams;
use swarmkit::sweep::{radius_study, run_sweep_with_workers, ParamName, PhaseDiagram};
use swarmkit::{Result, SwarmError};

fn io_err(path: &Path, e: std::io::Error) -> SwarmError {
    SwarmError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// Short machine-readable category for an error.
pub fn error_kind(e: &SwarmError) -> &'static str {
    match e {
        SwarmError::InvalidParam { .. } => "invalid_param",
        SwarmError::InitRejected { .. } => "init_rejected",
        SwarmError::NonFinite { .. } => "non_finite",
        SwarmError::DirectedGraph => "directed_graph",
        SwarmError::TailTooShort { .. } => "tail_too_short",
        SwarmError::EmptyFeasibleSet(_) => "empty_feasible_set",
        SwarmError::InvalidSweep(_) => "invalid_sweep",
        SwarmError::Config(_) => "config",
        SwarmError::TrajectoryFormat { .. } => "trajectory_format",
        SwarmError::Io(_) => "io",
    }
}

/// `error kind=<kind> message="<text>"` on one line.
pub fn error_line(e: &SwarmError) -> String {
    let msg = e.to_string().replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ");
    format!("error kind={} message=\"{msg}\"", error_kind(e))
}

/// Report printed by `simulate` and `classify`.
pub fn outcome_report(o: &RunOutcome) -> String {
    let s = &o.stats;
    let mut r = format!(
        "label = {}\nc_sup = {:?}\nc_inf = {:?}\nomega_sup = {:?}\nomega_inf = {:?}\nlambda_min = {:?}\nlambda_max = {:?}\ntail_samples = {}\n",
        o.label, s.c_sup, s.c_inf, s.omega_sup, s.omega_inf, s.lambda_min, s.lambda_max, s.samples
    );
    if let Some(rad) = o.mill_radius {
        r.push_str(&format!("mill_radius = {rad:?}\n"));
    }
    r
}

/// Metrics CSV path used when none is given: `<out>.metrics.csv`.
pub fn default_metrics_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".metrics.csv");
    PathBuf::from(s)
}

pub struct SimulateArgs<'a> {
    pub config: &'a Path,
    pub out: &'a Path,
    pub metrics: Option<&'a Path>,
    pub echo_config: Option<&'a Path>,
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<RunOutcome> {
    let cfg = RunConfig::load(args.config)?;
    if let Some(p) = args.echo_config {
        write_file(p, &cfg.to_toml())?;
    }
    let init = cfg.initial_state()?;
    let traj = run(&init, &cfg.params, &cfg.sim)?;
    trajectory::save(&traj, args.out)?;
    let series = metric_series(&traj);
    let metrics_path = args.metrics.map(Path::to_path_buf).unwrap_or_else(|| default_metrics_path(args.out));
    write_file(&metrics_path, &csv::metrics_csv(&series))?;
    let outcome = classify_trajectory(&traj, &cfg.thresholds)?;
    emit(out, &outcome_report(&outcome))?;
    Ok(outcome)
}

/// Re-classifies a stored run; thresholds come from `config` when given,
/// else from the defaults for the stored parameters.
pub fn cmd_classify(traj_path: &Path, config: Option<&Path>, out: &mut dyn Write) -> Result<RunOutcome> {
    let traj = trajectory::load(traj_path)?;
    let th = match config {
        Some(p) => RunConfig::load(p)?.thresholds,
        None => ClassifierThresholds::for_params(&traj.params),
    };
    let outcome = classify_trajectory(&traj, &th)?;
    emit(out, &outcome_report(&outcome))?;
    Ok(outcome)
}

/// Rounds to 12 significant digits so that closed-form values print
/// without representation noise.
pub fn tidy(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PredictArgs {
    pub gamma: f64,
    pub n: usize,
    pub v: Option<f64>,
    pub omega: Option<f64>,
    /// Radians.
    pub phi: Option<f64>,
}

pub fn cmd_predict(a: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    let rm = predicted_radius(a.gamma, a.n)?;
    let mut r = format!("R_m = {:?}\n", tidy(rm));
    r.push_str(&format!("R_m_exact = {rm:?}\n"));
    r.push_str(&format!("critical_phi_rad = {:?}\n", TAU / a.n as f64));
    if let Some(phi) = a.phi {
        r.push_str(&format!("breakup_n = {}\n", predicted_breakup_n(phi)?));
    }
    if let (Some(v), Some(omega), Some(phi)) = (a.v, a.omega, a.phi) {
        let p = SwarmParams::new(a.gamma, v, omega, phi, a.n)?;
        let m = pstar_membership(&p, DEFAULT_TOL_PHI);
        r.push_str(&format!("in_pstar = {}\n", m.in_pstar));
        for c in &m.constraints {
            r.push_str(&format!("constraint {} holds={} margin={:?}\n", c.name, c.holds, c.margin));
        }
    }
    emit(out, &r)
}

pub fn cmd_predict_config(config: &Path, out: &mut dyn Write) -> Result<()> {
    let p = RunConfig::load(config)?.params;
    cmd_predict(
        &PredictArgs {
            gamma: p.gamma(),
            n: p.n(),
            v: Some(p.v()),
            omega: Some(p.omega()),
            phi: Some(p.phi()),
        },
        out,
    )
}

pub struct DeployArgs {
    pub r_star: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub k: usize,
    pub seed: u64,
    pub bounds: SpeedTurnBox,
}

pub fn cmd_deploy(a: &DeployArgs, out: &mut dyn Write) -> Result<()> {
    let set = deploy_set(a.r_star, a.n_min..=a.n_max, a.k, a.seed, a.bounds)?;
    emit(out, &csv::deploy_csv(&set))
}

/// Runs a sweep file and writes `phase.csv`, `phase.svg` and the effective
/// `spec.toml` into `out_dir`; one-dimensional sweeps over `n` also get
/// `radius.csv`.
pub fn cmd_sweep(spec_path: &Path, out_dir: &Path, workers: Option<usize>, out: &mut dyn Write) -> Result<PhaseDiagram> {
    let spec = swarmkit::io::load_sweep(spec_path)?;
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let diagram = run_sweep_with_workers(&spec, workers)?;
    write_file(&out_dir.join("spec.toml"), &swarmkit::io::sweep_to_toml(&spec))?;
    write_file(&out_dir.join("phase.csv"), &csv::phase_csv(&diagram))?;
    write_file(&out_dir.join("phase.svg"), &svg::phase_svg(&diagram))?;
    if spec.axis_x.param == ParamName::N && spec.axis_y.is_none() {
        // same seeds, so this repeats the diagram's runs
        let points = radius_study(&spec, workers)?;
        write_file(&out_dir.join("radius.csv"), &csv::radius_csv(&points))?;
    }
    let mut tally = [0usize; 7];
    for c in &diagram.cells {
        tally[c.label.map_or(6, |m| m.index())] += 1;
    }
    let mut r = format!("cells = {}\n", diagram.cells.len());
    for (m, count) in swarmkit::Macrostate::ALL.iter().zip(tally) {
        r.push_str(&format!("majority_{} = {count}\n", m.letter()));
    }
    r.push_str(&format!("majority_failed = {}\n", tally[6]));
    r.push_str(&format!("output = {}\n", out_dir.display()));
    emit(out, &r)?;
    Ok(diagram)
}

/// Writes `frames` evenly spaced SVG snapshots into `out_dir`.
pub fn cmd_replay(traj_path: &Path, out_dir: &Path, frames: usize, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let traj = trajectory::load(traj_path)?;
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let idx = svg::frame_indices(traj.samples.len(), frames);
    let mut paths = Vec::with_capacity(idx.len());
    for (k, body) in idx.iter().zip(svg::replay_frames(&traj, &idx)) {
        let p = out_dir.join(format!("frame_{k:06}.svg"));
        write_file(&p, &body)?;
        paths.push(p);
    }
    let mut r = String::new();
    for p in &paths {
        r.push_str(&format!("{}\n", p.display()));
    }
    emit(out, &r)?;
    Ok(paths)
}
