//! TOML run and sweep configuration files.
//!
//! Run files have four tables:
//!
//! ```toml
//! [params]
//! gamma = 1.0
//! v = 0.3
//! omega = 1.0
//! n = 10
//! phi_deg = 36.0        # or phi_rad = 0.628..., or phi = "critical" (2 pi / n)
//!
//! [sim]
//! horizon = 300.0
//! dt = 0.01             # default: min(0.01 / omega, 0.01 gamma / v)
//! seed = 7              # default 0
//! record_stride = 10    # default: derived from `samples` (default 1000)
//!
//! [init]
//! kind = "polygon"      # polygon | random_connected | counterexample
//! radius = 1.618        # polygon, counterexample; default gamma / (2 sin(pi / n))
//! spin = "clockwise"    # polygon; default clockwise
//! spread = 1.0          # random_connected; default 0.3 gamma sqrt(n)
//!
//! [thresholds]          # any subset of the classifier thresholds
//! c2 = 0.8
//! ```
//!
//! Unknown keys are errors. The opening angle must carry its unit.
//! [`RunConfig::to_toml`] writes the effective configuration with every
//! default filled in; parsing it back yields the same [`RunConfig`].

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::classify::ClassifierThresholds;
use crate::error::{Result, SwarmError};
use crate::geom::Point;
use crate::init::{counterexample_config, random_connected_init, regular_polygon_mill, Spin};
use crate::mill::predicted_radius;
use crate::params::{SimConfig, SwarmParams};
use crate::state::Microstate;
use crate::sweep::{
    Axis, FixedParams, InitKind, ParamName, PhiSetting, SimTemplate, Spread, SweepSpec, ThresholdOverrides,
    DEFAULT_TRIALS,
};

pub const DEFAULT_SAMPLES: u64 = 1000;
pub const DEFAULT_SPREAD_SCALE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitSpec {
    Polygon { radius: f64, spin: Spin },
    RandomConnected { spread: f64 },
    Counterexample { radius: f64 },
}

impl InitSpec {
    /// Builds the initial microstate; random placement uses `seed`.
    pub fn build(&self, params: &SwarmParams, seed: u64) -> Result<Microstate> {
        match *self {
            InitSpec::Polygon { radius, spin } => regular_polygon_mill(params, radius, Point::ORIGIN, spin),
            InitSpec::RandomConnected { spread } => random_connected_init(params, spread, seed),
            InitSpec::Counterexample { radius } => counterexample_config(params, radius),
        }
    }
}

/// Effective configuration of a single run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub params: SwarmParams,
    pub sim: SimConfig,
    pub init: InitSpec,
    pub thresholds: ClassifierThresholds,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    gamma: f64,
    v: f64,
    omega: f64,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    horizon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    record_stride: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawInitKind {
    Polygon,
    RandomConnected,
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawSpin {
    Clockwise,
    Counterclockwise,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInit {
    kind: RawInitKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spin: Option<RawSpin>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spread: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    params: RawParams,
    sim: RawSim,
    init: RawInit,
    #[serde(default)]
    thresholds: ThresholdOverrides,
}

/// Converts a toml error into a one-line message naming the line.
fn toml_error(src: &str, e: toml::de::Error) -> SwarmError {
    let msg = e.message().trim().to_string();
    match e.span() {
        Some(span) => SwarmError::Config(format!("line {}: {msg}", line_of(src, span.start))),
        None => SwarmError::Config(msg),
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Line where `key` is assigned inside `[table]`, if any.
fn locate(src: &str, table: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in src.lines().enumerate() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
        } else if current == table {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

/// Rewrites a validation error so that it names the offending key.
fn keyed(src: &str, table: &str, e: SwarmError) -> SwarmError {
    match e {
        SwarmError::InvalidParam { name, reason } => {
            let key = if name == "phi" {
                ["phi_deg", "phi_rad", "phi"]
                    .into_iter()
                    .find(|k| locate(src, table, k).is_some())
                    .unwrap_or("phi")
            } else {
                name
            };
            match locate(src, table, key) {
                Some(line) => SwarmError::Config(format!("line {line}: {table}.{key}: {reason}")),
                None => SwarmError::Config(format!("{table}.{key}: {reason}")),
            }
        }
        other => other,
    }
}

fn resolve_phi(raw: &RawParams) -> std::result::Result<f64, String> {
    match (raw.phi_deg, raw.phi_rad, raw.phi.as_deref()) {
        (Some(d), None, None) => Ok(d.to_radians()),
        (None, Some(r), None) => Ok(r),
        (None, None, Some("critical")) => Ok(TAU / raw.n.max(1) as f64),
        (None, None, Some(other)) => Err(format!("phi must be \"critical\" or given as phi_deg / phi_rad, got {other:?}")),
        (None, None, None) => Err("missing opening angle: set exactly one of phi_deg, phi_rad, phi = \"critical\"".into()),
        _ => Err("set exactly one of phi_deg, phi_rad, phi".into()),
    }
}

fn params_from_raw(src: &str, table: &str, raw: &RawParams) -> Result<SwarmParams> {
    let phi = resolve_phi(raw).map_err(|m| SwarmError::Config(format!("{table}: {m}")))?;
    SwarmParams::new(raw.gamma, raw.v, raw.omega, phi, raw.n).map_err(|e| keyed(src, table, e))
}

impl RunConfig {
    pub fn from_toml(src: &str) -> Result<RunConfig> {
        let raw: RawRun = toml::from_str(src).map_err(|e| toml_error(src, e))?;
        let params = params_from_raw(src, "params", &raw.params)?;

        let dt = raw.sim.dt.unwrap_or_else(|| params.default_dt());
        let seed = raw.sim.seed.unwrap_or(0);
        if raw.sim.record_stride.is_some() && raw.sim.samples.is_some() {
            return Err(SwarmError::Config("sim: set record_stride or samples, not both".into()));
        }
        let stride = match raw.sim.record_stride {
            Some(s) => s,
            None => {
                let steps = ((raw.sim.horizon / dt) - 1e-9).ceil().max(1.0) as u64;
                (steps / raw.sim.samples.unwrap_or(DEFAULT_SAMPLES).max(1)).max(1)
            }
        };
        let sim = SimConfig::new(dt, raw.sim.horizon, seed, stride).map_err(|e| keyed(src, "sim", e))?;

        let init_err = |m: &str| SwarmError::Config(format!("init: {m}"));
        let r = raw.init;
        let default_radius = || predicted_radius(params.gamma(), params.n());
        let init = match r.kind {
            RawInitKind::Polygon => {
                if r.spread.is_some() {
                    return Err(init_err("spread applies to random_connected only"));
                }
                InitSpec::Polygon {
                    radius: r.radius.map_or_else(default_radius, Ok)?,
                    spin: match r.spin.unwrap_or(RawSpin::Clockwise) {
                        RawSpin::Clockwise => Spin::Clockwise,
                        RawSpin::Counterclockwise => Spin::CounterClockwise,
                    },
                }
            }
            RawInitKind::RandomConnected => {
                if r.radius.is_some() || r.spin.is_some() {
                    return Err(init_err("radius and spin do not apply to random_connected"));
                }
                InitSpec::RandomConnected {
                    spread: r
                        .spread
                        .unwrap_or(DEFAULT_SPREAD_SCALE * params.gamma() * (params.n() as f64).sqrt()),
                }
            }
            RawInitKind::Counterexample => {
                if r.spread.is_some() || r.spin.is_some() {
                    return Err(init_err("spread and spin do not apply to counterexample"));
                }
                InitSpec::Counterexample {
                    radius: r.radius.map_or_else(default_radius, Ok)?,
                }
            }
        };
        match init {
            InitSpec::Polygon { radius, .. } | InitSpec::Counterexample { radius } if !(radius > 0.0 && radius.is_finite()) => {
                return Err(keyed(src, "init", crate::error::invalid("radius", format!("must be > 0, got {radius}"))));
            }
            InitSpec::RandomConnected { spread } if !(spread > 0.0 && spread.is_finite()) => {
                return Err(keyed(src, "init", crate::error::invalid("spread", format!("must be > 0, got {spread}"))));
            }
            _ => {}
        }

        let thresholds = raw.thresholds.resolve(&params);
        thresholds.validate().map_err(|e| keyed(src, "thresholds", e))?;
        Ok(RunConfig {
            params,
            sim,
            init,
            thresholds,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig> {
        let src = std::fs::read_to_string(path).map_err(|e| SwarmError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&src)
    }

    /// Effective configuration with all defaults written out.
    pub fn to_toml(&self) -> String {
        let p = &self.params;
        let (kind, radius, spin, spread) = match self.init {
            InitSpec::Polygon { radius, spin } => (
                RawInitKind::Polygon,
                Some(radius),
                Some(match spin {
                    Spin::Clockwise => RawSpin::Clockwise,
                    Spin::CounterClockwise => RawSpin::Counterclockwise,
                }),
                None,
            ),
            InitSpec::RandomConnected { spread } => (RawInitKind::RandomConnected, None, None, Some(spread)),
            InitSpec::Counterexample { radius } => (RawInitKind::Counterexample, Some(radius), None, None),
        };
        let t = &self.thresholds;
        let raw = RawRun {
            params: RawParams {
                gamma: p.gamma(),
                v: p.v(),
                omega: p.omega(),
                n: p.n(),
                phi_rad: Some(p.phi()),
                ..Default::default()
            },
            sim: RawSim {
                horizon: self.sim.horizon(),
                dt: Some(self.sim.dt()),
                seed: Some(self.sim.seed()),
                record_stride: Some(self.sim.record_stride()),
                samples: None,
            },
            init: RawInit { kind, radius, spin, spread },
            thresholds: ThresholdOverrides {
                c1: Some(t.c1),
                c2: Some(t.c2),
                delta_c: Some(t.delta_c),
                delta_omega: Some(t.delta_omega),
                eps_lambda: Some(t.eps_lambda),
                tail_fraction: Some(t.tail_fraction),
                range_slack: Some(t.range_slack),
            },
        };
        toml::to_string(&raw).expect("effective config serializes")
    }

    pub fn initial_state(&self) -> Result<Microstate> {
        self.init.build(&self.params, self.sim.seed())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AngleUnit {
    Deg,
    Rad,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    param: ParamName,
    #[serde(skip_serializing_if = "Option::is_none")]
    unit: Option<AngleUnit>,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpread {
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaled: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(default = "default_trials")]
    trials_per_cell: usize,
    init: InitKind,
    #[serde(default)]
    base_seed: u64,
    x: RawAxis,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<RawAxis>,
    fixed: RawParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    spread: Option<RawSpread>,
    sim: SimTemplate,
    #[serde(default)]
    thresholds: ThresholdOverrides,
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

/// Sweep files.
///
/// ```toml
/// trials_per_cell = 5
/// init = "random_connected"     # or "polygon"
/// base_seed = 1
///
/// [x]
/// param = "n"                   # gamma | v | omega | phi | n
/// values = [3, 4, 5, 6]
///
/// [y]                           # optional
/// param = "phi"
/// unit = "deg"                  # required on phi axes
/// values = [4, 8, 12]
///
/// [fixed]                       # same keys as a run file's [params]
/// gamma = 1.0
/// v = 0.3
/// omega = 1.0
/// n = 10
/// phi = "critical"
///
/// [spread]                      # one of: fixed = <length>, scaled = k (k gamma sqrt(n))
/// scaled = 0.3
///
/// [sim]
/// horizon = 300.0
/// per_omega = true              # horizon in units of 1 / omega
/// samples = 400
///
/// [thresholds]
/// ```
pub fn sweep_from_toml(src: &str) -> Result<SweepSpec> {
    let raw: RawSweep = toml::from_str(src).map_err(|e| toml_error(src, e))?;
    let axis = |a: &RawAxis, table: &str| -> Result<Axis> {
        let values = match (a.param, a.unit) {
            (ParamName::Phi, Some(AngleUnit::Deg)) => a.values.iter().map(|d| d.to_radians()).collect(),
            (ParamName::Phi, Some(AngleUnit::Rad)) => a.values.clone(),
            (ParamName::Phi, None) => {
                return Err(SwarmError::Config(format!("{table}: phi axis needs unit = \"deg\" or \"rad\"")))
            }
            (_, Some(_)) => return Err(SwarmError::Config(format!("{table}: unit applies to phi axes only"))),
            (_, None) => a.values.clone(),
        };
        Ok(Axis { param: a.param, values })
    };
    let f = &raw.fixed;
    let phi = match (f.phi_deg, f.phi_rad, f.phi.as_deref()) {
        (None, None, Some("critical")) => PhiSetting::Critical,
        _ => PhiSetting::Radians(match resolve_phi(f) {
            Ok(p) => p,
            // phi may be swept, in which case the fixed value is unused
            Err(_) if f.phi_deg.is_none() && f.phi_rad.is_none() && f.phi.is_none() => TAU / 4.0,
            Err(m) => return Err(SwarmError::Config(format!("fixed: {m}"))),
        }),
    };
    let spread = match raw.spread {
        None => Spread::Scaled(DEFAULT_SPREAD_SCALE),
        Some(RawSpread { fixed: Some(r), scaled: None }) => Spread::Fixed(r),
        Some(RawSpread { fixed: None, scaled: Some(k) }) => Spread::Scaled(k),
        Some(_) => return Err(SwarmError::Config("spread: set exactly one of fixed, scaled".into())),
    };
    let spec = SweepSpec {
        axis_x: axis(&raw.x, "x")?,
        axis_y: raw.y.as_ref().map(|a| axis(a, "y")).transpose()?,
        fixed: FixedParams {
            gamma: f.gamma,
            v: f.v,
            omega: f.omega,
            phi,
            n: f.n,
        },
        trials_per_cell: raw.trials_per_cell,
        init: raw.init,
        spread,
        base_seed: raw.base_seed,
        sim: raw.sim,
        thresholds: raw.thresholds,
    };
    spec.validate().map_err(|e| keyed(src, "fixed", e))?;
    Ok(spec)
}

pub fn load_sweep(path: &std::path::Path) -> Result<SweepSpec> {
    let src = std::fs::read_to_string(path).map_err(|e| SwarmError::Io(format!("{}: {e}", path.display())))?;
    sweep_from_toml(&src)
}

/// Writes a sweep spec back as TOML (angles in radians).
pub fn sweep_to_toml(spec: &SweepSpec) -> String {
    let axis = |a: &Axis| RawAxis {
        param: a.param,
        unit: (a.param == ParamName::Phi).then_some(AngleUnit::Rad),
        values: a.values.clone(),
    };
    let f = &spec.fixed;
    let (phi_rad, phi) = match f.phi {
        PhiSetting::Radians(r) => (Some(r), None),
        PhiSetting::Critical => (None, Some("critical".to_string())),
    };
    let raw = RawSweep {
        trials_per_cell: spec.trials_per_cell,
        init: spec.init,
        base_seed: spec.base_seed,
        x: axis(&spec.axis_x),
        y: spec.axis_y.as_ref().map(axis),
        fixed: RawParams {
            gamma: f.gamma,
            v: f.v,
            omega: f.omega,
            n: f.n,
            phi_deg: None,
            phi_rad,
            phi,
        },
        spread: Some(match spec.spread {
            Spread::Fixed(r) => RawSpread { fixed: Some(r), scaled: None },
            Spread::Scaled(k) => RawSpread { fixed: None, scaled: Some(k) },
        }),
        sim: spec.sim,
        thresholds: spec.thresholds,
    };
    toml::to_string(&raw).expect("sweep spec serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[params]
gamma = 1.0
v = 0.3
omega = 1
n = 6
phi_deg = 60

[sim]
horizon = 50.0

[init]
kind = "polygon"
"#;

    #[test]
    fn defaults_are_materialized() {
        let c = RunConfig::from_toml(BASIC).unwrap();
        assert!((c.params.phi() - TAU / 6.0).abs() < 1e-15);
        assert_eq!(c.sim.dt(), c.params.default_dt());
        assert_eq!(c.sim.seed(), 0);
        assert_eq!(c.sim.record_stride(), 5);
        assert!(matches!(c.init, InitSpec::Polygon { spin: Spin::Clockwise, .. }));
        assert_eq!(c.thresholds, ClassifierThresholds::for_params(&c.params));
        let echo = c.to_toml();
        assert!(echo.contains("phi_rad"));
        assert!(echo.contains("range_slack"));
    }

    #[test]
    fn echo_round_trip() {
        let c = RunConfig::from_toml(BASIC).unwrap();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        let r = BASIC.replace("kind = \"polygon\"", "kind = \"random_connected\"\nspread = 2.5");
        let c = RunConfig::from_toml(&r).unwrap();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_key_names_line() {
        let src = BASIC.replace("n = 6", "n = 6\nfov = 3");
        let e = RunConfig::from_toml(&src).unwrap_err().to_string();
        assert!(e.contains("line 7") && e.contains("fov"), "{e}");
    }

    #[test]
    fn zero_omega_rejected_with_key() {
        let e = RunConfig::from_toml(&BASIC.replace("omega = 1", "omega = 0")).unwrap_err().to_string();
        assert!(e.contains("params.omega") && e.contains("line 5") && e.contains("> 0"), "{e}");
    }

    #[test]
    fn phi_unit_is_required_and_unique() {
        let e = RunConfig::from_toml(&BASIC.replace("phi_deg = 60", "")).unwrap_err().to_string();
        assert!(e.contains("phi_deg"), "{e}");
        let e = RunConfig::from_toml(&BASIC.replace("phi_deg = 60", "phi_deg = 60\nphi_rad = 1.0"));
        assert!(e.is_err());
        let c = RunConfig::from_toml(&BASIC.replace("phi_deg = 60", "phi = \"critical\"")).unwrap();
        assert_eq!(c.params.phi(), TAU / 6.0);
    }

    #[test]
    fn sweep_round_trip() {
        let src = r#"
init = "polygon"
base_seed = 4
[x]
param = "n"
values = [3, 4, 5]
[y]
param = "phi"
unit = "deg"
values = [10, 20]
[fixed]
gamma = 1
v = 0.3
omega = 1
n = 3
[sim]
horizon = 100
per_omega = true
samples = 200
"#;
        let s = sweep_from_toml(src).unwrap();
        assert_eq!(s.trials_per_cell, DEFAULT_TRIALS);
        assert_eq!(s.axis_y.as_ref().unwrap().values[1], 20f64.to_radians());
        assert_eq!(sweep_from_toml(&sweep_to_toml(&s)).unwrap(), s);
        assert!(sweep_from_toml(&src.replace("unit = \"deg\"\n", "")).is_err());
        assert!(sweep_from_toml(&src.replace("[3, 4, 5]", "[3, 5, 4]")).is_err());
    }
}
