//! Macrostate classification from the tail of a run.
//!
//! Long-time limits are approximated by sup/inf over the final
//! `tail_fraction` of the horizon. Labels are decided in a fixed order so
//! that overlapping definitions (a pulsing mill is also round) resolve
//! the same way every time:
//!
//! 1. disconnected disk graph: `S`
//! 2. circliness oscillating by more than `delta_c`: `C`
//! 3. circliness below `c1`: `P` if the group rotation oscillates by more
//!    than `delta_omega`, else `M`
//! 4. circliness below `c2`: `E`
//! 5. otherwise `U`

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{run, Trajectory};
use crate::error::{invalid, Result, SwarmError};
use crate::graph::{algebraic_connectivity, disk_graph};
use crate::metrics::{measured_mill_radius, metric_series, MetricSeries};
use crate::params::{SimConfig, SwarmParams};
use crate::state::Microstate;

pub const MIN_TAIL_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Macrostate {
    /// Separated groups.
    S,
    /// Collapsing and reforming circle.
    C,
    /// Pulsing mill.
    P,
    /// Milling.
    M,
    /// Ellipsoidal.
    E,
    /// Uncharacterized.
    U,
}

impl Macrostate {
    /// All labels, most severe first; this is also the tie-break order.
    pub const ALL: [Macrostate; 6] = [
        Macrostate::S,
        Macrostate::C,
        Macrostate::P,
        Macrostate::M,
        Macrostate::E,
        Macrostate::U,
    ];

    pub fn letter(self) -> char {
        match self {
            Macrostate::S => 'S',
            Macrostate::C => 'C',
            Macrostate::P => 'P',
            Macrostate::M => 'M',
            Macrostate::E => 'E',
            Macrostate::U => 'U',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Macrostate::S => "separated groups",
            Macrostate::C => "collapsing circle",
            Macrostate::P => "pulsing mill",
            Macrostate::M => "milling",
            Macrostate::E => "ellipsoidal",
            Macrostate::U => "uncharacterized",
        }
    }

    pub fn index(self) -> usize {
        Macrostate::ALL.iter().position(|&m| m == self).unwrap()
    }

    pub fn is_mill(self) -> bool {
        matches!(self, Macrostate::M | Macrostate::P)
    }
}

impl fmt::Display for Macrostate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Macrostate {
    type Err = SwarmError;
    fn from_str(s: &str) -> Result<Self> {
        Macrostate::ALL
            .into_iter()
            .find(|m| s.len() == 1 && s.starts_with(m.letter()))
            .ok_or_else(|| invalid("macrostate", format!("unknown label {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierThresholds {
    /// Circliness boundary between M and E.
    pub c1: f64,
    /// Circliness boundary between E and U.
    pub c2: f64,
    /// Minimum circliness swing for C.
    pub delta_c: f64,
    /// Minimum group-rotation swing for P.
    pub delta_omega: f64,
    /// λ2 values at or below this count as zero.
    pub eps_lambda: f64,
    /// Trailing fraction of the horizon standing in for `t -> inf`.
    pub tail_fraction: f64,
    /// Relative slack on the sensing range for the connectivity test: two
    /// agents count as linked when closer than `gamma * (1 + range_slack)`.
    /// A settled mill keeps neighbors at almost exactly `gamma`, so a strict
    /// cut would flicker on and off around it.
    #[serde(default = "default_range_slack")]
    pub range_slack: f64,
}

fn default_range_slack() -> f64 {
    0.05
}

impl ClassifierThresholds {
    /// Defaults; `delta_omega` scales with the largest possible group
    /// rotation `N v`.
    pub fn for_params(params: &SwarmParams) -> Self {
        ClassifierThresholds {
            c1: 0.3,
            c2: 0.8,
            delta_c: 0.1,
            delta_omega: 0.1 * params.n() as f64 * params.v(),
            eps_lambda: 1e-6,
            tail_fraction: 0.25,
            range_slack: default_range_slack(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !(pos(self.c1) && self.c1 < self.c2 && self.c2.is_finite()) {
            return Err(invalid("thresholds", format!("need 0 < c1 < c2, got c1={} c2={}", self.c1, self.c2)));
        }
        if !(pos(self.delta_c) && pos(self.delta_omega) && pos(self.eps_lambda)) {
            return Err(invalid("thresholds", "delta_c, delta_omega and eps_lambda must be > 0"));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction < 1.0) {
            return Err(invalid(
                "tail_fraction",
                format!("must lie in (0, 1), got {}", self.tail_fraction),
            ));
        }
        if !(self.range_slack.is_finite() && self.range_slack >= 0.0) {
            return Err(invalid("range_slack", format!("must be >= 0, got {}", self.range_slack)));
        }
        Ok(())
    }
}

/// Extremes of the observables over the tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailStats {
    pub c_sup: f64,
    pub c_inf: f64,
    pub omega_sup: f64,
    pub omega_inf: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Number of samples in the window.
    pub samples: usize,
}

/// Index of the first sample inside the tail window.
fn tail_start(traj: &Trajectory, tail_fraction: f64) -> usize {
    let cut = (1.0 - tail_fraction) * traj.config.horizon();
    traj.samples.partition_point(|s| s.t < cut - 1e-9 * traj.config.dt())
}

pub fn tail_stats(traj: &Trajectory, series: &MetricSeries, thresholds: &ClassifierThresholds) -> Result<TailStats> {
    assert_eq!(series.len(), traj.samples.len(), "series must match trajectory");
    let start = tail_start(traj, thresholds.tail_fraction);
    let window = &series[start..];
    if window.len() < MIN_TAIL_SAMPLES {
        return Err(SwarmError::TailTooShort {
            got: window.len(),
            need: MIN_TAIL_SAMPLES,
        });
    }
    let fold = |f: fn(&crate::metrics::MetricSample) -> f64| {
        window
            .iter()
            .map(f)
            .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), x| (hi.max(x), lo.min(x)))
    };
    let (c_sup, c_inf) = fold(|m| m.circliness);
    let (omega_sup, omega_inf) = fold(|m| m.omega_bar);
    let linked = traj
        .params
        .with_gamma(traj.params.gamma() * (1.0 + thresholds.range_slack))
        .expect("scaled gamma stays positive");
    let (lambda_max, lambda_min) = traj.samples[start..]
        .iter()
        .map(|s| disk_lambda2(s, &linked))
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), x| (hi.max(x), lo.min(x)));
    Ok(TailStats {
        c_sup,
        c_inf,
        omega_sup,
        omega_inf,
        lambda_min,
        lambda_max,
        samples: window.len(),
    })
}

fn disk_lambda2(state: &Microstate, params: &SwarmParams) -> f64 {
    algebraic_connectivity(&disk_graph(state, params)).expect("disk graph is symmetric")
}

pub fn classify(stats: &TailStats, th: &ClassifierThresholds) -> Macrostate {
    if stats.lambda_min <= th.eps_lambda {
        Macrostate::S
    } else if stats.c_sup - stats.c_inf > th.delta_c {
        Macrostate::C
    } else if stats.c_sup < th.c1 {
        if stats.omega_sup - stats.omega_inf > th.delta_omega {
            Macrostate::P
        } else {
            Macrostate::M
        }
    } else if stats.c_sup < th.c2 {
        Macrostate::E
    } else {
        Macrostate::U
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub label: Macrostate,
    pub stats: TailStats,
    /// Measured mill radius, reported for M and P only.
    pub mill_radius: Option<f64>,
}

/// Classifies an already simulated trajectory.
pub fn classify_trajectory(traj: &Trajectory, th: &ClassifierThresholds) -> Result<RunOutcome> {
    th.validate()?;
    let series = metric_series(traj);
    let stats = tail_stats(traj, &series, th)?;
    let label = classify(&stats, th);
    let mill_radius = label.is_mill().then(|| measured_mill_radius(traj, th.tail_fraction));
    Ok(RunOutcome {
        label,
        stats,
        mill_radius,
    })
}

/// Simulates, then classifies.
pub fn classify_run(
    init: &Microstate,
    params: &SwarmParams,
    config: &SimConfig,
    th: &ClassifierThresholds,
) -> Result<RunOutcome> {
    th.validate()?;
    let traj = run(init, params, config)?;
    classify_trajectory(&traj, th)
}
