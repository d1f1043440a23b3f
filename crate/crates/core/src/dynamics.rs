//! Sensor, controller and fixed-step integration of the unicycle model
//! `x' = v cos(theta)`, `y' = v sin(theta)`, `theta' = u`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SwarmError};
use crate::geom::{in_fov, wrap_angle};
use crate::params::{SimConfig, SwarmParams};
use crate::state::{AgentState, Microstate};

/// Recorded time history of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: SwarmParams,
    pub config: SimConfig,
    pub samples: Vec<Microstate>,
}

impl Trajectory {
    pub fn last(&self) -> &Microstate {
        self.samples.last().expect("trajectory holds at least the initial state")
    }

    /// Sample times.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }
}

/// Binary sensor: does agent `i` see any other agent?
pub fn sense(i: usize, state: &Microstate, params: &SwarmParams) -> bool {
    let obs = &state.agents[i];
    state
        .agents
        .iter()
        .enumerate()
        .any(|(j, a)| j != i && in_fov(obs, a.x, a.y, params))
}

/// Turn left at `omega` while something is in view, right otherwise.
pub fn control(h: bool, params: &SwarmParams) -> f64 {
    if h {
        params.omega()
    } else {
        -params.omega()
    }
}

/// Per-agent turn rates for the current state.
pub fn controls(state: &Microstate, params: &SwarmParams) -> Vec<f64> {
    (0..state.len()).map(|i| control(sense(i, state, params), params)).collect()
}

/// One synchronous step: every sensor reads the input state, then every
/// agent advances by classical RK4 with its turn rate held constant.
pub fn step(state: &Microstate, params: &SwarmParams, dt: f64) -> Microstate {
    let u = controls(state, params);
    step_with_controls(state, &u, params.v(), dt)
}

/// Advances all agents by one RK4 step under the given turn rates.
pub fn step_with_controls(state: &Microstate, u: &[f64], v: f64, dt: f64) -> Microstate {
    assert_eq!(u.len(), state.len());
    let agents = state
        .agents
        .iter()
        .zip(u)
        .map(|(a, &ui)| rk4(a, ui, v, dt))
        .collect();
    Microstate {
        agents,
        t: state.t + dt,
    }
}

fn rk4(a: &AgentState, u: f64, v: f64, dt: f64) -> AgentState {
    let f = |theta: f64| {
        let (s, c) = theta.sin_cos();
        (v * c, v * s, u)
    };
    let h = 0.5 * dt;
    let k1 = f(a.theta);
    let k2 = f(a.theta + h * k1.2);
    let k3 = f(a.theta + h * k2.2);
    let k4 = f(a.theta + dt * k3.2);
    let w = dt / 6.0;
    AgentState {
        x: a.x + w * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        y: a.y + w * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        theta: wrap_angle(a.theta + w * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2)),
    }
}

/// Integrates from `init` over the configured horizon, recording the
/// initial state and every `record_stride`-th step.
pub fn run(init: &Microstate, params: &SwarmParams, config: &SimConfig) -> Result<Trajectory> {
    run_observed(init, params, config, |_, _| {})
}

/// [`run`] with a callback invoked on every recorded sample as it is produced.
pub fn run_observed<F>(init: &Microstate, params: &SwarmParams, config: &SimConfig, mut on_sample: F) -> Result<Trajectory>
where
    F: FnMut(u64, &Microstate),
{
    if init.len() != params.n() {
        return Err(crate::error::invalid(
            "init",
            format!("state holds {} agents, params say {}", init.len(), params.n()),
        ));
    }
    check_finite(init, 0)?;
    let dt = config.dt();
    let stride = config.record_stride();
    let n_steps = config.n_steps();
    let mut cur = Microstate {
        agents: init.agents.iter().map(|a| AgentState::new(a.x, a.y, a.theta)).collect(),
        t: 0.0,
    };
    let mut samples = Vec::with_capacity(config.n_samples());
    on_sample(0, &cur);
    samples.push(cur.clone());
    for k in 1..=n_steps {
        let mut next = step(&cur, params, dt);
        // absolute time from the step index, not accumulated
        next.t = k as f64 * dt;
        check_finite(&next, k)?;
        if k % stride == 0 {
            on_sample(k, &next);
            samples.push(next.clone());
        }
        cur = next;
    }
    Ok(Trajectory {
        params: *params,
        config: *config,
        samples,
    })
}

fn check_finite(state: &Microstate, step: u64) -> Result<()> {
    match state.agents.iter().position(|a| !a.is_finite()) {
        Some(agent) => Err(SwarmError::NonFinite { step, agent }),
        None => Ok(()),
    }
}
