//! Initial-condition generators.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SwarmError};
use crate::geom::Point;
use crate::graph::is_single_swarm;
use crate::params::SwarmParams;
use crate::seed::rng_from_seed;
use crate::state::{AgentState, Microstate};

/// Default cap on rejection rounds in [`random_connected_init`].
pub const DEFAULT_MAX_INIT_ROUNDS: usize = 1000;

/// Direction of travel around a mill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Clockwise,
    CounterClockwise,
}

impl Spin {
    /// The rotation sense the binary controller sustains. Agents that see
    /// nothing turn right (clockwise); a clockwise polygon keeps each
    /// agent's leading neighbor on the right edge of its cone.
    pub const MILL: Spin = Spin::Clockwise;

    /// +1 for counterclockwise, -1 for clockwise.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Clockwise => -1.0,
            Spin::CounterClockwise => 1.0,
        }
    }
}

/// Agents on the vertices of a regular `n`-gon of the given circumradius,
/// agent `k` at polar angle `2 pi k / n`, headings tangent to the circle.
pub fn regular_polygon_mill(params: &SwarmParams, radius: f64, center: Point, spin: Spin) -> Result<Microstate> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid("radius", format!("must be > 0, got {radius}")));
    }
    let n = params.n();
    let agents = (0..n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64;
            let (s, c) = a.sin_cos();
            AgentState::new(center.x + radius * c, center.y + radius * s, a + spin.sign() * FRAC_PI_2)
        })
        .collect();
    Ok(Microstate::new(agents))
}

/// Uniform positions in a disk of radius `spread` around the origin and
/// uniform headings, resampled until the disk graph is connected.
pub fn random_connected_init(params: &SwarmParams, spread: f64, seed: u64) -> Result<Microstate> {
    random_connected_init_capped(params, spread, seed, DEFAULT_MAX_INIT_ROUNDS)
}

pub fn random_connected_init_capped(
    params: &SwarmParams,
    spread: f64,
    seed: u64,
    max_rounds: usize,
) -> Result<Microstate> {
    if !(spread.is_finite() && spread > 0.0) {
        return Err(invalid("spread", format!("must be > 0, got {spread}")));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..max_rounds {
        let agents = (0..params.n())
            .map(|_| {
                let r = spread * rng.random::<f64>().sqrt();
                let a = rng.random_range(-PI..PI);
                let theta = rng.random_range(-PI..PI);
                AgentState::new(r * a.cos(), r * a.sin(), theta)
            })
            .collect();
        let state = Microstate::new(agents);
        if is_single_swarm(&state, params) {
            return Ok(state);
        }
    }
    Err(SwarmError::InitRejected {
        rounds: max_rounds,
        spread,
        gamma: params.gamma(),
        n: params.n(),
    })
}

/// Equal-radius configuration that is not an invariant mill.
///
/// Two antipodal agents A (top) and B (bottom) travel tangentially
/// clockwise. The other `n - 2` agents sit on two short arcs centered on
/// the left and right of the circle, each pointing straight at its
/// clockwise successor so that it detects it and turns away. The layout is
/// symmetric under a half-turn, so the centroid is `center` and every agent
/// starts at distance `radius` from it.
pub fn counterexample_config(params: &SwarmParams, radius: f64) -> Result<Microstate> {
    let n = params.n();
    if n < 4 || !n.is_multiple_of(2) {
        return Err(invalid("n", format!("counter-example needs an even n >= 4, got {n}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid("radius", format!("must be > 0, got {radius}")));
    }
    let per_arc = (n - 2) / 2;
    // arc spacing: chord of gamma / 2 when it fits, never wider than the free half-circle
    let chord_angle = 2.0 * (params.gamma() / (4.0 * radius)).min(1.0).asin();
    let spacing = chord_angle.min(PI / (per_arc as f64 + 1.0));

    // polar angles in clockwise order starting from A at the top
    let mut angles = vec![FRAC_PI_2];
    let arc = |mid: f64| (0..per_arc).map(move |j| mid + spacing * ((per_arc - 1) as f64 / 2.0 - j as f64));
    angles.extend(arc(0.0));
    angles.push(-FRAC_PI_2);
    angles.extend(arc(PI));

    let pos: Vec<Point> = angles
        .iter()
        .map(|&a| Point::new(radius * a.cos(), radius * a.sin()))
        .collect();
    let is_pole = |k: usize| k == 0 || k == per_arc + 1;
    let agents = (0..n)
        .map(|k| {
            let p = pos[k];
            let theta = if is_pole(k) {
                angles[k] - FRAC_PI_2
            } else {
                let q = pos[(k + 1) % n];
                (q.y - p.y).atan2(q.x - p.x)
            };
            AgentState::new(p.x, p.y, theta)
        })
        .collect();
    Ok(Microstate::new(agents))
}
