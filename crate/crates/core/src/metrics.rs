//! Macroscopic observables of a microstate.
//!
//! The normalization radius `R` used by angular momentum, scatter and
//! radial variance is the largest centroid distance at the same instant,
//! which makes those three quantities scale-free.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::geom::{cross, Point};
use crate::state::Microstate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub t: f64,
    /// Average speed.
    pub v_bar: f64,
    /// Group rotation: sum of velocity x unit radial vector.
    pub omega_bar: f64,
    /// Angular momentum normalized by `R * N`.
    pub l_bar: f64,
    pub scatter: f64,
    pub radial_variance: f64,
    /// `r_max / r_min - 1`; `+inf` when an agent sits on the centroid.
    pub circliness: f64,
    pub r_max: f64,
    pub r_min: f64,
    pub swarm_radius: f64,
}

pub type MetricSeries = Vec<MetricSample>;

pub fn centroid(state: &Microstate) -> Point {
    let n = state.len() as f64;
    let (sx, sy) = state.positions().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    Point::new(sx / n, sy / n)
}

/// Distance of every agent from the centroid.
pub fn centroid_distances(state: &Microstate) -> Vec<f64> {
    let mu = centroid(state);
    state.positions().map(|p| p.dist(mu)).collect()
}

fn min_max(d: &[f64]) -> (f64, f64) {
    d.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn circliness_of(r_min: f64, r_max: f64) -> f64 {
    if r_min > 0.0 {
        (r_max - r_min) / r_min
    } else {
        f64::INFINITY
    }
}

/// `(r_max - r_min) / r_min` over centroid distances; `+inf` if an agent
/// is exactly at the centroid.
pub fn circliness(state: &Microstate) -> f64 {
    let (lo, hi) = min_max(&centroid_distances(state));
    circliness_of(lo, hi)
}

/// Model velocities `v (cos theta, sin theta)`.
pub fn velocities(state: &Microstate, v: f64) -> Vec<(f64, f64)> {
    state
        .agents
        .iter()
        .map(|a| {
            let (s, c) = a.theta.sin_cos();
            (v * c, v * s)
        })
        .collect()
}

/// Evaluates every observable on one state given its velocities.
///
/// When all agents coincide (`R = 0`) the normalized quantities are NaN.
/// Agents sitting exactly on the centroid contribute nothing to the group
/// rotation.
pub fn observables(state: &Microstate, vel: &[(f64, f64)]) -> MetricSample {
    assert_eq!(vel.len(), state.len());
    let n = state.len() as f64;
    let mu = centroid(state);
    let rel: Vec<(f64, f64)> = state.positions().map(|p| (p.x - mu.x, p.y - mu.y)).collect();
    let d: Vec<f64> = rel.iter().map(|&(x, y)| x.hypot(y)).collect();
    let (r_min, r_max) = min_max(&d);
    let r = r_max;

    let v_bar = vel.iter().map(|&(x, y)| x.hypot(y)).sum::<f64>() / n;
    let mut omega_bar = 0.0;
    let mut ang = 0.0;
    for ((&(vx, vy), &(rx, ry)), &di) in vel.iter().zip(&rel).zip(&d) {
        let c = cross(vx, vy, rx, ry);
        if di > 0.0 {
            omega_bar += c / di;
        }
        ang += c;
    }
    let mean_d = d.iter().sum::<f64>() / n;
    let (l_bar, scatter, radial_variance) = if r > 0.0 {
        (
            ang / (r * n),
            d.iter().map(|x| x * x).sum::<f64>() / (r * r * n),
            d.iter().map(|x| (x - mean_d).powi(2)).sum::<f64>() / (r * r * n),
        )
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    MetricSample {
        t: state.t,
        v_bar,
        omega_bar,
        l_bar,
        scatter,
        radial_variance,
        circliness: circliness_of(r_min, r_max),
        r_max,
        r_min,
        swarm_radius: r,
    }
}

/// Observables with the model velocities for agent speed `v`.
pub fn metric_sample(state: &Microstate, v: f64) -> MetricSample {
    observables(state, &velocities(state, v))
}

pub fn metric_series(traj: &Trajectory) -> MetricSeries {
    traj.samples.iter().map(|s| metric_sample(s, traj.params.v())).collect()
}

/// Mean centroid distance of one state.
pub fn mean_radius(state: &Microstate) -> f64 {
    let d = centroid_distances(state);
    d.iter().sum::<f64>() / d.len() as f64
}

/// Mean over the trailing `tail_fraction` of samples (at least one) of the
/// mean centroid distance.
pub fn measured_mill_radius(traj: &Trajectory, tail_fraction: f64) -> f64 {
    let n = traj.samples.len();
    assert!(n > 0, "empty trajectory");
    let k = ((tail_fraction * n as f64).ceil() as usize).clamp(1, n);
    traj.samples[n - k..].iter().map(mean_radius).sum::<f64>() / k as f64
}
