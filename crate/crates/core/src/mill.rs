//! Closed-form milling analysis.
//!
//! A perfect mill puts the agents on a regular `N`-gon whose side equals
//! the sensing range, so its circumradius is `gamma / (2 sin(pi / N))`.
//! The polygon is self-sustaining when the opening angle is the critical
//! `2 pi / N` (each agent's leading neighbor sits on the edge of its cone)
//! and the agents can turn at least as tightly as the circle, i.e.
//! `v / omega <= R_m`. Inverting the radius formula for a target radius
//! gives the family of deployable parameter tuples.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SwarmError};
use crate::params::SwarmParams;
use crate::seed::rng_from_seed;

/// Default tolerance on `|phi - 2 pi / N|` for membership.
pub const DEFAULT_TOL_PHI: f64 = 1e-9;

/// Predicted milling radius `gamma / (2 sin(pi / n))`.
pub fn predicted_radius(gamma: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("n", format!("milling radius needs n >= 2, got {n}")));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(invalid("gamma", format!("must be > 0, got {gamma}")));
    }
    Ok(gamma / (2.0 * (PI / n as f64).sin()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub holds: bool,
    /// For the FOV condition: `|phi - 2 pi / N|`. For the turning
    /// condition: `R_m - v / omega` (negative when violated).
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MillPrediction {
    pub r_m: f64,
    pub in_pstar: bool,
    pub constraints: Vec<ConstraintCheck>,
}

pub fn pstar_membership(params: &SwarmParams, tol_phi: f64) -> MillPrediction {
    let n = params.n();
    let r_m = predicted_radius(params.gamma(), n).expect("validated params");
    let phi_gap = (params.phi() - TAU / n as f64).abs();
    let turn_margin = r_m - params.turning_radius();
    let constraints = vec![
        ConstraintCheck {
            name: "phi = 2pi/N".into(),
            holds: phi_gap <= tol_phi,
            margin: phi_gap,
        },
        ConstraintCheck {
            name: "v/omega <= R_m".into(),
            holds: turn_margin >= 0.0,
            margin: turn_margin,
        },
    ];
    MillPrediction {
        r_m,
        in_pstar: constraints.iter().all(|c| c.holds),
        constraints,
    }
}

/// Largest `N` for which `2 pi / N >= phi`, i.e. the biggest swarm that
/// can still realize the critical opening angle.
pub fn predicted_breakup_n(phi: f64) -> Result<usize> {
    if !(phi > 0.0 && phi < TAU) {
        return Err(invalid("phi", format!("must lie in (0, 2pi), got {phi}")));
    }
    // slack absorbs degree-to-radian rounding at exact divisors
    Ok((TAU / phi + 1e-9).floor() as usize)
}

/// Box from which `(v, omega)` pairs are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedTurnBox {
    pub v_min: f64,
    pub v_max: f64,
    pub omega_min: f64,
    pub omega_max: f64,
}

impl Default for SpeedTurnBox {
    fn default() -> Self {
        SpeedTurnBox {
            v_min: 0.05,
            v_max: 2.0,
            omega_min: 0.05,
            omega_max: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeployTuple {
    pub n: usize,
    pub v: f64,
    pub omega: f64,
    pub gamma: f64,
    pub phi: f64,
}

impl DeployTuple {
    pub fn params(&self) -> Result<SwarmParams> {
        SwarmParams::new(self.gamma, self.v, self.omega, self.phi, self.n)
    }
}

/// Parameter tuples that hold a mill of radius `r_star`: `phi = 2 pi / N`,
/// `gamma = 2 r_star sin(pi / N)` and `v / omega <= r_star`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploySet {
    pub r_star: f64,
    pub samples: Vec<DeployTuple>,
}

const MAX_TRIES_PER_SAMPLE: usize = 10_000;

pub fn deploy_set(
    r_star: f64,
    n_range: std::ops::RangeInclusive<usize>,
    k_samples: usize,
    seed: u64,
    bounds: SpeedTurnBox,
) -> Result<DeploySet> {
    if !(r_star.is_finite() && r_star > 0.0) {
        return Err(invalid("r_star", format!("must be > 0, got {r_star}")));
    }
    if n_range.is_empty() || *n_range.start() < 2 {
        return Err(invalid("n_range", format!("need a nonempty range with min >= 2, got {n_range:?}")));
    }
    let b = bounds;
    if !(b.v_min > 0.0 && b.v_min <= b.v_max && b.omega_min > 0.0 && b.omega_min <= b.omega_max) {
        return Err(SwarmError::EmptyFeasibleSet(format!("malformed box {b:?}")));
    }
    if b.v_min > r_star * b.omega_max {
        return Err(SwarmError::EmptyFeasibleSet(format!(
            "v_min {} exceeds r_star * omega_max = {}",
            b.v_min,
            r_star * b.omega_max
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut samples = Vec::with_capacity(n_range.clone().count() * k_samples);
    for n in n_range {
        let phi = TAU / n as f64;
        let gamma = 2.0 * r_star * (PI / n as f64).sin();
        let r_m = predicted_radius(gamma, n)?;
        let mut drawn = 0;
        let mut tries = 0;
        while drawn < k_samples {
            tries += 1;
            if tries > MAX_TRIES_PER_SAMPLE * k_samples.max(1) {
                return Err(SwarmError::EmptyFeasibleSet(format!(
                    "rejection sampling found too few points with v/omega <= {r_star} in {b:?}"
                )));
            }
            let v = sample(&mut rng, b.v_min, b.v_max);
            let omega = sample(&mut rng, b.omega_min, b.omega_max);
            if v / omega <= r_m {
                samples.push(DeployTuple { n, v, omega, gamma, phi });
                drawn += 1;
            }
        }
    }
    Ok(DeploySet { r_star, samples })
}

fn sample(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Circumradius of a regular polygon with unit side, found by
    /// bisection on the chord length `|p_0 - p_1|` as a function of radius.
    fn circumradius_by_bisection(n: usize) -> f64 {
        let chord = |r: f64| {
            let a = TAU / n as f64;
            (r * a.cos() - r).hypot(r * a.sin())
        };
        let (mut lo, mut hi) = (1e-6, 1e6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if chord(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn radius_examples() {
        assert!((predicted_radius(1.0, 6).unwrap() - 1.0).abs() < 1e-12);
        assert!((predicted_radius(1.0, 2).unwrap() - 0.5).abs() < 1e-12);
        let r4 = predicted_radius(1.0, 4).unwrap();
        assert!((r4 - circumradius_by_bisection(4)).abs() < 1e-9);
        assert!((r4 - 0.7071068).abs() < 1e-7);
        for n in 3..40 {
            assert!((predicted_radius(1.0, n).unwrap() - circumradius_by_bisection(n)).abs() < 1e-8);
        }
        assert!(predicted_radius(1.0, 1).is_err());
    }

    #[test]
    fn membership_examples() {
        let inside = SwarmParams::new(1.0, 1.0, 2.0, PI / 3.0, 6).unwrap();
        let m = pstar_membership(&inside, DEFAULT_TOL_PHI);
        assert!(m.in_pstar);
        assert!((m.constraints[1].margin - 0.5).abs() < 1e-12);
        let wrong_phi = inside.with_phi(PI / 2.0).unwrap();
        assert!(!pstar_membership(&wrong_phi, DEFAULT_TOL_PHI).in_pstar);
        let too_fast = SwarmParams::new(1.0, 3.0, 1.0, PI / 3.0, 6).unwrap();
        let m = pstar_membership(&too_fast, DEFAULT_TOL_PHI);
        assert!(!m.in_pstar);
        assert!(m.constraints[0].holds && !m.constraints[1].holds);
    }

    #[test]
    fn breakup_examples() {
        assert_eq!(predicted_breakup_n(12f64.to_radians()).unwrap(), 30);
        assert_eq!(predicted_breakup_n(TAU / 6.0).unwrap(), 6);
        assert_eq!(predicted_breakup_n(120f64.to_radians()).unwrap(), 3);
        assert_eq!(predicted_breakup_n(11.9f64.to_radians()).unwrap(), 30);
        assert_eq!(predicted_breakup_n(12.1f64.to_radians()).unwrap(), 29);
    }

    #[test]
    fn deploy_examples() {
        let set = deploy_set(3.0, 10..=10, 4, 1, SpeedTurnBox::default()).unwrap();
        assert_eq!(set.samples.len(), 4);
        let t = set.samples[0];
        assert!((t.gamma - 6.0 * (PI / 10.0).sin()).abs() < 1e-12);
        assert!((t.gamma - 1.8541).abs() < 1e-4);
        assert!((t.phi.to_degrees() - 36.0).abs() < 1e-12);
    }

    #[test]
    fn deploy_rejects_empty_box() {
        let b = SpeedTurnBox {
            v_min: 5.0,
            v_max: 6.0,
            omega_min: 0.1,
            omega_max: 1.0,
        };
        assert!(matches!(deploy_set(3.0, 3..=5, 2, 0, b), Err(SwarmError::EmptyFeasibleSet(_))));
        assert!(deploy_set(3.0, 1..=5, 2, 0, SpeedTurnBox::default()).is_err());
        assert!(deploy_set(-1.0, 3..=5, 2, 0, SpeedTurnBox::default()).is_err());
    }
}
