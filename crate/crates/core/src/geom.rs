//! Planar geometry: angle wrapping and field-of-view membership.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::params::SwarmParams;
use crate::state::AgentState;

/// Slack applied to both FOV boundary comparisons so that a target placed
/// exactly on the cone edge by construction is not lost to rounding.
pub const FOV_BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Scalar 2-D cross product `a_x b_y - a_y b_x`.
pub fn cross(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    ax * by - ay * bx
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a - TAU * ((a + PI) / TAU).floor();
    // floor can leave `w == pi` after rounding
    if w >= PI {
        w - TAU
    } else if w < -PI {
        w + TAU
    } else {
        w
    }
}

/// True iff the target lies in the observer's closed sensing cone of range
/// `gamma` and opening angle `phi`. Coincident points are never in view.
pub fn in_fov(observer: &AgentState, target_x: f64, target_y: f64, params: &SwarmParams) -> bool {
    let dx = target_x - observer.x;
    let dy = target_y - observer.y;
    let d2 = dx * dx + dy * dy;
    if d2 == 0.0 {
        return false;
    }
    let range = params.gamma() * (1.0 + FOV_BOUNDARY_TOL);
    if d2 > range * range {
        return false;
    }
    let half = 0.5 * params.phi();
    if half >= PI {
        return true;
    }
    let rel = wrap_angle(dy.atan2(dx) - observer.theta);
    rel.abs() <= half + FOV_BOUNDARY_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(gamma: f64, phi: f64) -> SwarmParams {
        SwarmParams::new(gamma, 1.0, 1.0, phi, 2).unwrap()
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), -PI);
        assert_eq!(wrap_angle(-PI), -PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(-7.0 * PI / 2.0) - PI / 2.0).abs() < 1e-14);
        assert_eq!(wrap_angle(0.25), 0.25);
    }

    #[test]
    fn cone_examples() {
        let obs = AgentState::new(0.0, 0.0, 0.0);
        let p = params(2.0, PI / 2.0);
        assert!(in_fov(&obs, 1.0, 0.0, &p));
        assert!(!in_fov(&obs, 0.0, 1.0, &p));
        assert!(!in_fov(&obs, 3.0, 0.0, &p));
    }

    #[test]
    fn boundaries_are_closed_and_coincident_is_false() {
        let obs = AgentState::new(0.0, 0.0, 0.0);
        let p = params(2.0, PI / 2.0);
        assert!(in_fov(&obs, 2.0, 0.0, &p));
        let (s, c) = (PI / 4.0).sin_cos();
        assert!(in_fov(&obs, c, s, &p));
        assert!(in_fov(&obs, c, -s, &p));
        assert!(!in_fov(&obs, 0.0, 0.0, &p));
    }

    #[test]
    fn cone_straddling_the_branch_cut() {
        let obs = AgentState::new(0.0, 0.0, wrap_angle(PI));
        let p = params(2.0, PI / 2.0);
        assert!(in_fov(&obs, -1.0, 0.1, &p));
        assert!(in_fov(&obs, -1.0, -0.1, &p));
        assert!(!in_fov(&obs, 1.0, 0.0, &p));
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent_and_in_range(a in -100.0f64..100.0) {
            let w = wrap_angle(a);
            prop_assert!((-PI..PI).contains(&w));
            prop_assert_eq!(wrap_angle(w), w);
            prop_assert!(((a - w) / TAU - ((a - w) / TAU).round()).abs() < 1e-9);
        }

        #[test]
        fn rigid_motion_invariance(
            ox in -5.0f64..5.0, oy in -5.0f64..5.0, th in -3.0f64..3.0,
            tx in -5.0f64..5.0, ty in -5.0f64..5.0,
            sx in -10.0f64..10.0, sy in -10.0f64..10.0, rot in -3.0f64..3.0,
            phi in 0.1f64..6.0,
        ) {
            let p = params(3.0, phi);
            let base = in_fov(&AgentState::new(ox, oy, th), tx, ty, &p);
            let (s, c) = rot.sin_cos();
            let r = |x: f64, y: f64| (c * x - s * y + sx, s * x + c * y + sy);
            let (ox2, oy2) = r(ox, oy);
            let (tx2, ty2) = r(tx, ty);
            let moved = in_fov(&AgentState::new(ox2, oy2, th + rot), tx2, ty2, &p);
            // skip samples within rounding distance of a boundary
            let d = (tx - ox).hypot(ty - oy);
            let rel = wrap_angle((ty - oy).atan2(tx - ox) - th).abs();
            prop_assume!((d - 3.0).abs() > 1e-6 && (rel - phi / 2.0).abs() > 1e-6);
            prop_assert_eq!(base, moved);
        }

        #[test]
        fn full_circle_fov_is_a_disk(
            tx in -5.0f64..5.0, ty in -5.0f64..5.0, th in -3.0f64..3.0,
        ) {
            let p = params(3.0, TAU - 1e-12);
            let d = tx.hypot(ty);
            prop_assume!(d > 0.0 && (d - 3.0).abs() > 1e-6);
            prop_assert_eq!(in_fov(&AgentState::new(0.0, 0.0, th), tx, ty, &p), d <= 3.0);
        }
    }
}
