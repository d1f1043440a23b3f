use serde::{Deserialize, Serialize};

use crate::geom::{wrap_angle, Point};

/// Pose of one agent. `theta` is kept in `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl AgentState {
    /// Builds a pose, wrapping the heading.
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        AgentState {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn pos(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }
}

/// All agent poses at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Microstate {
    pub agents: Vec<AgentState>,
    pub t: f64,
}

impl Microstate {
    pub fn new(agents: Vec<AgentState>) -> Self {
        Microstate { agents, t: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Point> + '_ {
        self.agents.iter().map(AgentState::pos)
    }

    /// Applies a rotation by `angle` about the origin followed by a
    /// translation by `(dx, dy)` to every pose.
    pub fn transformed(&self, angle: f64, dx: f64, dy: f64) -> Microstate {
        let (s, c) = angle.sin_cos();
        let agents = self
            .agents
            .iter()
            .map(|a| AgentState::new(c * a.x - s * a.y + dx, s * a.x + c * a.y + dy, a.theta + angle))
            .collect();
        Microstate { agents, t: self.t }
    }

    /// Reorders agents so that output index `k` holds input agent `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Microstate {
        Microstate {
            agents: perm.iter().map(|&i| self.agents[i]).collect(),
            t: self.t,
        }
    }
}
