//! Swarm parameters and simulation controls.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SwarmError};

/// The five swarm parameters: sensing range, speed, turn rate, field-of-view
/// opening angle and agent count.
///
/// Fields are private so that every value in circulation has passed
/// validation. `phi` is always radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SwarmParams {
    gamma: f64,
    v: f64,
    omega: f64,
    phi: f64,
    n: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    gamma: f64,
    v: f64,
    omega: f64,
    phi_rad: f64,
    n: usize,
}

impl TryFrom<RawParams> for SwarmParams {
    type Error = SwarmError;
    fn try_from(r: RawParams) -> Result<Self> {
        SwarmParams::new(r.gamma, r.v, r.omega, r.phi_rad, r.n)
    }
}

impl From<SwarmParams> for RawParams {
    fn from(p: SwarmParams) -> Self {
        RawParams {
            gamma: p.gamma,
            v: p.v,
            omega: p.omega,
            phi_rad: p.phi,
            n: p.n,
        }
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {x}")))
    }
}

impl SwarmParams {
    pub fn new(gamma: f64, v: f64, omega: f64, phi: f64, n: usize) -> Result<Self> {
        positive("gamma", gamma)?;
        positive("v", v)?;
        positive("omega", omega)?;
        if !(phi.is_finite() && phi > 0.0 && phi < std::f64::consts::TAU) {
            return Err(invalid("phi", format!("must lie in (0, 2pi) radians, got {phi}")));
        }
        if n < 2 {
            return Err(invalid("n", format!("need at least 2 agents, got {n}")));
        }
        Ok(SwarmParams {
            gamma,
            v,
            omega,
            phi,
            n,
        })
    }

    /// Same as [`SwarmParams::new`] with the opening angle given in degrees.
    pub fn with_phi_degrees(gamma: f64, v: f64, omega: f64, phi_deg: f64, n: usize) -> Result<Self> {
        Self::new(gamma, v, omega, phi_deg.to_radians(), n)
    }

    /// Parameters with the critical opening angle `2pi / n`.
    pub fn critical(gamma: f64, v: f64, omega: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", format!("need at least 2 agents, got {n}")));
        }
        Self::new(gamma, v, omega, std::f64::consts::TAU / n as f64, n)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    /// FOV opening angle in radians.
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn n(&self) -> usize {
        self.n
    }

    /// Turning radius `v / omega` of a single agent under constant control.
    pub fn turning_radius(&self) -> f64 {
        self.v / self.omega
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(gamma, self.v, self.omega, self.phi, self.n)
    }
    pub fn with_v(self, v: f64) -> Result<Self> {
        Self::new(self.gamma, v, self.omega, self.phi, self.n)
    }
    pub fn with_omega(self, omega: f64) -> Result<Self> {
        Self::new(self.gamma, self.v, omega, self.phi, self.n)
    }
    pub fn with_phi(self, phi: f64) -> Result<Self> {
        Self::new(self.gamma, self.v, self.omega, phi, self.n)
    }
    pub fn with_n(self, n: usize) -> Result<Self> {
        Self::new(self.gamma, self.v, self.omega, self.phi, n)
    }

    /// Default integration step: `min(0.01 / omega, 0.01 * gamma / v)`.
    pub fn default_dt(&self) -> f64 {
        (0.01 / self.omega).min(0.01 * self.gamma / self.v)
    }
}

/// Integration and recording controls for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSimConfig", into = "RawSimConfig")]
pub struct SimConfig {
    dt: f64,
    horizon: f64,
    seed: u64,
    record_stride: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimConfig {
    dt: f64,
    horizon: f64,
    seed: u64,
    record_stride: u64,
}

impl TryFrom<RawSimConfig> for SimConfig {
    type Error = SwarmError;
    fn try_from(r: RawSimConfig) -> Result<Self> {
        SimConfig::new(r.dt, r.horizon, r.seed, r.record_stride)
    }
}

impl From<SimConfig> for RawSimConfig {
    fn from(c: SimConfig) -> Self {
        RawSimConfig {
            dt: c.dt,
            horizon: c.horizon,
            seed: c.seed,
            record_stride: c.record_stride,
        }
    }
}

impl SimConfig {
    pub fn new(dt: f64, horizon: f64, seed: u64, record_stride: u64) -> Result<Self> {
        positive("dt", dt)?;
        if !(horizon.is_finite() && horizon >= dt) {
            return Err(invalid("horizon", format!("must be finite and >= dt ({dt}), got {horizon}")));
        }
        if record_stride < 1 {
            return Err(invalid("record_stride", "must be >= 1"));
        }
        Ok(SimConfig {
            dt,
            horizon,
            seed,
            record_stride,
        })
    }

    /// Config using the parameters' default step and a stride chosen so that
    /// roughly `samples` states get recorded.
    pub fn for_params(params: &SwarmParams, horizon: f64, seed: u64, samples: u64) -> Result<Self> {
        let dt = params.default_dt();
        let steps = ((horizon / dt) - 1e-9).ceil().max(1.0) as u64;
        let stride = (steps / samples.max(1)).max(1);
        Self::new(dt, horizon, seed, stride)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn horizon(&self) -> f64 {
        self.horizon
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn record_stride(&self) -> u64 {
        self.record_stride
    }

    pub fn with_dt(self, dt: f64) -> Result<Self> {
        Self::new(dt, self.horizon, self.seed, self.record_stride)
    }
    pub fn with_seed(self, seed: u64) -> Self {
        SimConfig { seed, ..self }
    }
    pub fn with_record_stride(self, record_stride: u64) -> Result<Self> {
        Self::new(self.dt, self.horizon, self.seed, record_stride)
    }

    /// Number of integration steps; the run ends at the first step boundary
    /// at or beyond the horizon.
    pub fn n_steps(&self) -> u64 {
        ((self.horizon / self.dt) - 1e-9).ceil().max(1.0) as u64
    }

    /// Number of recorded samples, including the initial state.
    pub fn n_samples(&self) -> usize {
        (self.n_steps() / self.record_stride) as usize + 1
    }
}
