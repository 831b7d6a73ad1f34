//! Streaming Weibel instability setups.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::EMField;
use crate::integrators::State;
use crate::mesh::Mesh1D2V;
use crate::vlasov::DistributionField;

/// Two counter-streaming Maxwellian beams with a seeded magnetic perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibelParams {
    /// Thermal spread; the thermal velocity is `sqrt(beta)`.
    pub beta: f64,
    /// Amplitude of the initial `B3` perturbation.
    pub b: f64,
    /// Fraction of particles in the first beam.
    pub delta: f64,
    pub v01: f64,
    pub v02: f64,
    /// Wave number of the perturbation.
    pub k0: f64,
}

impl WeibelParams {
    /// Initially symmetric beams.
    pub fn run1() -> WeibelParams {
        WeibelParams {
            beta: 0.01,
            b: 1e-3,
            delta: 0.5,
            v01: 0.3,
            v02: 0.3,
            k0: 0.2,
        }
    }

    /// Initially nonsymmetric beams.
    pub fn run2() -> WeibelParams {
        WeibelParams {
            delta: 1.0 / 6.0,
            v01: 0.5,
            v02: 0.1,
            ..WeibelParams::run1()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.beta > 0.0
            && (0.0..=1.0).contains(&self.delta)
            && self.k0 > 0.0
            && [self.beta, self.b, self.delta, self.v01, self.v02, self.k0].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid Weibel parameters {self:?}")))
        }
    }

    /// Periodic length `2 pi / k0`.
    pub fn length(&self) -> f64 {
        2.0 * PI / self.k0
    }

    /// Initial distribution; independent of x2.
    pub fn f0(&self, v1: f64, v2: f64) -> f64 {
        let beta = self.beta;
        let beams = self.delta * (-(v1 - self.v01).powi(2) / beta).exp()
            + (1.0 - self.delta) * (-(v1 + self.v02).powi(2) / beta).exp();
        (-v2 * v2 / beta).exp() * beams / (PI * beta)
    }

    pub fn b3_0(&self, x2: f64) -> f64 {
        self.b * (self.k0 * x2).sin()
    }
}

/// Named initial-value problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    WeibelRun1,
    WeibelRun2,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::WeibelRun1, Preset::WeibelRun2];

    pub fn name(self) -> &'static str {
        match self {
            Preset::WeibelRun1 => "weibel_run1",
            Preset::WeibelRun2 => "weibel_run2",
        }
    }

    pub fn parse(s: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn params(self) -> WeibelParams {
        match self {
            Preset::WeibelRun1 => WeibelParams::run1(),
            Preset::WeibelRun2 => WeibelParams::run2(),
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::WeibelRun1 => "streaming Weibel, symmetric beams",
            Preset::WeibelRun2 => "streaming Weibel, nonsymmetric beams",
        }
    }
}

/// Snapshot times used when a preset run does not list its own.
pub const DEFAULT_SNAPSHOT_TIMES: [f64; 3] = [55.0, 82.0, 125.0];
/// f-slice locations in x2 used when a preset run does not list its own.
pub const DEFAULT_SLICE_LOCATIONS: [f64; 2] = [0.0625 * PI, 4.9375 * PI];

/// Collocated initial state: mixture-of-Maxwellians f, zero E, `B3 = b sin(k0 x2)`.
pub fn weibel_initial_state(params: &WeibelParams, mesh: &Mesh1D2V) -> Result<State> {
    params.validate()?;
    let l = params.length();
    if (mesh.length() - l).abs() > 1e-12 * l || mesh.x2().lower() != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mesh spans [{}, {}] but the preset needs [0, {l}]",
            mesh.x2().lower(),
            mesh.x2().upper()
        )));
    }
    let f = DistributionField::from_fn(mesh, |_, v1, v2| params.f0(v1, v2))?;
    let mut em = EMField::zeros(mesh);
    em.b3 = mesh.x2().nodes().iter().map(|&x| params.b3_0(x)).collect();
    Ok(State { f, em, time: 0.0 })
}
