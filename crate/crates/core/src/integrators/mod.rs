//! Time integrators for the coupled Vlasov–Maxwell state.

mod split;
mod unsplit;

pub use split::{scheme5_step, scheme5f_step, scheme_a_step, scheme_b_step, scheme_c_step};
pub use unsplit::{scheme1_step, scheme2_step, scheme3_step, scheme4_step, scheme4_residual};

use crate::error::{Error, Result};
use crate::fields::{Curl, EMField, MaxwellFlux, MaxwellSolve, Staggered};
use crate::mesh::Mesh1D2V;
use crate::solvers::{gmres, KrylovConfig, NewtonConfig};
use crate::vlasov::{currents, DistributionField, VlasovFlux};

/// Integrator identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S3F,
    S4F,
    S5F,
}

impl SchemeId {
    pub const ALL: [SchemeId; 8] = [
        SchemeId::S1,
        SchemeId::S2,
        SchemeId::S3,
        SchemeId::S4,
        SchemeId::S5,
        SchemeId::S3F,
        SchemeId::S4F,
        SchemeId::S5F,
    ];

    pub fn parse(s: &str) -> Option<SchemeId> {
        match s.trim().to_ascii_uppercase().as_str() {
            "1" => Some(SchemeId::S1),
            "2" => Some(SchemeId::S2),
            "3" => Some(SchemeId::S3),
            "4" => Some(SchemeId::S4),
            "5" => Some(SchemeId::S5),
            "3F" => Some(SchemeId::S3F),
            "4F" => Some(SchemeId::S4F),
            "5F" => Some(SchemeId::S5F),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::S1 => "1",
            SchemeId::S2 => "2",
            SchemeId::S3 => "3",
            SchemeId::S4 => "4",
            SchemeId::S5 => "5",
            SchemeId::S3F => "3F",
            SchemeId::S4F => "4F",
            SchemeId::S5F => "5F",
        }
    }

    /// Schemes 1 and 2 advance f explicitly and run under a CFL restriction.
    pub fn is_explicit_in_f(self) -> bool {
        matches!(self, SchemeId::S1 | SchemeId::S2)
    }

    /// Schemes whose modified energy uses a staggered field copy.
    pub fn has_modified_energy(self) -> bool {
        matches!(self, SchemeId::S1 | SchemeId::S3)
    }
}

/// Time-step selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    Cfl(f64),
}

/// Default CFL number for polynomial degree `k`.
pub fn default_cfl(k: usize) -> f64 {
    match k {
        1 => 0.3,
        2 => 0.15,
        _ => 0.08,
    }
}

/// Integrator selection, fluxes, step policy and solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub scheme: SchemeId,
    pub vlasov_flux: VlasovFlux,
    pub maxwell_flux: MaxwellFlux,
    pub dt: DtPolicy,
    pub newton: NewtonConfig,
    pub krylov: KrylovConfig,
    pub maxwell_solve: MaxwellSolve,
}

impl SchemeConfig {
    pub fn new(scheme: SchemeId, dt: DtPolicy) -> SchemeConfig {
        SchemeConfig {
            scheme,
            vlasov_flux: VlasovFlux::Upwind,
            maxwell_flux: MaxwellFlux::AlternatingEplusBminus,
            dt,
            newton: NewtonConfig::default(),
            krylov: KrylovConfig::default(),
            maxwell_solve: MaxwellSolve::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if matches!(self.dt, DtPolicy::Cfl(_)) && !self.scheme.is_explicit_in_f() {
            return Err(Error::InvalidArgument("fixed dt required for implicit schemes".into()));
        }
        let (DtPolicy::Cfl(c) | DtPolicy::Fixed(c)) = self.dt;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument("dt and cfl must be positive".into()));
        }
        if self.vlasov_flux == VlasovFlux::Downwind {
            return Err(Error::InvalidArgument(
                "downwind flux is only used internally on negative steps".into(),
            ));
        }
        self.newton.validate()?;
        self.krylov.validate()
    }

    pub(crate) fn sigma(&self, dt: f64) -> f64 {
        self.vlasov_flux.for_step(dt).sigma()
    }
}

/// Triple-jump coefficients of a fourth-order symmetric composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionCoefficients {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl CompositionCoefficients {
    pub fn triple_jump() -> CompositionCoefficients {
        let c = 2f64.cbrt();
        let beta1 = (2.0 + c + 1.0 / c) / 3.0;
        CompositionCoefficients {
            beta1,
            beta2: 1.0 - 2.0 * beta1,
            beta3: beta1,
        }
    }
}

/// Full solver state at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub f: DistributionField,
    pub em: EMField,
    pub time: f64,
}

impl State {
    pub fn check_shape(&self, mesh: &Mesh1D2V) -> Result<()> {
        self.f.check_shape(mesh)?;
        self.em.check_shape(mesh)
    }

    /// Time-reversal map `(f(x, -v), E, -B)`; drops staggered copies.
    pub fn reversed(&self) -> State {
        State {
            f: self.f.reflect_velocity(),
            em: EMField {
                e1: self.em.e1.clone(),
                e2: self.em.e2.clone(),
                b3: self.em.b3.iter().map(|b| -b).collect(),
                staggered: None,
            },
            time: self.time,
        }
    }
}

/// Applies `step` with `beta1 dt`, `beta2 dt`, `beta3 dt` in turn.
pub fn compose_triple_jump<F>(mut step: F, coeffs: &CompositionCoefficients, state: &State, dt: f64) -> Result<State>
where
    F: FnMut(&State, f64) -> Result<State>,
{
    let s1 = step(state, coeffs.beta1 * dt)?;
    let s2 = step(&s1, coeffs.beta2 * dt)?;
    let mut s3 = step(&s2, coeffs.beta3 * dt)?;
    s3.time = state.time + dt;
    Ok(s3)
}

/// Advances `state` by `dt` with the configured scheme.
pub fn step(mesh: &Mesh1D2V, cfg: &SchemeConfig, state: &State, dt: f64) -> Result<State> {
    let tj = CompositionCoefficients::triple_jump();
    match cfg.scheme {
        SchemeId::S1 => scheme1_step(mesh, cfg, state, dt),
        SchemeId::S2 => scheme2_step(mesh, cfg, state, dt),
        SchemeId::S3 => scheme3_step(mesh, cfg, state, dt),
        SchemeId::S4 => scheme4_step(mesh, cfg, state, dt),
        SchemeId::S5 => scheme5_step(mesh, cfg, state, dt),
        SchemeId::S3F => compose_triple_jump(|s, h| scheme3_step(mesh, cfg, s, h), &tj, state, dt),
        SchemeId::S4F => compose_triple_jump(|s, h| scheme4_step(mesh, cfg, s, h), &tj, state, dt),
        SchemeId::S5F => scheme5f_step(mesh, cfg, state, dt),
    }
}

/// Stores the staggered field copy a leapfrog scheme needs at the first step.
pub fn prime_staggered(mesh: &Mesh1D2V, cfg: &SchemeConfig, state: &mut State, dt: f64) {
    let curl = Curl {
        mesh,
        flux: cfg.maxwell_flux,
    };
    match cfg.scheme {
        SchemeId::S1 => {
            let de = curl.d_e(&state.em.e1);
            let b3 = state.em.b3.iter().zip(&de).map(|(b, d)| b - 0.5 * dt * d).collect();
            state.em.staggered = Some(Staggered::B3Half { b3, dt });
        }
        SchemeId::S3 => {
            let (j1, j2) = currents(mesh, state.f.values());
            let db = curl.d_b(&state.em.b3);
            let n = j1.len();
            let e1 = (0..n).map(|i| state.em.e1[i] - 0.5 * dt * (db[i] - j1[i])).collect();
            let e2 = (0..n).map(|i| state.em.e2[i] + 0.5 * dt * j2[i]).collect();
            state.em.staggered = Some(Staggered::EHalf { e1, e2, dt });
        }
        _ => state.em.staggered = None,
    }
}

/// Explicit step size for the CFL policy.
pub fn cfl_dt(mesh: &Mesh1D2V, em: &EMField, cfl: f64) -> f64 {
    let vmax = mesh.v1().upper().abs().max(mesh.v1().lower().abs());
    let wmax = mesh.v2().upper().abs().max(mesh.v2().lower().abs());
    let vc = vmax.max(wmax);
    let a_max = (0..em.e1.len())
        .map(|i| em.e1[i].hypot(em.e2[i]) + vc * em.b3[i].abs())
        .fold(0.0f64, f64::max);
    let mut h = mesh.x2().min_width() / wmax;
    if a_max > 0.0 {
        h = h.min(mesh.v1().min_width() / a_max).min(mesh.v2().min_width() / a_max);
    }
    cfl * h
}

pub(crate) fn blow_up_check(values: &[f64], stage: &'static str, time: f64) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::BlowUp { stage, time })
    }
}

pub(crate) fn average(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

/// Solves `(I - dt/2 L) x = (I + dt/2 L) u` where `l_acc(u, s, out)` adds `s L u`.
pub(crate) fn midpoint_linear_solve<L>(l_acc: L, u: &[f64], dt: f64, cfg: &KrylovConfig) -> Result<Vec<f64>>
where
    L: Fn(&[f64], f64, &mut [f64]),
{
    let mut rhs = u.to_vec();
    l_acc(u, 0.5 * dt, &mut rhs);
    let apply = |x: &[f64], y: &mut [f64]| {
        y.copy_from_slice(x);
        l_acc(x, -0.5 * dt, y);
    };
    Ok(gmres(apply, &rhs, u, cfg)?.0)
}
