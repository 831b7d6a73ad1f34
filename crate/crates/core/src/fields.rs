//! Electromagnetic unknowns E1, E2, B3 and the 1D DG curl operators.

use crate::dg::{Boundary, Sweep};
use crate::error::{check_len, Error, Result};
use crate::mesh::Mesh1D2V;
use crate::solvers::{assemble_dense, dense_solve, gmres, KrylovConfig};

/// Interface flux of the Maxwell curl operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxwellFlux {
    Central,
    /// E taken from the right (plus) cell, B from the left (minus) cell.
    AlternatingEplusBminus,
    /// E taken from the left (minus) cell, B from the right (plus) cell.
    AlternatingEminusBplus,
}

impl MaxwellFlux {
    pub fn name(self) -> &'static str {
        match self {
            MaxwellFlux::Central => "central",
            MaxwellFlux::AlternatingEplusBminus => "alt_ep_bm",
            MaxwellFlux::AlternatingEminusBplus => "alt_em_bp",
        }
    }

    pub fn parse(s: &str) -> Option<MaxwellFlux> {
        match s {
            "central" => Some(MaxwellFlux::Central),
            "alt_ep_bm" => Some(MaxwellFlux::AlternatingEplusBminus),
            "alt_em_bp" => Some(MaxwellFlux::AlternatingEminusBplus),
            _ => None,
        }
    }

    /// Trace selectors `(for E, for B)`: +1 plus side, -1 minus side, 0 average.
    fn trace_sides(self) -> (f64, f64) {
        match self {
            MaxwellFlux::Central => (0.0, 0.0),
            MaxwellFlux::AlternatingEplusBminus => (1.0, -1.0),
            MaxwellFlux::AlternatingEminusBplus => (-1.0, 1.0),
        }
    }
}

/// Half-step field copy kept by the staggered schemes for their modified energies.
#[derive(Debug, Clone, PartialEq)]
pub enum Staggered {
    /// B3 at t - dt/2 (leapfrog in B).
    B3Half { b3: Vec<f64>, dt: f64 },
    /// E1, E2 at t - dt/2 (leapfrog in E).
    EHalf { e1: Vec<f64>, e2: Vec<f64>, dt: f64 },
}

/// Nodal values of E1, E2, B3 on the x2 mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct EMField {
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub b3: Vec<f64>,
    pub staggered: Option<Staggered>,
}

impl EMField {
    pub fn zeros(mesh: &Mesh1D2V) -> EMField {
        let n = mesh.nx_nodes();
        EMField {
            e1: vec![0.0; n],
            e2: vec![0.0; n],
            b3: vec![0.0; n],
            staggered: None,
        }
    }

    pub fn check_shape(&self, mesh: &Mesh1D2V) -> Result<()> {
        let n = mesh.nx_nodes();
        check_len("E1", n, self.e1.len())?;
        check_len("E2", n, self.e2.len())?;
        check_len("B3", n, self.b3.len())
    }

    pub fn is_finite(&self) -> bool {
        self.e1.iter().chain(&self.e2).chain(&self.b3).all(|v| v.is_finite())
    }
}

/// DG approximation of d/dx2 of `u` with the face value chosen by `side`.
pub(crate) fn x_derivative(mesh: &Mesh1D2V, u: &[f64], side: f64) -> Vec<f64> {
    let mut out = vec![0.0; u.len()];
    x_derivative_acc(mesh, u, side, 1.0, &mut out);
    out
}

/// `out += scale * d/dx2 u`. With speed -1 the sweep flux is `-u_hat`, and
/// sigma = +1 / -1 / 0 selects the plus / minus / averaged trace.
pub(crate) fn x_derivative_acc(mesh: &Mesh1D2V, u: &[f64], side: f64, scale: f64, out: &mut [f64]) {
    Sweep {
        ops: &mesh.ops,
        inv_half_width: mesh.x2().inv_half_width(),
        boundary: Boundary::Periodic,
        sigma: side,
        outer: 1,
        inner: 1,
    }
    .apply(&[-1.0], u, out, scale);
}

/// Curl pair used by the integrators: `d_e(E1)` drives B3, `d_b(B3)` drives E1.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Curl<'a> {
    pub mesh: &'a Mesh1D2V,
    pub flux: MaxwellFlux,
}

impl Curl<'_> {
    pub fn d_e(&self, e1: &[f64]) -> Vec<f64> {
        x_derivative(self.mesh, e1, self.flux.trace_sides().0)
    }

    pub fn d_b(&self, b3: &[f64]) -> Vec<f64> {
        x_derivative(self.mesh, b3, self.flux.trace_sides().1)
    }
}

/// Spatial parts of `dE1/dt = (B3)_x2` and `dB3/dt = (E1)_x2`.
pub fn maxwell_weak_rhs(mesh: &Mesh1D2V, e1: &[f64], b3: &[f64], flux: MaxwellFlux) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len("E1", mesh.nx_nodes(), e1.len())?;
    check_len("B3", mesh.nx_nodes(), b3.len())?;
    let curl = Curl { mesh, flux };
    Ok((curl.d_b(b3), curl.d_e(e1)))
}

/// How the linear midpoint Maxwell system is solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxwellSolve {
    Krylov(KrylovConfig),
    /// Dense LU; limited to `N_x (k + 1) <= 512`.
    Dense,
}

impl Default for MaxwellSolve {
    fn default() -> Self {
        MaxwellSolve::Krylov(KrylovConfig::default())
    }
}

pub const DENSE_MAXWELL_LIMIT: usize = 512;

/// Implicit midpoint step of `(E1, B3)` with a time-centred current `j1`:
/// `E1' = E1 + dt (D_B B_bar - j1)`, `B3' = B3 + dt D_E E1_bar`.
pub fn maxwell_midpoint_solve(
    mesh: &Mesh1D2V,
    e1: &[f64],
    b3: &[f64],
    dt: f64,
    j1: &[f64],
    flux: MaxwellFlux,
    solve: &MaxwellSolve,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = mesh.nx_nodes();
    check_len("E1", n, e1.len())?;
    check_len("B3", n, b3.len())?;
    check_len("j1", n, j1.len())?;
    if dt == 0.0 || !dt.is_finite() {
        return Err(Error::InvalidArgument("time step must be finite and nonzero".into()));
    }
    let curl = Curl { mesh, flux };
    let (se, sb) = flux.trace_sides();
    let half = 0.5 * dt;
    let db = curl.d_b(b3);
    let de = curl.d_e(e1);
    let mut rhs = vec![0.0; 2 * n];
    for i in 0..n {
        rhs[i] = e1[i] + half * db[i] - dt * j1[i];
        rhs[n + i] = b3[i] + half * de[i];
    }
    let apply = |x: &[f64], y: &mut [f64]| {
        let (xe, xb) = x.split_at(n);
        let (ye, yb) = y.split_at_mut(n);
        ye.copy_from_slice(xe);
        yb.copy_from_slice(xb);
        x_derivative_acc(mesh, xb, sb, -half, ye);
        x_derivative_acc(mesh, xe, se, -half, yb);
    };
    let x = match solve {
        MaxwellSolve::Krylov(cfg) => {
            let x0: Vec<f64> = e1.iter().chain(b3).copied().collect();
            gmres(apply, &rhs, &x0, cfg).map_err(|e| e.in_stage("Maxwell midpoint solve"))?.0
        }
        MaxwellSolve::Dense => {
            if n > DENSE_MAXWELL_LIMIT {
                return Err(Error::InvalidArgument(format!(
                    "dense Maxwell solve limited to {DENSE_MAXWELL_LIMIT} nodes, mesh has {n}"
                )));
            }
            dense_solve(2 * n, assemble_dense(2 * n, apply), &rhs)?
        }
    };
    let (e, b) = x.split_at(n);
    Ok((e.to_vec(), b.to_vec()))
}

/// Result of a leapfrog field update.
#[derive(Debug, Clone, PartialEq)]
pub struct LeapfrogFields {
    pub e1: Vec<f64>,
    pub b3: Vec<f64>,
    /// B3 at the half step, used by the modified energy.
    pub b3_half: Vec<f64>,
}

/// Leapfrog update: half step in B3, full step in E1 with current `j1`, half step in B3.
pub fn maxwell_leapfrog_halves(
    mesh: &Mesh1D2V,
    e1: &[f64],
    b3: &[f64],
    dt: f64,
    j1: &[f64],
    flux: MaxwellFlux,
) -> Result<LeapfrogFields> {
    let n = mesh.nx_nodes();
    check_len("E1", n, e1.len())?;
    check_len("B3", n, b3.len())?;
    check_len("j1", n, j1.len())?;
    let curl = Curl { mesh, flux };
    let b_half = half_b_step(&curl, b3, e1, 0.5 * dt);
    let db = curl.d_b(&b_half);
    let e_new: Vec<f64> = (0..n).map(|i| e1[i] + dt * (db[i] - j1[i])).collect();
    let b_new = half_b_step(&curl, &b_half, &e_new, 0.5 * dt);
    Ok(LeapfrogFields {
        e1: e_new,
        b3: b_new,
        b3_half: b_half,
    })
}

fn half_b_step(curl: &Curl, b3: &[f64], e1: &[f64], h: f64) -> Vec<f64> {
    let de = curl.d_e(e1);
    b3.iter().zip(&de).map(|(b, d)| b + h * d).collect()
}
