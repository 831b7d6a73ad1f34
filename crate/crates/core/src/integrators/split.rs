//! Energy-conserving splitting: x-streaming (a), electric acceleration with the
//! E update (b), Maxwell curl plus magnetic rotation (c), and their Strang and
//! triple-jump compositions.

use rayon::prelude::*;

use super::{compose_triple_jump, midpoint_linear_solve, CompositionCoefficients, SchemeConfig, State};
use crate::error::{check_len, Result};
use crate::fields::{maxwell_midpoint_solve, EMField};
use crate::mesh::Mesh1D2V;
use crate::solvers::newton_krylov;
use crate::vlasov::{plane_moments, transport_v_acc, transport_x_line_acc, DistributionField, VelocityCoefficients};

/// Implicit-midpoint x-streaming, one periodic line per velocity node.
pub fn scheme_a_step(mesh: &Mesh1D2V, cfg: &SchemeConfig, f: &DistributionField, dt: f64) -> Result<DistributionField> {
    f.check_shape(mesh)?;
    let sigma = cfg.sigma(dt);
    let (nx, _, n2) = f.dims();
    let p = f.plane_len();
    let np = mesh.np();
    let v2 = mesh.v2().nodes();
    let vals = f.values();
    let lines: Vec<Option<Vec<f64>>> = (0..p)
        .into_par_iter()
        .map(|idx| {
            let b = idx % n2;
            let speed = v2[b];
            if speed == 0.0 {
                return Ok(None);
            }
            let line: Vec<f64> = (0..nx).map(|ix| vals[ix * p + idx]).collect();
            midpoint_linear_solve(
                |u, s, out| transport_x_line_acc(mesh, u, speed, sigma, s, out),
                &line,
                dt,
                &cfg.krylov,
            )
            .map(Some)
            .map_err(|e| e.in_stage(format!("scheme a slice (v2 cell {}, node {})", b / np, b % np)))
        })
        .collect::<Result<_>>()?;
    let mut out = f.clone();
    let dst = out.values_mut();
    for (idx, line) in lines.into_iter().enumerate() {
        if let Some(line) = line {
            for (ix, v) in line.into_iter().enumerate() {
                dst[ix * p + idx] = v;
            }
        }
    }
    Ok(out)
}

/// Per-x-node nonlinear solve of electric acceleration coupled to `E_t = -J`.
pub fn scheme_b_step(
    mesh: &Mesh1D2V,
    cfg: &SchemeConfig,
    f: &DistributionField,
    e1: &[f64],
    e2: &[f64],
    dt: f64,
) -> Result<(DistributionField, Vec<f64>, Vec<f64>)> {
    f.check_shape(mesh)?;
    let n = mesh.nx_nodes();
    check_len("E1", n, e1.len())?;
    check_len("E2", n, e2.len())?;
    let sigma = cfg.sigma(dt);
    let p = f.plane_len();
    let np = mesh.np();
    let solved: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|ix| {
            let plane = f.plane(ix);
            let (_, j1f, j2f) = plane_moments(mesh, plane);
            let (e1o, e2o) = (e1[ix], e2[ix]);
            let mut u0 = plane.to_vec();
            u0.push(e1o);
            u0.push(e2o);
            let mut f_bar = vec![0.0; p];
            let residual = |u: &[f64], r: &mut [f64]| {
                let (g, e) = u.split_at(p);
                let coeffs = VelocityCoefficients::lorentz(mesh, 0.5 * (e1o + e[0]), 0.5 * (e2o + e[1]), 0.0);
                for i in 0..p {
                    f_bar[i] = 0.5 * (plane[i] + g[i]);
                    r[i] = g[i] - plane[i];
                }
                transport_v_acc(mesh, &f_bar, &coeffs, sigma, -dt, &mut r[..p]);
                let (_, j1g, j2g) = plane_moments(mesh, g);
                r[p] = e[0] - e1o + 0.5 * dt * (j1f + j1g);
                r[p + 1] = e[1] - e2o + 0.5 * dt * (j2f + j2g);
            };
            newton_krylov(residual, u0, &cfg.newton, &cfg.krylov)
                .map(|(u, _)| u)
                .map_err(|e| e.in_stage(format!("scheme b at x node (cell {}, node {})", ix / np, ix % np)))
        })
        .collect::<Result<_>>()?;
    let mut out = f.clone();
    let mut e1n = vec![0.0; n];
    let mut e2n = vec![0.0; n];
    for (ix, (u, chunk)) in solved.iter().zip(out.values_mut().chunks_mut(p)).enumerate() {
        chunk.copy_from_slice(&u[..p]);
        e1n[ix] = u[p];
        e2n[ix] = u[p + 1];
    }
    Ok((out, e1n, e2n))
}

/// Vacuum midpoint Maxwell step followed by the magnetic rotation of f.
pub fn scheme_c_step(
    mesh: &Mesh1D2V,
    cfg: &SchemeConfig,
    f: &DistributionField,
    e1: &[f64],
    b3: &[f64],
    dt: f64,
) -> Result<(DistributionField, Vec<f64>, Vec<f64>)> {
    f.check_shape(mesh)?;
    let n = mesh.nx_nodes();
    let zero = vec![0.0; n];
    let (e1n, b3n) = maxwell_midpoint_solve(mesh, e1, b3, dt, &zero, cfg.maxwell_flux, &cfg.maxwell_solve)
        .map_err(|e| e.in_stage("scheme c Maxwell solve"))?;
    let sigma = cfg.sigma(dt);
    let p = f.plane_len();
    let np = mesh.np();
    let planes: Vec<Option<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|ix| {
            let b_bar = 0.5 * (b3[ix] + b3n[ix]);
            if b_bar == 0.0 {
                return Ok(None);
            }
            let coeffs = VelocityCoefficients::rotation(mesh, b_bar);
            midpoint_linear_solve(
                |u, s, out| transport_v_acc(mesh, u, &coeffs, sigma, s, out),
                f.plane(ix),
                dt,
                &cfg.krylov,
            )
            .map(Some)
            .map_err(|e| e.in_stage(format!("scheme c rotation at x node (cell {}, node {})", ix / np, ix % np)))
        })
        .collect::<Result<_>>()?;
    let mut out = f.clone();
    for (plane, chunk) in planes.into_iter().zip(out.values_mut().chunks_mut(p)) {
        if let Some(plane) = plane {
            chunk.copy_from_slice(&plane);
        }
    }
    Ok((out, e1n, b3n))
}

/// Strang composition a(dt/2) b(dt/2) c(dt) b(dt/2) a(dt/2).
pub fn scheme5_step(mesh: &Mesh1D2V, cfg: &SchemeConfig, state: &State, dt: f64) -> Result<State> {
    state.check_shape(mesh)?;
    let h = 0.5 * dt;
    let em = &state.em;
    let f = scheme_a_step(mesh, cfg, &state.f, h)?;
    let (f, e1, e2) = scheme_b_step(mesh, cfg, &f, &em.e1, &em.e2, h)?;
    let (f, e1, b3) = scheme_c_step(mesh, cfg, &f, &e1, &em.b3, dt)?;
    let (f, e1, e2) = scheme_b_step(mesh, cfg, &f, &e1, &e2, h)?;
    let f = scheme_a_step(mesh, cfg, &f, h)?;
    super::blow_up_check(f.values(), "scheme 5 step", state.time)?;
    Ok(State {
        f,
        em: EMField {
            e1,
            e2,
            b3,
            staggered: None,
        },
        time: state.time + dt,
    })
}

/// Fourth-order triple-jump composition of scheme 5.
pub fn scheme5f_step(mesh: &Mesh1D2V, cfg: &SchemeConfig, state: &State, dt: f64) -> Result<State> {
    compose_triple_jump(
        |s, h| scheme5_step(mesh, cfg, s, h),
        &CompositionCoefficients::triple_jump(),
        state,
        dt,
    )
}
