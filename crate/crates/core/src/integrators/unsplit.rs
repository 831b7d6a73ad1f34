//! Schemes 1–4: time integrators applied to the unsplit Vlasov–Maxwell system.

use super::{average, blow_up_check, midpoint_linear_solve, SchemeConfig, State};
use crate::error::{check_len, Result};
use crate::fields::{maxwell_leapfrog_halves, maxwell_midpoint_solve, Curl, EMField, Staggered};
use crate::mesh::Mesh1D2V;
use crate::solvers::newton_krylov;
use crate::vlasov::{currents, vlasov_acc, DistributionField};

/// `f + scale * L(g; E1, E2, B3)`.
fn vlasov_update(mesh: &Mesh1D2V, f: &[f64], g: &[f64], e1: &[f64], e2: &[f64], b3: &[f64], sigma: f64, scale: f64) -> Vec<f64> {
    let mut out = f.to_vec();
    vlasov_acc(mesh, g, e1, e2, b3, sigma, scale, &mut out);
    out
}

fn wrap_f(mesh: &Mesh1D2V, values: Vec<f64>) -> Result<DistributionField> {
    DistributionField::from_values(mesh, values)
}

/// Leapfrog fields with an explicit two-stage Vlasov update.
pub fn scheme1_step(mesh: &Mesh1D2V, cfg: &SchemeConfig, state: &State, dt: f64) -> Result<State> {
    state.check_shape(mesh)?;
    let sigma = cfg.sigma(dt);
    let em = &state.em;
    let f = state.f.values();
    let f_half = vlasov_update(mesh, f, f, &em.e1, &em.e2, &em.b3, sigma, 0.5 * dt);
    blow_up_check(&f_half, "scheme 1 half Vlasov step", state.time)?;
    let (j1, j2) = currents(mesh, &f_half);
    let lf = maxwell_leapfrog_halves(mesh, &em.e1, &em.b3, dt, &j1, cfg.maxwell_flux)?;
    let e2: Vec<f64> = em.e2.iter().zip(&j2).map(|(e, j)| e - dt * j).collect();
    let (e1_bar, e2_bar) = (average(&em.e1, &lf.e1), average(&em.e2, &e2));
    let f_new = vlasov_update(mesh, f, &f_half, &e1_bar, &e2_bar, &lf.b3_half, sigma, dt);
    blow_up_check(&f_new, "scheme 1 full Vlasov step", state.time)?;
    let out = State {
        f: wrap_f(mesh, f_new)?,
        em: EMField {
            e1: lf.e1,
            e2,
            b3: lf.b3,
            staggered: Some(Staggered::B3Half { b3: lf.b3_half, dt }),
        },
        time: state.time + dt,
    };
    blow_up_check(&out.em.b3, "scheme 1 field update", state.time)?;
    Ok(out)
}

/// Midpoint Maxwell with an explicit two-stage Vlasov update.
pub fn scheme2_step(mesh: &Mesh1D2V, cfg: &SchemeConfig, state: &State, dt: f64) -> Result<State> {
    state.check_shape(mesh)?;
    let out = scheme2_core(mesh, cfg, state, dt)?;
    blow_up_check(out.f.values(), "scheme 2 full Vlasov step", state.time)?;
    Ok(out)
}

/// Leapfrog in E with a linear implicit-midpoint Vlasov solve.
pub fn scheme3_step(mesh: &Mesh1D2V, cfg: &SchemeConfig, state: &State, dt: f64) -> Result<State> {
    state.check_shape(mesh)?;
    let sigma = cfg.sigma(dt);
    let curl = Curl {
        mesh,
        flux: cfg.maxwell_flux,
    };
    let em = &state.em;
    let n = mesh.nx_nodes();
    let (j1, j2) = currents(mesh, state.f.values());
    let db = curl.d_b(&em.b3);
    let e1_half: Vec<f64> = (0..n).map(|i| em.e1[i] + 0.5 * dt * (db[i] - j1[i])).collect();
    let e2_half: Vec<f64> = (0..n).map(|i| em.e2[i] - 0.5 * dt * j2[i]).collect();
    let de = curl.d_e(&e1_half);
    let b3: Vec<f64> = (0..n).map(|i| em.b3[i] + dt * de[i]).collect();
    let b_bar = average(&em.b3, &b3);
    let f_new = midpoint_linear_solve(
        |u, s, out| vlasov_acc(mesh, u, &e1_half, &e2_half, &b_bar, sigma, s, out),
        state.f.values(),
        dt,
        &cfg.krylov,
    )
    .map_err(|e| e.in_stage("scheme 3 Vlasov solve"))?;
    blow_up_check(&f_new, "scheme 3 Vlasov solve", state.time)?;
    let (j1n, j2n) = currents(mesh, &f_new);
    let db_new = curl.d_b(&b3);
    let e1: Vec<f64> = (0..n).map(|i| e1_half[i] + 0.5 * dt * (db_new[i] - j1n[i])).collect();
    let e2: Vec<f64> = (0..n).map(|i| e2_half[i] - 0.5 * dt * j2n[i]).collect();
    Ok(State {
        f: wrap_f(mesh, f_new)?,
        em: EMField {
            e1,
            e2,
            b3,
            staggered: Some(Staggered::EHalf {
                e1: e1_half,
                e2: e2_half,
                dt,
            }),
        },
        time: state.time + dt,
    })
}

/// Residual of the fully implicit midpoint step at the candidate `u = (f', E1', E2', B3')`.
pub fn scheme4_residual(mesh: &Mesh1D2V, cfg: &SchemeConfig, state: &State, dt: f64, u: &[f64], r: &mut [f64]) -> Result<()> {
    let nf = mesh.f_len();
    let n = mesh.nx_nodes();
    check_len("scheme 4 unknown", nf + 3 * n, u.len())?;
    check_len("scheme 4 residual", nf + 3 * n, r.len())?;
    let sigma = cfg.sigma(dt);
    let curl = Curl {
        mesh,
        flux: cfg.maxwell_flux,
    };
    let f = state.f.values();
    let em = &state.em;
    let (fu, rest) = u.split_at(nf);
    let (e1u, rest) = rest.split_at(n);
    let (e2u, b3u) = rest.split_at(n);
    let f_bar = average(f, fu);
    let (e1b, e2b, b3b) = (average(&em.e1, e1u), average(&em.e2, e2u), average(&em.b3, b3u));
    let (rf, rest) = r.split_at_mut(nf);
    for i in 0..nf {
        rf[i] = fu[i] - f[i];
    }
    vlasov_acc(mesh, &f_bar, &e1b, &e2b, &b3b, sigma, -dt, rf);
    let (j1, j2) = currents(mesh, &f_bar);
    let db = curl.d_b(&b3b);
    let de = curl.d_e(&e1b);
    let (re1, rest) = rest.split_at_mut(n);
    let (re2, rb3) = rest.split_at_mut(n);
    for i in 0..n {
        re1[i] = e1u[i] - em.e1[i] - dt * (db[i] - j1[i]);
        re2[i] = e2u[i] - em.e2[i] + dt * j2[i];
        rb3[i] = b3u[i] - em.b3[i] - dt * de[i];
    }
    Ok(())
}

/// Fully implicit midpoint step on (f, E, B) by Jacobian-free Newton–Krylov.
pub fn scheme4_step(mesh: &Mesh1D2V, cfg: &SchemeConfig, state: &State, dt: f64) -> Result<State> {
    state.check_shape(mesh)?;
    let nf = mesh.f_len();
    let n = mesh.nx_nodes();
    // Scheme 2 is a second-order accurate predictor for the Newton iteration.
    let guess = scheme2_core(mesh, cfg, state, dt)?;
    let mut u0 = guess.f.into_values();
    u0.extend_from_slice(&guess.em.e1);
    u0.extend_from_slice(&guess.em.e2);
    u0.extend_from_slice(&guess.em.b3);
    let (u, _) = newton_krylov(
        |u, r| {
            scheme4_residual(mesh, cfg, state, dt, u, r).expect("shapes checked above");
        },
        u0,
        &cfg.newton,
        &cfg.krylov,
    )
    .map_err(|e| e.in_stage("scheme 4 Newton solve"))?;
    blow_up_check(&u, "scheme 4 Newton solve", state.time)?;
    Ok(State {
        f: wrap_f(mesh, u[..nf].to_vec())?,
        em: EMField {
            e1: u[nf..nf + n].to_vec(),
            e2: u[nf + n..nf + 2 * n].to_vec(),
            b3: u[nf + 2 * n..].to_vec(),
            staggered: None,
        },
        time: state.time + dt,
    })
}

fn scheme2_core(mesh: &Mesh1D2V, cfg: &SchemeConfig, state: &State, dt: f64) -> Result<State> {
    let sigma = cfg.sigma(dt);
    let em = &state.em;
    let f = state.f.values();
    let f_half = vlasov_update(mesh, f, f, &em.e1, &em.e2, &em.b3, sigma, 0.5 * dt);
    blow_up_check(&f_half, "scheme 2 half Vlasov step", state.time)?;
    let (j1, j2) = currents(mesh, &f_half);
    let (e1, b3) = maxwell_midpoint_solve(mesh, &em.e1, &em.b3, dt, &j1, cfg.maxwell_flux, &cfg.maxwell_solve)
        .map_err(|e| e.in_stage("scheme 2 Maxwell solve"))?;
    let e2: Vec<f64> = em.e2.iter().zip(&j2).map(|(e, j)| e - dt * j).collect();
    let f_new = vlasov_update(
        mesh,
        f,
        &f_half,
        &average(&em.e1, &e1),
        &average(&em.e2, &e2),
        &average(&em.b3, &b3),
        sigma,
        dt,
    );
    Ok(State {
        f: wrap_f(mesh, f_new)?,
        em: EMField {
            e1,
            e2,
            b3,
            staggered: None,
        },
        time: state.time + dt,
    })
}
