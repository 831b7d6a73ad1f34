//! Conserved quantities, energy partition, modified energies and log Fourier modes.

use crate::error::{check_len, Error, Result};
use crate::fields::{Curl, MaxwellFlux, Staggered};
use crate::integrators::{SchemeId, State};
use crate::mesh::Mesh1D2V;
use crate::vlasov::{currents, DistributionField};

/// Lower bound reported by [`log_fourier_modes`] for vanishing coefficients.
pub const LOG_MODE_FLOOR: f64 = -300.0;

/// Per-step measurements of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub time: f64,
    pub particle_number: f64,
    pub l2_f: f64,
    pub energies: EnergyReport,
    /// First four log Fourier modes of E1, E2 and B3.
    pub logfm: [Vec<f64>; 3],
}

/// Energy partition. Components are normalised by `1/(2L)`, `total` is the
/// un-normalised `1/2 [int int f |v|^2 + int (E1^2 + E2^2 + B3^2)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub k1: f64,
    pub k2: f64,
    pub e1_energy: f64,
    pub e2_energy: f64,
    pub b3_energy: f64,
    pub total: f64,
    pub modified: Option<f64>,
}

/// Phase-space integral of f.
pub fn particle_number(mesh: &Mesh1D2V, f: &DistributionField) -> f64 {
    weighted_sum(mesh, f.values(), |v| v)
}

/// L2 norm of f.
pub fn l2_norm(mesh: &Mesh1D2V, f: &DistributionField) -> f64 {
    weighted_sum(mesh, f.values(), |v| v * v).sqrt()
}

fn weighted_sum(mesh: &Mesh1D2V, f: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let (w1, w2) = (mesh.v1().weights(), mesh.v2().weights());
    let n2 = w2.len();
    let p = mesh.plane_len();
    let mut total = 0.0;
    for (ix, &wx) in mesh.x2().weights().iter().enumerate() {
        let plane = &f[ix * p..(ix + 1) * p];
        let mut s = 0.0;
        for (a, &wa) in w1.iter().enumerate() {
            let row = &plane[a * n2..(a + 1) * n2];
            s += wa * row.iter().zip(w2).map(|(v, w)| w * g(*v)).sum::<f64>();
        }
        total += wx * s;
    }
    total
}

/// `(int int f v1^2, int int f v2^2)`.
pub fn kinetic_integrals(mesh: &Mesh1D2V, f: &DistributionField) -> (f64, f64) {
    let (w1, w2) = (mesh.v1().weights(), mesh.v2().weights());
    let (v1, v2) = (mesh.v1().nodes(), mesh.v2().nodes());
    let n2 = w2.len();
    let p = mesh.plane_len();
    let (mut s1, mut s2) = (0.0, 0.0);
    for (ix, &wx) in mesh.x2().weights().iter().enumerate() {
        let plane = &f.values()[ix * p..(ix + 1) * p];
        let (mut p1, mut p2) = (0.0, 0.0);
        for a in 0..w1.len() {
            let (mut r0, mut r2) = (0.0, 0.0);
            for b in 0..n2 {
                let wf = w2[b] * plane[a * n2 + b];
                r0 += wf;
                r2 += wf * v2[b] * v2[b];
            }
            p1 += w1[a] * v1[a] * v1[a] * r0;
            p2 += w1[a] * r2;
        }
        s1 += wx * p1;
        s2 += wx * p2;
    }
    (s1, s2)
}

/// Quadrature of `u w` over the x2 mesh.
pub fn field_inner(mesh: &Mesh1D2V, u: &[f64], w: &[f64]) -> f64 {
    mesh.x2().weights().iter().zip(u).zip(w).map(|((q, a), b)| q * a * b).sum()
}

/// Integral of |f| over the outermost velocity cells; a measure of boundary losses.
pub fn velocity_boundary_mass(mesh: &Mesh1D2V, f: &DistributionField) -> f64 {
    let np = mesh.np();
    let (n1c, n2c) = (mesh.v1().n_cells(), mesh.v2().n_cells());
    let (w1, w2) = (mesh.v1().weights(), mesh.v2().weights());
    let n2 = w2.len();
    let p = mesh.plane_len();
    let mut total = 0.0;
    for (ix, &wx) in mesh.x2().weights().iter().enumerate() {
        for a in 0..w1.len() {
            for b in 0..n2 {
                let (ca, cb) = (a / np, b / np);
                if ca == 0 || cb == 0 || ca + 1 == n1c || cb + 1 == n2c {
                    total += wx * w1[a] * w2[b] * f.values()[ix * p + a * n2 + b].abs();
                }
            }
        }
    }
    total
}

/// Energy partition and, for the leapfrog schemes, the modified energy.
pub fn energies(mesh: &Mesh1D2V, state: &State, scheme: SchemeId, flux: MaxwellFlux) -> Result<EnergyReport> {
    state.check_shape(mesh)?;
    let em = &state.em;
    let two_l = 2.0 * mesh.length();
    let (kin1, kin2) = kinetic_integrals(mesh, &state.f);
    let (ee1, ee2, eb3) = (
        field_inner(mesh, &em.e1, &em.e1),
        field_inner(mesh, &em.e2, &em.e2),
        field_inner(mesh, &em.b3, &em.b3),
    );
    let total = 0.5 * (kin1 + kin2 + ee1 + ee2 + eb3);
    let curl = Curl { mesh, flux };
    let modified = match (scheme, &em.staggered) {
        (SchemeId::S1, Some(Staggered::B3Half { b3, dt })) => {
            check_len("staggered B3", em.b3.len(), b3.len())?;
            let de = curl.d_e(&em.e1);
            let ahead: Vec<f64> = em.b3.iter().zip(&de).map(|(b, d)| b + 0.5 * dt * d).collect();
            Some(0.5 * (kin1 + kin2 + ee1 + ee2 + field_inner(mesh, b3, &ahead)))
        }
        (SchemeId::S3, Some(Staggered::EHalf { e1, e2, dt })) => {
            check_len("staggered E1", em.e1.len(), e1.len())?;
            check_len("staggered E2", em.e2.len(), e2.len())?;
            let (j1, j2) = currents(mesh, state.f.values());
            let db = curl.d_b(&em.b3);
            let n = em.e1.len();
            let a1: Vec<f64> = (0..n).map(|i| em.e1[i] + 0.5 * dt * (db[i] - j1[i])).collect();
            let a2: Vec<f64> = (0..n).map(|i| em.e2[i] - 0.5 * dt * j2[i]).collect();
            Some(0.5 * (kin1 + kin2 + eb3 + field_inner(mesh, e1, &a1) + field_inner(mesh, e2, &a2)))
        }
        (SchemeId::S1 | SchemeId::S3, _) => {
            return Err(Error::InvalidArgument(format!(
                "scheme {} requires its staggered field copy for the modified energy",
                scheme.name()
            )))
        }
        _ => None,
    };
    Ok(EnergyReport {
        k1: kin1 / two_l,
        k2: kin2 / two_l,
        e1_energy: ee1 / two_l,
        e2_energy: ee2 / two_l,
        b3_energy: eb3 / two_l,
        total,
        modified,
    })
}

/// `log10((1/L) sqrt(S_n^2 + C_n^2))` for `n = 1..=count`, where `S_n`, `C_n` are the
/// sine and cosine projections of `values` at wave number `n kappa`.
pub fn log_fourier_modes(mesh: &Mesh1D2V, values: &[f64], count: usize, kappa: f64) -> Result<Vec<f64>> {
    check_len("field values", mesh.nx_nodes(), values.len())?;
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument("wave number must be positive".into()));
    }
    let x = mesh.x2().nodes();
    let w = mesh.x2().weights();
    let l = mesh.length();
    Ok((1..=count)
        .map(|n| {
            let kn = kappa * n as f64;
            let (mut s, mut c) = (0.0, 0.0);
            for i in 0..values.len() {
                s += w[i] * values[i] * (kn * x[i]).sin();
                c += w[i] * values[i] * (kn * x[i]).cos();
            }
            let amp = s.hypot(c) / l;
            if amp > 0.0 {
                amp.log10().max(LOG_MODE_FLOOR)
            } else {
                LOG_MODE_FLOOR
            }
        })
        .collect())
}

/// Complete diagnostics record for `state`.
pub fn record(mesh: &Mesh1D2V, state: &State, scheme: SchemeId, flux: MaxwellFlux, step: usize, kappa: f64) -> Result<DiagnosticsRecord> {
    let energies = energies(mesh, state, scheme, flux)?;
    let em = &state.em;
    Ok(DiagnosticsRecord {
        step,
        time: state.time,
        particle_number: particle_number(mesh, &state.f),
        l2_f: l2_norm(mesh, &state.f),
        energies,
        logfm: [
            log_fourier_modes(mesh, &em.e1, 4, kappa)?,
            log_fourier_modes(mesh, &em.e2, 4, kappa)?,
            log_fourier_modes(mesh, &em.b3, 4, kappa)?,
        ],
    })
}

/// Least-squares slope of `ln(values)` against `times`: the exponential growth
/// rate of a positive series.
pub fn growth_rate(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::InvalidArgument("growth fit needs two or more matching samples".into()));
    }
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("growth fit needs positive values".into()));
    }
    let n = times.len() as f64;
    let tm = times.iter().sum::<f64>() / n;
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let ym = ys.iter().sum::<f64>() / n;
    let sxy: f64 = times.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let sxx: f64 = times.iter().map(|t| (t - tm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("growth fit needs distinct times".into()));
    }
    Ok(sxy / sxx)
}
