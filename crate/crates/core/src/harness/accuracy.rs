//! Accuracy by time reversal: run to T, apply `(f(x,-v), E, -B)`, run to 2T and
//! compare with the reflected initial data.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;

use super::config::{RunManifest, ACCURACY_VELOCITY_BOX};
use super::output::real;
use super::presets::{weibel_initial_state, WeibelParams};
use super::run::Simulation;
use crate::error::{Error, Result};
use crate::integrators::{cfl_dt, DtPolicy, State};
use crate::mesh::Mesh1D2V;
use crate::quadrature::gauss_rule;

/// L2 errors of the four unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldErrors {
    pub f: f64,
    pub e1: f64,
    pub e2: f64,
    pub b3: f64,
}

impl FieldErrors {
    pub const NAMES: [&'static str; 4] = ["f", "E1", "E2", "B3"];

    pub fn as_array(&self) -> [f64; 4] {
        [self.f, self.e1, self.e2, self.b3]
    }
}

/// One line of `convergence.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub mesh: usize,
    pub field: &'static str,
    pub l2_error: f64,
    /// Observed order against the previous row of the same field.
    pub order: Option<f64>,
}

/// Result of one forward-and-back run.
#[derive(Debug, Clone)]
pub struct ReversalRun {
    pub mesh: Mesh1D2V,
    pub dt: f64,
    pub steps_per_leg: usize,
    pub state: State,
    pub errors: FieldErrors,
}

/// Step size for an accuracy run on `n` cells per direction.
///
/// A CFL policy is scaled by `min(dx, dv)^((k-1)/2)` so the time error keeps pace
/// with the spatial error `O(h^(k+1))`; a fixed step is scaled by
/// `(nx / n)^((k+1)/2)` relative to the manifest's own mesh. The result divides
/// `T` into a whole number of steps.
pub fn accuracy_dt(manifest: &RunManifest, mesh: &Mesh1D2V, initial: &State, n: usize, t: f64) -> f64 {
    let k = manifest.k as f64;
    let dt = match manifest.scheme.dt {
        DtPolicy::Cfl(c) => {
            let h = mesh.x2().min_width().min(mesh.v1().min_width()).min(mesh.v2().min_width());
            cfl_dt(mesh, &initial.em, c) * h.powf(0.5 * (k - 1.0))
        }
        DtPolicy::Fixed(dt) => dt * (manifest.nx as f64 / n as f64).powf(0.5 * (k + 1.0)),
    };
    t / (t / dt - 1e-9).ceil().max(1.0)
}

/// Runs `manifest` forward to `T = t_final`, reverses, and runs on to `2T` with
/// `steps` uniform steps per leg.
pub fn reversal_run(manifest: &RunManifest, mesh: Mesh1D2V, steps: usize) -> Result<ReversalRun> {
    if !mesh.velocity_symmetric() {
        return Err(Error::InvalidArgument(
            "time reversal needs a velocity mesh symmetric about zero".into(),
        ));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("reversal needs at least one step per leg".into()));
    }
    let params = manifest.preset.params();
    let t = manifest.t_final;
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("reversal needs t_final > 0".into()));
    }
    let dt = t / steps as f64;
    let mut cfg = manifest.scheme.clone();
    cfg.dt = DtPolicy::Fixed(dt);
    let initial = weibel_initial_state(&params, &mesh)?;
    let mut sim = Simulation::from_state(mesh, cfg, initial, params.k0)?;
    for _ in 0..steps {
        sim.advance(dt)?;
    }
    sim.state = sim.state.reversed();
    for _ in 0..steps {
        sim.advance(dt)?;
    }
    let errors = reflected_initial_errors(&sim.mesh, &params, &sim.state);
    Ok(ReversalRun {
        mesh: sim.mesh,
        dt,
        steps_per_leg: steps,
        state: sim.state,
        errors,
    })
}

/// L2 distance from `(f0(x,-v), 0, 0, -B0)`, integrated with `k+3` Gauss points per
/// direction so the comparison is not limited by nodal quadrature.
pub fn reflected_initial_errors(mesh: &Mesh1D2V, params: &WeibelParams, state: &State) -> FieldErrors {
    let np = mesh.np();
    let rule = gauss_rule(np + 2).expect("order >= 3");
    let interp = mesh.basis().interpolation_matrix(&rule.nodes);
    let nq = rule.nodes.len();
    let cells = |axis: &crate::mesh::Axis| -> Vec<(Vec<f64>, Vec<f64>)> {
        let e = axis.edges();
        (0..e.len() - 1)
            .map(|c| {
                let (a, b) = (e[c], e[c + 1]);
                let x = rule.nodes.iter().map(|xi| 0.5 * (a + b) + 0.5 * (b - a) * xi).collect();
                let w = rule.weights.iter().map(|w| 0.5 * (b - a) * w).collect();
                (x, w)
            })
            .collect()
    };
    let (cx, c1, c2) = (cells(mesh.x2()), cells(mesh.v1()), cells(mesh.v2()));
    let field_err = |u: &[f64], exact: &dyn Fn(f64) -> f64| -> f64 {
        let mut s = 0.0;
        for (ci, (x, w)) in cx.iter().enumerate() {
            for q in 0..nq {
                let uh: f64 = (0..np).map(|l| interp[q * np + l] * u[ci * np + l]).sum();
                s += w[q] * (uh - exact(x[q])).powi(2);
            }
        }
        s.sqrt()
    };
    let e1 = field_err(&state.em.e1, &|_| 0.0);
    let e2 = field_err(&state.em.e2, &|_| 0.0);
    let b3 = field_err(&state.em.b3, &|x| -params.b3_0(x));
    // f is x-independent initially, so the exact values on a velocity cell are shared.
    let n2 = mesh.v2().nodes().len();
    let mut sum = 0.0;
    let mut local = vec![0.0; np * np * np];
    let mut t1 = vec![0.0; nq * np * np];
    let mut t2 = vec![0.0; nq * nq * np];
    let mut t3 = vec![0.0; nq * nq * nq];
    for (ci, (_, wx)) in cx.iter().enumerate() {
        for (j1, (v1, w1)) in c1.iter().enumerate() {
            for (j2, (v2, w2)) in c2.iter().enumerate() {
                for l in 0..np {
                    let plane = state.f.plane(ci * np + l);
                    for a in 0..np {
                        let row = (j1 * np + a) * n2 + j2 * np;
                        local[(l * np + a) * np..(l * np + a + 1) * np].copy_from_slice(&plane[row..row + np]);
                    }
                }
                tensor_interp(&interp, np, nq, &local, &mut t1, &mut t2, &mut t3);
                for qx in 0..nq {
                    for q1 in 0..nq {
                        for q2 in 0..nq {
                            let exact = params.f0(-v1[q1], -v2[q2]);
                            let d = t3[(qx * nq + q1) * nq + q2] - exact;
                            sum += wx[qx] * w1[q1] * w2[q2] * d * d;
                        }
                    }
                }
            }
        }
    }
    FieldErrors {
        f: sum.sqrt(),
        e1,
        e2,
        b3,
    }
}

/// Evaluates a `np^3` nodal block at the `nq^3` tensor points.
fn tensor_interp(m: &[f64], np: usize, nq: usize, u: &[f64], t1: &mut [f64], t2: &mut [f64], t3: &mut [f64]) {
    // Contract the x index.
    for q in 0..nq {
        for r in 0..np * np {
            t1[q * np * np + r] = (0..np).map(|l| m[q * np + l] * u[l * np * np + r]).sum();
        }
    }
    // v1 index.
    for qx in 0..nq {
        for q in 0..nq {
            for b in 0..np {
                t2[(qx * nq + q) * np + b] = (0..np).map(|a| m[q * np + a] * t1[(qx * np + a) * np + b]).sum();
            }
        }
    }
    // v2 index.
    for r in 0..nq * nq {
        for q in 0..nq {
            t3[r * nq + q] = (0..np).map(|b| m[q * np + b] * t2[r * np + b]).sum();
        }
    }
}

/// Orders between consecutive entries: `log(e_i / e_{i+1}) / log(s_{i+1} / s_i)`.
pub fn observed_orders(sizes: &[usize], errors: &[f64]) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for i in 1..errors.len() {
        out.push(Some((errors[i - 1] / errors[i]).ln() / (sizes[i] as f64 / sizes[i - 1] as f64).ln()));
    }
    out
}

fn rows(sizes: &[usize], errs: &[FieldErrors]) -> Vec<ConvergenceRow> {
    let mut out = Vec::new();
    for (fi, name) in FieldErrors::NAMES.iter().enumerate() {
        let e: Vec<f64> = errs.iter().map(|x| x.as_array()[fi]).collect();
        for ((n, err), order) in sizes.iter().zip(&e).zip(observed_orders(sizes, &e)) {
            out.push(ConvergenceRow {
                mesh: *n,
                field: name,
                l2_error: *err,
                order,
            });
        }
    }
    out
}

/// Reversal errors on `N^3` meshes for each `N` in `meshes`, with the velocity box
/// defaulting to `[-1.2, 1.2]^2`.
pub fn reversal_accuracy_study(manifest: &RunManifest, meshes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    manifest.validate()?;
    if meshes.len() < 2 {
        return Err(Error::InvalidArgument("an accuracy study needs at least two meshes".into()));
    }
    let params = manifest.preset.params();
    let mut errs = Vec::new();
    for &n in meshes {
        let mesh = manifest.mesh_with((n, n, n), ACCURACY_VELOCITY_BOX)?;
        let initial = weibel_initial_state(&params, &mesh)?;
        let dt = accuracy_dt(manifest, &mesh, &initial, n, manifest.t_final);
        let steps = (manifest.t_final / dt).round() as usize;
        let run = reversal_run(manifest, mesh, steps).map_err(|e| e.in_stage(format!("mesh {n}^3")))?;
        info!("mesh {n}^3: dt = {dt}, f error {:e}", run.errors.f);
        errs.push(run.errors);
    }
    Ok(rows(meshes, &errs))
}

/// Temporal convergence on the manifest's fixed mesh with `T / n` steps for each
/// `n` in `divisions`.
#[derive(Debug, Clone)]
pub struct TimeRefinement {
    pub divisions: Vec<usize>,
    /// Errors against the reflected initial data; these include the spatial error.
    pub exact: Vec<FieldErrors>,
    /// Nodal L2 distance between the final states of consecutive divisions.
    pub successive: Vec<FieldErrors>,
}

impl TimeRefinement {
    /// Orders of the successive differences, one per consecutive pair of differences.
    pub fn orders(&self) -> Vec<[f64; 4]> {
        (1..self.successive.len())
            .map(|i| {
                let r = self.divisions[i + 1] as f64 / self.divisions[i] as f64;
                let (a, b) = (self.successive[i - 1].as_array(), self.successive[i].as_array());
                [0, 1, 2, 3].map(|j| (a[j] / b[j]).ln() / r.ln())
            })
            .collect()
    }
}

pub fn time_refinement_study(manifest: &RunManifest, divisions: &[usize]) -> Result<TimeRefinement> {
    manifest.validate()?;
    if divisions.len() < 3 {
        return Err(Error::InvalidArgument("a time refinement study needs at least three step counts".into()));
    }
    let mut exact = Vec::new();
    let mut finals: Vec<(Mesh1D2V, State)> = Vec::new();
    for &n in divisions {
        let mesh = manifest.mesh_with((manifest.nx, manifest.nv1, manifest.nv2), ACCURACY_VELOCITY_BOX)?;
        let run = reversal_run(manifest, mesh, n).map_err(|e| e.in_stage(format!("T/{n}")))?;
        info!("T/{n}: f error {:e}", run.errors.f);
        exact.push(run.errors);
        finals.push((run.mesh, run.state));
    }
    let successive = finals
        .windows(2)
        .map(|w| nodal_distance(&w[0].0, &w[0].1, &w[1].1))
        .collect();
    Ok(TimeRefinement {
        divisions: divisions.to_vec(),
        exact,
        successive,
    })
}

/// Nodal-quadrature L2 distance between two states on the same mesh.
pub fn nodal_distance(mesh: &Mesh1D2V, a: &State, b: &State) -> FieldErrors {
    let wx = mesh.x2().weights();
    let (w1, w2) = (mesh.v1().weights(), mesh.v2().weights());
    let n2 = w2.len();
    let p = mesh.plane_len();
    let mut f = 0.0;
    for (ix, wxi) in wx.iter().enumerate() {
        for (a1, w1a) in w1.iter().enumerate() {
            for (b1, w2b) in w2.iter().enumerate() {
                let i = ix * p + a1 * n2 + b1;
                f += wxi * w1a * w2b * (a.f.values()[i] - b.f.values()[i]).powi(2);
            }
        }
    }
    let d = |u: &[f64], v: &[f64]| wx.iter().zip(u).zip(v).map(|((w, x), y)| w * (x - y).powi(2)).sum::<f64>().sqrt();
    FieldErrors {
        f: f.sqrt(),
        e1: d(&a.em.e1, &b.em.e1),
        e2: d(&a.em.e2, &b.em.e2),
        b3: d(&a.em.b3, &b.em.b3),
    }
}

/// Writes `convergence.csv` (mesh,field,l2_error,order).
pub fn write_convergence(dir: &Path, rows: &[ConvergenceRow]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("convergence.csv");
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "mesh,field,l2_error,order")?;
    for r in rows {
        let order = r.order.map(real).unwrap_or_default();
        writeln!(w, "{},{},{},{}", r.mesh, r.field, real(r.l2_error), order)?;
    }
    w.flush()?;
    Ok(path)
}
