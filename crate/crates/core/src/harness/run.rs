//! Time stepping with diagnostics and snapshot output.

use std::fs;
use std::path::PathBuf;

use log::{info, warn};

use super::config::RunManifest;
use super::output::{write_fields, write_fslice, SeriesWriter};
use super::presets::weibel_initial_state;
use crate::diagnostics::{record, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::integrators::{cfl_dt, prime_staggered, step, DtPolicy, SchemeConfig, State};
use crate::mesh::Mesh1D2V;

/// Relative slack when deciding that a step lands on a target time.
const TIME_SLACK: f64 = 1e-9;

/// In-memory stepping of one manifest.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub mesh: Mesh1D2V,
    pub cfg: SchemeConfig,
    pub state: State,
    pub steps: usize,
    kappa: f64,
}

impl Simulation {
    /// Physics-run mesh and the preset's initial state.
    pub fn new(manifest: &RunManifest) -> Result<Simulation> {
        manifest.validate()?;
        let mesh = manifest.mesh()?;
        Simulation::on_mesh(manifest, mesh)
    }

    pub fn on_mesh(manifest: &RunManifest, mesh: Mesh1D2V) -> Result<Simulation> {
        let params = manifest.preset.params();
        let state = weibel_initial_state(&params, &mesh)?;
        Simulation::from_state(mesh, manifest.scheme.clone(), state, params.k0)
    }

    /// `kappa` is the base wave number of the log Fourier modes.
    pub fn from_state(mesh: Mesh1D2V, cfg: SchemeConfig, mut state: State, kappa: f64) -> Result<Simulation> {
        cfg.validate()?;
        state.check_shape(&mesh)?;
        let dt0 = match cfg.dt {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Cfl(c) => cfl_dt(&mesh, &state.em, c),
        };
        prime_staggered(&mesh, &cfg, &mut state, dt0);
        Ok(Simulation {
            mesh,
            cfg,
            state,
            steps: 0,
            kappa,
        })
    }

    /// Step size the policy picks now, clipped so the run does not pass `limit`.
    pub fn next_dt(&self, limit: f64) -> f64 {
        let dt = match self.cfg.dt {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Cfl(c) => cfl_dt(&self.mesh, &self.state.em, c),
        };
        let left = limit - self.state.time;
        if left <= dt * (1.0 + TIME_SLACK) {
            left
        } else {
            dt
        }
    }

    pub fn advance(&mut self, dt: f64) -> Result<()> {
        self.state = step(&self.mesh, &self.cfg, &self.state, dt)?;
        self.steps += 1;
        Ok(())
    }

    /// Advances until `t_final`, calling `observe` after every step.
    pub fn run_until(&mut self, t_final: f64, mut observe: impl FnMut(&Simulation) -> Result<()>) -> Result<()> {
        while !self.reached(t_final) {
            let dt = self.next_dt(t_final);
            self.advance(dt)?;
            observe(self)?;
        }
        Ok(())
    }

    pub fn reached(&self, t: f64) -> bool {
        self.state.time >= t - TIME_SLACK * t.abs().max(1.0)
    }

    pub fn record(&self) -> Result<DiagnosticsRecord> {
        record(&self.mesh, &self.state, self.cfg.scheme, self.cfg.maxwell_flux, self.steps, self.kappa)
    }
}

/// Records at step 0, every `cadence` steps and at the final step, without file output.
pub fn run_in_memory(manifest: &RunManifest) -> Result<Vec<DiagnosticsRecord>> {
    let mut sim = Simulation::new(manifest)?;
    let mut out = vec![sim.record()?];
    let t_final = manifest.t_final;
    sim.run_until(t_final, |s| {
        if s.steps % manifest.cadence == 0 || s.reached(t_final) {
            out.push(s.record()?);
        }
        Ok(())
    })?;
    Ok(out)
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: usize,
    pub records: usize,
    pub out_dir: PathBuf,
    pub final_time: f64,
}

/// Runs a manifest, writing `diagnostics.csv`, `logfm_*.csv`, field profiles and
/// f slices to the output directory. On failure the partial series stays on disk
/// and `status.txt` records the error.
pub fn run_simulation(manifest: &RunManifest) -> Result<RunSummary> {
    let dir = manifest.out_dir.clone();
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("status.txt"), "running\n")?;
    let mut sim = Simulation::new(manifest)?;
    let mut series = SeriesWriter::create(&dir)?;
    let result = drive(manifest, &mut sim, &mut series);
    series.flush()?;
    match result {
        Ok(records) => {
            fs::write(dir.join("status.txt"), "completed\n")?;
            info!("run finished: {} steps, t = {}", sim.steps, sim.state.time);
            Ok(RunSummary {
                steps: sim.steps,
                records,
                out_dir: dir,
                final_time: sim.state.time,
            })
        }
        Err(e) => {
            warn!("run aborted at t = {}: {e}", sim.state.time);
            fs::write(
                dir.join("status.txt"),
                format!("aborted at step {} (t = {}): {e}\n", sim.steps, sim.state.time),
            )?;
            Err(e)
        }
    }
}

fn drive(manifest: &RunManifest, sim: &mut Simulation, series: &mut SeriesWriter) -> Result<usize> {
    let dir = &manifest.out_dir;
    let mut snapshots: Vec<f64> = manifest
        .snapshot_times
        .iter()
        .copied()
        .filter(|t| *t <= manifest.t_final)
        .collect();
    snapshots.sort_by(f64::total_cmp);
    snapshots.dedup();
    let mut pending = snapshots.into_iter().peekable();
    let mut emit_snapshots = |sim: &Simulation| -> Result<()> {
        while let Some(&t) = pending.peek() {
            if !sim.reached(t) {
                break;
            }
            write_fields(dir, &sim.mesh, &sim.state, t)?;
            for &x in &manifest.slice_locations {
                write_fslice(dir, &sim.mesh, &sim.state, x, t)?;
            }
            pending.next();
        }
        Ok(())
    };
    series.push(&sim.record()?)?;
    let mut records = 1;
    emit_snapshots(sim)?;
    let t_final = manifest.t_final;
    while !sim.reached(t_final) {
        let dt = sim.next_dt(t_final);
        sim.advance(dt).map_err(|e| match e {
            e @ Error::BlowUp { .. } => e,
            e => e.in_stage(format!("step {}", sim.steps + 1)),
        })?;
        if sim.steps % manifest.cadence == 0 || sim.reached(t_final) {
            series.push(&sim.record()?)?;
            records += 1;
        }
        emit_snapshots(sim)?;
    }
    Ok(records)
}
