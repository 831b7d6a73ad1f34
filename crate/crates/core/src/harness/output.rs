//! CSV emission. Reals are written with 17 significant digits.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::DiagnosticsRecord;
use crate::error::Result;
use crate::integrators::State;
use crate::mesh::Mesh1D2V;

pub const DIAGNOSTICS_HEADER: &str =
    "step,t,particle_number,l2_f,K1,K2,E1_energy,E2_energy,B3_energy,total_energy,modified_energy";

pub const FIELD_NAMES: [&str; 3] = ["E1", "E2", "B3"];

/// Formats a real with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Compact label for times and locations in file names.
pub fn label(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

pub fn diagnostics_row(r: &DiagnosticsRecord) -> String {
    let e = &r.energies;
    let modified = e.modified.map(real).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.step,
        real(r.time),
        real(r.particle_number),
        real(r.l2_f),
        real(e.k1),
        real(e.k2),
        real(e.e1_energy),
        real(e.e2_energy),
        real(e.b3_energy),
        real(e.total),
        modified
    )
}

/// Streaming writers for the per-step series of one run.
pub struct SeriesWriter {
    diagnostics: BufWriter<File>,
    logfm: Vec<BufWriter<File>>,
}

impl SeriesWriter {
    pub fn create(dir: &Path) -> Result<SeriesWriter> {
        fs::create_dir_all(dir)?;
        let mut diagnostics = BufWriter::new(File::create(dir.join("diagnostics.csv"))?);
        writeln!(diagnostics, "{DIAGNOSTICS_HEADER}")?;
        let mut logfm = Vec::new();
        for name in FIELD_NAMES {
            let mut w = BufWriter::new(File::create(dir.join(format!("logfm_{name}.csv")))?);
            writeln!(w, "t,mode1,mode2,mode3,mode4")?;
            logfm.push(w);
        }
        Ok(SeriesWriter { diagnostics, logfm })
    }

    pub fn push(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        writeln!(self.diagnostics, "{}", diagnostics_row(r))?;
        for (w, modes) in self.logfm.iter_mut().zip(&r.logfm) {
            let cols: Vec<String> = modes.iter().map(|m| real(*m)).collect();
            writeln!(w, "{},{}", real(r.time), cols.join(","))?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.diagnostics.flush()?;
        for w in &mut self.logfm {
            w.flush()?;
        }
        Ok(())
    }
}

/// Writes `fields_t<t>.csv` with the fields at every x Gauss node.
pub fn write_fields(dir: &Path, mesh: &Mesh1D2V, state: &State, t: f64) -> Result<PathBuf> {
    let path = dir.join(format!("fields_t{}.csv", label(t)));
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "x2,E1,E2,B3")?;
    let em = &state.em;
    for (i, x) in mesh.x2().nodes().iter().enumerate() {
        writeln!(w, "{},{},{},{}", real(*x), real(em.e1[i]), real(em.e2[i]), real(em.b3[i]))?;
    }
    w.flush()?;
    Ok(path)
}

/// Writes `fslice_x<loc>_t<t>.csv`: f interpolated to `x2 = loc` at every velocity node.
pub fn write_fslice(dir: &Path, mesh: &Mesh1D2V, state: &State, loc: f64, t: f64) -> Result<PathBuf> {
    let path = dir.join(format!("fslice_x{}_t{}.csv", label(loc), label(t)));
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "v1,v2,f")?;
    let slice = f_slice(mesh, state, loc);
    let n2 = mesh.v2().nodes().len();
    for (a, v1) in mesh.v1().nodes().iter().enumerate() {
        for (b, v2) in mesh.v2().nodes().iter().enumerate() {
            writeln!(w, "{},{},{}", real(*v1), real(*v2), real(slice[a * n2 + b]))?;
        }
    }
    w.flush()?;
    Ok(path)
}

/// Velocity plane of f evaluated at `x2 = loc` through the cell polynomial.
pub fn f_slice(mesh: &Mesh1D2V, state: &State, loc: f64) -> Vec<f64> {
    let edges = mesh.x2().edges();
    let nc = edges.len() - 1;
    let cell = edges[1..].partition_point(|e| *e < loc).min(nc - 1);
    let (a, b) = (edges[cell], edges[cell + 1]);
    let xi = (2.0 * (loc - a) / (b - a) - 1.0).clamp(-1.0, 1.0);
    let phi = mesh.basis().lagrange_values(xi);
    let np = mesh.np();
    let p = mesh.plane_len();
    let mut out = vec![0.0; p];
    for (l, w) in phi.iter().enumerate() {
        let plane = state.f.plane(cell * np + l);
        for (o, v) in out.iter_mut().zip(plane) {
            *o += w * v;
        }
    }
    out
}
