//! Distribution function storage, DG transport operators and velocity moments.
//!
//! `f` is stored node-wise with index `(X * nv1 + V1) * nv2 + V2`, where `X`, `V1`,
//! `V2` are global node indices (`cell * (k + 1) + local`). Each x node owns a
//! contiguous velocity plane.

use rayon::prelude::*;

use crate::dg::{Boundary, Sweep};
use crate::error::{check_len, Error, Result};
use crate::mesh::Mesh1D2V;

/// Interface flux for the Vlasov transport terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlasovFlux {
    Upwind,
    Central,
    /// Only produced by [`VlasovFlux::for_step`] on negative time steps.
    Downwind,
}

impl VlasovFlux {
    pub fn name(self) -> &'static str {
        match self {
            VlasovFlux::Upwind => "upwind",
            VlasovFlux::Central => "central",
            VlasovFlux::Downwind => "downwind",
        }
    }

    /// Parses a user-selectable flux; `downwind` is not accepted.
    pub fn parse(s: &str) -> Option<VlasovFlux> {
        match s {
            "upwind" => Some(VlasovFlux::Upwind),
            "central" => Some(VlasovFlux::Central),
            _ => None,
        }
    }

    /// Flux to use on a step of size `dt`: upwinding flips to downwinding when
    /// time runs backwards.
    pub fn for_step(self, dt: f64) -> VlasovFlux {
        match (self, dt < 0.0) {
            (VlasovFlux::Upwind, true) => VlasovFlux::Downwind,
            (VlasovFlux::Downwind, true) => VlasovFlux::Upwind,
            (f, _) => f,
        }
    }

    pub(crate) fn sigma(self) -> f64 {
        match self {
            VlasovFlux::Upwind => 1.0,
            VlasovFlux::Central => 0.0,
            VlasovFlux::Downwind => -1.0,
        }
    }
}

/// Nodal values of f on the phase-space mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    values: Vec<f64>,
    nx: usize,
    nv1: usize,
    nv2: usize,
}

impl DistributionField {
    pub fn zeros(mesh: &Mesh1D2V) -> DistributionField {
        DistributionField {
            values: vec![0.0; mesh.f_len()],
            nx: mesh.nx_nodes(),
            nv1: mesh.v1().nodes().len(),
            nv2: mesh.v2().nodes().len(),
        }
    }

    /// Collocates `f(x2, v1, v2)` at every phase-space node.
    pub fn from_fn(mesh: &Mesh1D2V, f: impl Fn(f64, f64, f64) -> f64 + Sync) -> Result<DistributionField> {
        let mut out = DistributionField::zeros(mesh);
        let (v1, v2) = (mesh.v1().nodes(), mesh.v2().nodes());
        let x = mesh.x2().nodes();
        let p = out.plane_len();
        out.values.par_chunks_mut(p).enumerate().for_each(|(ix, plane)| {
            for (a, &v1a) in v1.iter().enumerate() {
                for (b, &v2b) in v2.iter().enumerate() {
                    plane[a * v2.len() + b] = f(x[ix], v1a, v2b);
                }
            }
        });
        if let Some(pos) = out.values.iter().position(|v| !v.is_finite()) {
            let (ix, a, b) = out.split_index(pos);
            return Err(Error::NonFinite(format!(
                "initial f at node (x={}, v1={}, v2={})",
                x[ix], v1[a], v2[b]
            )));
        }
        Ok(out)
    }

    pub fn from_values(mesh: &Mesh1D2V, values: Vec<f64>) -> Result<DistributionField> {
        check_len("distribution values", mesh.f_len(), values.len())?;
        let mut f = DistributionField::zeros(mesh);
        f.values = values;
        Ok(f)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Node counts `(x, v1, v2)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.nx, self.nv1, self.nv2)
    }

    pub fn plane_len(&self) -> usize {
        self.nv1 * self.nv2
    }

    pub fn index(&self, ix: usize, a: usize, b: usize) -> usize {
        (ix * self.nv1 + a) * self.nv2 + b
    }

    fn split_index(&self, pos: usize) -> (usize, usize, usize) {
        (pos / self.plane_len(), (pos / self.nv2) % self.nv1, pos % self.nv2)
    }

    pub fn get(&self, ix: usize, a: usize, b: usize) -> f64 {
        self.values[self.index(ix, a, b)]
    }

    /// Velocity plane at x node `ix`.
    pub fn plane(&self, ix: usize) -> &[f64] {
        let p = self.plane_len();
        &self.values[ix * p..(ix + 1) * p]
    }

    pub fn check_shape(&self, mesh: &Mesh1D2V) -> Result<()> {
        check_len("distribution x nodes", mesh.nx_nodes(), self.nx)?;
        check_len("distribution v1 nodes", mesh.v1().nodes().len(), self.nv1)?;
        check_len("distribution v2 nodes", mesh.v2().nodes().len(), self.nv2)?;
        check_len("distribution values", mesh.f_len(), self.values.len())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `f(x, -v)` by reversing both velocity node indices; exact on symmetric meshes.
    pub fn reflect_velocity(&self) -> DistributionField {
        let mut out = self.clone();
        for ix in 0..self.nx {
            for a in 0..self.nv1 {
                for b in 0..self.nv2 {
                    out.values[self.index(ix, a, b)] = self.get(ix, self.nv1 - 1 - a, self.nv2 - 1 - b);
                }
            }
        }
        out
    }
}

/// Velocity-space advection coefficients at one x node.
///
/// The v1-coefficient may depend on v2 only and the v2-coefficient on v1 only,
/// which is the structure of the Lorentz force `(E1 + v2 B3, E2 - v1 B3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityCoefficients {
    /// Coefficient of `f_v1`, one value per v2 node.
    pub a1: Vec<f64>,
    /// Coefficient of `f_v2`, one value per v1 node.
    pub a2: Vec<f64>,
}

impl VelocityCoefficients {
    pub fn lorentz(mesh: &Mesh1D2V, e1: f64, e2: f64, b3: f64) -> VelocityCoefficients {
        VelocityCoefficients {
            a1: mesh.v2().nodes().iter().map(|v2| e1 + v2 * b3).collect(),
            a2: mesh.v1().nodes().iter().map(|v1| e2 - v1 * b3).collect(),
        }
    }

    /// Magnetic rotation only: `(v2 B, -v1 B)`.
    pub fn rotation(mesh: &Mesh1D2V, b: f64) -> VelocityCoefficients {
        VelocityCoefficients::lorentz(mesh, 0.0, 0.0, b)
    }
}

/// Charge and current densities at every x node.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub rho: Vec<f64>,
    pub j1: Vec<f64>,
    pub j2: Vec<f64>,
    pub rho_ion: f64,
}

/// `(rho, j1, j2)` of one velocity plane by tensor Gauss quadrature.
pub(crate) fn plane_moments(mesh: &Mesh1D2V, plane: &[f64]) -> (f64, f64, f64) {
    let (w1, w2) = (mesh.v1().weights(), mesh.v2().weights());
    let (v1, v2) = (mesh.v1().nodes(), mesh.v2().nodes());
    let n2 = w2.len();
    let (mut rho, mut j1, mut j2) = (0.0, 0.0, 0.0);
    for a in 0..w1.len() {
        let row = &plane[a * n2..(a + 1) * n2];
        let (mut r, mut s2) = (0.0, 0.0);
        for b in 0..n2 {
            let wf = w2[b] * row[b];
            r += wf;
            s2 += wf * v2[b];
        }
        rho += w1[a] * r;
        j1 += w1[a] * v1[a] * r;
        j2 += w1[a] * s2;
    }
    (rho, j1, j2)
}

/// Currents `(j1, j2)` at every x node.
pub(crate) fn currents(mesh: &Mesh1D2V, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = mesh.plane_len();
    f.par_chunks(p)
        .map(|plane| {
            let (_, j1, j2) = plane_moments(mesh, plane);
            (j1, j2)
        })
        .unzip()
}

/// Velocity moments of `f` at every x node.
pub fn compute_moments(mesh: &Mesh1D2V, f: &DistributionField) -> Result<Moments> {
    f.check_shape(mesh)?;
    let p = mesh.plane_len();
    let m: Vec<(f64, f64, f64)> = f.values().par_chunks(p).map(|plane| plane_moments(mesh, plane)).collect();
    Ok(Moments {
        rho: m.iter().map(|t| t.0).collect(),
        j1: m.iter().map(|t| t.1).collect(),
        j2: m.iter().map(|t| t.2).collect(),
        rho_ion: 1.0,
    })
}

fn x_sweep(mesh: &Mesh1D2V, sigma: f64, inner: usize) -> Sweep<'_> {
    Sweep {
        ops: &mesh.ops,
        inv_half_width: mesh.x2().inv_half_width(),
        boundary: Boundary::Periodic,
        sigma,
        outer: 1,
        inner,
    }
}

/// x2-transport of one line at fixed velocity node with speed `speed`.
pub fn transport_x_rhs(mesh: &Mesh1D2V, slice: &[f64], speed: f64, flux: VlasovFlux) -> Result<Vec<f64>> {
    check_len("x slice", mesh.nx_nodes(), slice.len())?;
    if !speed.is_finite() {
        return Err(Error::NonFinite("transport speed".into()));
    }
    let mut out = vec![0.0; slice.len()];
    x_sweep(mesh, flux.sigma(), 1).apply(&[speed], slice, &mut out, 1.0);
    Ok(out)
}

/// `out += scale * (-v2 f_x2)` on a single x line.
pub(crate) fn transport_x_line_acc(mesh: &Mesh1D2V, slice: &[f64], speed: f64, sigma: f64, scale: f64, out: &mut [f64]) {
    x_sweep(mesh, sigma, 1).apply(&[speed], slice, out, scale);
}

/// `out += scale * (-v2 f_x2)` over the whole phase space.
pub(crate) fn transport_x_acc(mesh: &Mesh1D2V, f: &[f64], sigma: f64, scale: f64, out: &mut [f64]) {
    let p = mesh.plane_len();
    let n2 = mesh.v2().nodes().len();
    let speeds: Vec<f64> = (0..p).map(|i| mesh.v2().nodes()[i % n2]).collect();
    x_sweep(mesh, sigma, p).apply(&speeds, f, out, scale);
}

/// `out += scale * (-(a1 f)_v1 - (a2 f)_v2)` on one velocity plane.
pub(crate) fn transport_v_acc(
    mesh: &Mesh1D2V,
    plane: &[f64],
    coeffs: &VelocityCoefficients,
    sigma: f64,
    scale: f64,
    out: &mut [f64],
) {
    let n1 = mesh.v1().nodes().len();
    let n2 = mesh.v2().nodes().len();
    Sweep {
        ops: &mesh.ops,
        inv_half_width: mesh.v1().inv_half_width(),
        boundary: Boundary::ZeroExterior,
        sigma,
        outer: 1,
        inner: n2,
    }
    .apply(&coeffs.a1, plane, out, scale);
    Sweep {
        ops: &mesh.ops,
        inv_half_width: mesh.v2().inv_half_width(),
        boundary: Boundary::ZeroExterior,
        sigma,
        outer: n1,
        inner: 1,
    }
    .apply(&coeffs.a2, plane, out, scale);
}

/// Velocity transport of one plane with coefficients `(a1, a2)`.
pub fn transport_v_rhs(mesh: &Mesh1D2V, plane: &[f64], coeffs: &VelocityCoefficients, flux: VlasovFlux) -> Result<Vec<f64>> {
    check_len("velocity plane", mesh.plane_len(), plane.len())?;
    check_len("a1 coefficients", mesh.v2().nodes().len(), coeffs.a1.len())?;
    check_len("a2 coefficients", mesh.v1().nodes().len(), coeffs.a2.len())?;
    let mut out = vec![0.0; plane.len()];
    transport_v_acc(mesh, plane, coeffs, flux.sigma(), 1.0, &mut out);
    Ok(out)
}

/// `out += scale * L(f; E, B)`, the full Vlasov operator with nodal fields.
pub(crate) fn vlasov_acc(
    mesh: &Mesh1D2V,
    f: &[f64],
    e1: &[f64],
    e2: &[f64],
    b3: &[f64],
    sigma: f64,
    scale: f64,
    out: &mut [f64],
) {
    transport_x_acc(mesh, f, sigma, scale, out);
    let p = mesh.plane_len();
    out.par_chunks_mut(p)
        .zip(f.par_chunks(p))
        .enumerate()
        .for_each(|(ix, (o, plane))| {
            let c = VelocityCoefficients::lorentz(mesh, e1[ix], e2[ix], b3[ix]);
            transport_v_acc(mesh, plane, &c, sigma, scale, o);
        });
}

/// Time derivative of f under the full Vlasov operator with nodal fields.
pub fn vlasov_rhs(
    mesh: &Mesh1D2V,
    f: &DistributionField,
    e1: &[f64],
    e2: &[f64],
    b3: &[f64],
    flux: VlasovFlux,
) -> Result<Vec<f64>> {
    f.check_shape(mesh)?;
    let n = mesh.nx_nodes();
    check_len("E1", n, e1.len())?;
    check_len("E2", n, e2.len())?;
    check_len("B3", n, b3.len())?;
    let mut out = vec![0.0; mesh.f_len()];
    vlasov_acc(mesh, f.values(), e1, e2, b3, flux.sigma(), 1.0, &mut out);
    Ok(out)
}
