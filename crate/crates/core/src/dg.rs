//! Batched 1D DG sweep shared by the Vlasov and Maxwell operators.
//!
//! Data along a sweep is laid out as `u[((o * ncell + c) * np + q) * inner + i]`:
//! `o` indexes independent outer line groups, `c` the cell, `q` the node and `i`
//! a contiguous batch of parallel lines that share the cell geometry. Each line
//! carries one advection speed, constant along the line.

use crate::quadrature::NodalBasis1D;

/// Reference-cell operators derived from a nodal basis.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RefOps {
    pub np: usize,
    /// `vol[j * np + q] = w_q * l_j'(xi_q) / w_j`.
    pub vol: Vec<f64>,
    pub lift_l: Vec<f64>,
    pub lift_r: Vec<f64>,
    pub trace_l: Vec<f64>,
    pub trace_r: Vec<f64>,
}

impl RefOps {
    pub fn new(basis: &NodalBasis1D) -> RefOps {
        let np = basis.order();
        let w = basis.weights();
        let mut vol = vec![0.0; np * np];
        for j in 0..np {
            for q in 0..np {
                vol[j * np + q] = w[q] * basis.diff_matrix[q][j] / w[j];
            }
        }
        let trace_l = basis.boundary_values[0].clone();
        let trace_r = basis.boundary_values[1].clone();
        let lift_l = (0..np).map(|j| trace_l[j] / w[j]).collect();
        let lift_r = (0..np).map(|j| trace_r[j] / w[j]).collect();
        RefOps {
            np,
            vol,
            lift_l,
            lift_r,
            trace_l,
            trace_r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Boundary {
    Periodic,
    /// Exterior trace is identically zero at both ends.
    ZeroExterior,
}

/// Numerical flux of `a u`: `sigma = 1` upwind, `0` central, `-1` downwind.
#[inline]
pub(crate) fn flux(a: f64, um: f64, up: f64, sigma: f64) -> f64 {
    0.5 * a * (um + up) + 0.5 * sigma * a.abs() * (um - up)
}

/// Geometry and boundary data of one sweep.
pub(crate) struct Sweep<'a> {
    pub ops: &'a RefOps,
    pub inv_half_width: &'a [f64],
    pub boundary: Boundary,
    pub sigma: f64,
    pub outer: usize,
    pub inner: usize,
}

impl Sweep<'_> {
    pub fn len(&self) -> usize {
        self.outer * self.inv_half_width.len() * self.ops.np * self.inner
    }

    /// `out += scale * L(u)` where `L` is the DG weak form of `-(a u)_x`.
    pub fn apply(&self, speed: &[f64], u: &[f64], out: &mut [f64], scale: f64) {
        let np = self.ops.np;
        let ncell = self.inv_half_width.len();
        let m = self.inner;
        debug_assert_eq!(speed.len(), self.outer * m);
        debug_assert_eq!(u.len(), self.len());
        debug_assert_eq!(out.len(), self.len());
        let line = ncell * np * m;
        let mut left = vec![0.0; ncell * m];
        let mut right = vec![0.0; ncell * m];
        let mut faces = vec![0.0; (ncell + 1) * m];
        let mut acc = vec![0.0; m];
        for o in 0..self.outer {
            let u = &u[o * line..(o + 1) * line];
            let out = &mut out[o * line..(o + 1) * line];
            let a = &speed[o * m..(o + 1) * m];
            left.fill(0.0);
            right.fill(0.0);
            for c in 0..ncell {
                let (l, r) = (&mut left[c * m..(c + 1) * m], &mut right[c * m..(c + 1) * m]);
                for q in 0..np {
                    let row = &u[(c * np + q) * m..(c * np + q + 1) * m];
                    let (tl, tr) = (self.ops.trace_l[q], self.ops.trace_r[q]);
                    for i in 0..m {
                        l[i] += tl * row[i];
                        r[i] += tr * row[i];
                    }
                }
            }
            // Face f separates cell f - 1 (minus side) from cell f (plus side).
            for f in 0..=ncell {
                for i in 0..m {
                    let (um, up) = match self.boundary {
                        Boundary::Periodic => {
                            let cm = if f == 0 { ncell - 1 } else { f - 1 };
                            let cp = if f == ncell { 0 } else { f };
                            (right[cm * m + i], left[cp * m + i])
                        }
                        Boundary::ZeroExterior => {
                            let um = if f == 0 { 0.0 } else { right[(f - 1) * m + i] };
                            let up = if f == ncell { 0.0 } else { left[f * m + i] };
                            (um, up)
                        }
                    };
                    faces[f * m + i] = flux(a[i], um, up, self.sigma);
                }
            }
            for c in 0..ncell {
                let s = scale * self.inv_half_width[c];
                let fl = &faces[c * m..(c + 1) * m];
                let fr = &faces[(c + 1) * m..(c + 2) * m];
                for j in 0..np {
                    acc.fill(0.0);
                    for q in 0..np {
                        let v = self.ops.vol[j * np + q];
                        let row = &u[(c * np + q) * m..(c * np + q + 1) * m];
                        for i in 0..m {
                            acc[i] += v * row[i];
                        }
                    }
                    let (ll, lr) = (self.ops.lift_l[j], self.ops.lift_r[j]);
                    let o_row = &mut out[(c * np + j) * m..(c * np + j + 1) * m];
                    for i in 0..m {
                        o_row[i] += s * (a[i] * acc[i] - fr[i] * lr + fl[i] * ll);
                    }
                }
            }
        }
    }
}
