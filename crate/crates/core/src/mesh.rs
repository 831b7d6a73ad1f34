//! Cartesian phase-space mesh: periodic x2, truncated velocity box in (v1, v2).

use crate::dg::RefOps;
use crate::error::{Error, Result};
use crate::quadrature::{nodal_basis, NodalBasis1D};

/// Coordinate direction of the 1D2V phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    X2,
    V1,
    V2,
}

/// One axis of the tensor mesh with its Gauss nodes cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    edges: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    inv_half_width: Vec<f64>,
}

impl Axis {
    fn new(edges: Vec<f64>, basis: &NodalBasis1D, name: &str) -> Result<Axis> {
        if edges.len() < 2 {
            return Err(Error::InvalidArgument(format!("{name}: need at least one cell")));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(format!("{name}: edges must be finite and strictly increasing")));
        }
        let n = basis.order();
        let mut nodes = Vec::with_capacity((edges.len() - 1) * n);
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut inv_half_width = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            for (&xi, &wq) in basis.nodes().iter().zip(basis.weights()) {
                nodes.push(NodalBasis1D::map_to_cell(xi, a, b));
                weights.push(0.5 * (b - a) * wq);
            }
            inv_half_width.push(2.0 / (b - a));
        }
        Ok(Axis {
            edges,
            nodes,
            weights,
            inv_half_width,
        })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn n_cells(&self) -> usize {
        self.edges.len() - 1
    }

    /// Physical coordinates of all nodes, cell-major.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights of all nodes, already scaled by the cell Jacobian.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `2 / h` per cell.
    pub fn inv_half_width(&self) -> &[f64] {
        &self.inv_half_width
    }

    pub fn width(&self, cell: usize) -> f64 {
        self.edges[cell + 1] - self.edges[cell]
    }

    pub fn min_width(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.width(c)).fold(f64::INFINITY, f64::min)
    }

    pub fn lower(&self) -> f64 {
        self.edges[0]
    }

    pub fn upper(&self) -> f64 {
        self.edges[self.edges.len() - 1]
    }

    pub fn measure(&self) -> f64 {
        self.upper() - self.lower()
    }

    /// True if the node set is mirror-symmetric about zero (to rounding).
    pub fn is_symmetric(&self) -> bool {
        let n = self.nodes.len();
        let scale = self.upper().abs().max(self.lower().abs());
        (0..n).all(|i| (self.nodes[i] + self.nodes[n - 1 - i]).abs() <= 1e-13 * scale)
    }
}

/// Tensor-product mesh of [0, L] x [-V1c, V1c] x [-V2c, V2c] with Q^k nodal cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D2V {
    pub k: usize,
    basis: NodalBasis1D,
    pub(crate) ops: RefOps,
    x2: Axis,
    v1: Axis,
    v2: Axis,
}

fn uniform_edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Uniform edges on [-v, v], built so that the mirror of every edge is exact.
fn symmetric_edges(v: f64, n: usize) -> Vec<f64> {
    let mut e: Vec<f64> = (0..=n).map(|i| -v + 2.0 * v * i as f64 / n as f64).collect();
    for i in 0..=n / 2 {
        e[n - i] = -e[i];
    }
    if n % 2 == 0 {
        e[n / 2] = 0.0;
    }
    e
}

/// Builds a uniform mesh.
pub fn build_mesh(nx: usize, nv1: usize, nv2: usize, l: f64, v1c: f64, v2c: f64, k: usize) -> Result<Mesh1D2V> {
    if nx == 0 || nv1 == 0 || nv2 == 0 {
        return Err(Error::InvalidArgument("cell counts must be >= 1".into()));
    }
    if !(l > 0.0 && v1c > 0.0 && v2c > 0.0) || !(l.is_finite() && v1c.is_finite() && v2c.is_finite()) {
        return Err(Error::InvalidArgument("domain lengths must be positive and finite".into()));
    }
    Mesh1D2V::from_edges(
        uniform_edges(0.0, l, nx),
        symmetric_edges(v1c, nv1),
        symmetric_edges(v2c, nv2),
        k,
    )
}

impl Mesh1D2V {
    /// Builds a mesh from explicit (possibly nonuniform) edge arrays.
    pub fn from_edges(x2: Vec<f64>, v1: Vec<f64>, v2: Vec<f64>, k: usize) -> Result<Mesh1D2V> {
        if k == 0 {
            return Err(Error::InvalidArgument("polynomial degree k must be >= 1".into()));
        }
        let basis = nodal_basis(k + 1)?;
        Ok(Mesh1D2V {
            k,
            ops: RefOps::new(&basis),
            x2: Axis::new(x2, &basis, "x2")?,
            v1: Axis::new(v1, &basis, "v1")?,
            v2: Axis::new(v2, &basis, "v2")?,
            basis,
        })
    }

    pub fn basis(&self) -> &NodalBasis1D {
        &self.basis
    }

    /// Nodes per cell per direction (k + 1).
    pub fn np(&self) -> usize {
        self.k + 1
    }

    pub fn axis(&self, dir: Direction) -> &Axis {
        match dir {
            Direction::X2 => &self.x2,
            Direction::V1 => &self.v1,
            Direction::V2 => &self.v2,
        }
    }

    pub fn x2(&self) -> &Axis {
        &self.x2
    }

    pub fn v1(&self) -> &Axis {
        &self.v1
    }

    pub fn v2(&self) -> &Axis {
        &self.v2
    }

    /// Spatial period L.
    pub fn length(&self) -> f64 {
        self.x2.measure()
    }

    /// Number of x2 nodes, N_x (k + 1).
    pub fn nx_nodes(&self) -> usize {
        self.x2.nodes.len()
    }

    /// Number of velocity nodes in one x-plane.
    pub fn plane_len(&self) -> usize {
        self.v1.nodes.len() * self.v2.nodes.len()
    }

    /// Total number of phase-space nodes.
    pub fn f_len(&self) -> usize {
        self.nx_nodes() * self.plane_len()
    }

    /// Coordinate of local node `node` of cell `cell` along `dir`.
    pub fn physical_node(&self, cell: usize, node: usize, dir: Direction) -> Result<f64> {
        let axis = self.axis(dir);
        if cell >= axis.n_cells() || node >= self.np() {
            return Err(Error::InvalidArgument(format!(
                "node ({cell}, {node}) out of range along {dir:?}"
            )));
        }
        Ok(axis.nodes[cell * self.np() + node])
    }

    /// Index of the x2 cell `offset` cells away, wrapping periodically.
    pub fn x_neighbor(&self, cell: usize, offset: isize) -> usize {
        let n = self.x2.n_cells() as isize;
        (cell as isize + offset).rem_euclid(n) as usize
    }

    /// Phase-space measure L * 2V1c * 2V2c.
    pub fn measure(&self) -> f64 {
        self.x2.measure() * self.v1.measure() * self.v2.measure()
    }

    /// True if both velocity node sets are symmetric about zero.
    pub fn velocity_symmetric(&self) -> bool {
        self.v1.is_symmetric() && self.v2.is_symmetric()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn uniform_edges_and_widths() {
        let m = build_mesh(2, 4, 4, 1.0, 1.2, 1.2, 1).unwrap();
        assert_eq!(m.x2().edges(), &[0.0, 0.5, 1.0]);
        for c in 0..4 {
            assert!((m.v1().width(c) - 0.6).abs() < 1e-15);
        }
        assert_eq!(m.v1().lower(), -1.2);
        assert_eq!(m.v1().upper(), 1.2);
    }

    #[test]
    fn weibel_period() {
        let k0 = 0.2;
        let m = build_mesh(8, 4, 4, 2.0 * PI / k0, 1.5, 1.5, 2).unwrap();
        assert!((m.length() - 10.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_mesh(0, 4, 4, 1.0, 1.0, 1.0, 1).is_err());
        assert!(build_mesh(2, 4, 4, -1.0, 1.0, 1.0, 1).is_err());
        assert!(build_mesh(2, 4, 4, 1.0, 0.0, 1.0, 1).is_err());
        assert!(build_mesh(2, 4, 4, 1.0, 1.0, 1.0, 0).is_err());
        assert!(Mesh1D2V::from_edges(vec![0.0, 0.0, 1.0], vec![-1.0, 1.0], vec![-1.0, 1.0], 1).is_err());
    }

    #[test]
    fn physical_nodes() {
        let m = Mesh1D2V::from_edges(vec![0.0, 1.0], vec![-1.0, 1.0], vec![-1.0, 1.0], 1).unwrap();
        let m0 = Mesh1D2V::from_edges(vec![0.0, PI], vec![-1.0, 1.0], vec![-1.0, 1.0], 1).unwrap();
        assert!((m0.physical_node(0, 1, Direction::X2).unwrap() - PI * (1.0 + 1.0 / 3f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!(m.physical_node(1, 0, Direction::X2).is_err());
        assert!(m.physical_node(0, 2, Direction::X2).is_err());
        let big = build_mesh(5, 6, 4, 3.0, 1.0, 2.0, 3).unwrap();
        for dir in [Direction::X2, Direction::V1, Direction::V2] {
            let ax = big.axis(dir);
            for c in 0..ax.n_cells() {
                for l in 0..big.np() {
                    let x = big.physical_node(c, l, dir).unwrap();
                    assert!(x > ax.edges()[c] && x < ax.edges()[c + 1]);
                }
            }
        }
    }

    #[test]
    fn single_point_rule_centre() {
        // k = 0 is not allowed for the mesh, so check the reference map directly.
        assert_eq!(NodalBasis1D::map_to_cell(0.0, 0.0, 1.0), 0.5);
    }

    #[test]
    fn measures_and_wrap() {
        let m = build_mesh(7, 6, 10, 5.0, 1.3, 0.7, 2).unwrap();
        let sum: f64 = (0..7).map(|c| m.x2().width(c)).sum();
        assert!((sum - 5.0).abs() < 1e-13 * 5.0);
        let wsum: f64 = m.v2().weights().iter().sum();
        assert!((wsum - 1.4).abs() < 1e-13);
        for c in 0..7 {
            assert_eq!(m.x_neighbor(c, 7), c);
            assert_eq!(m.x_neighbor(m.x_neighbor(c, 1), -1), c);
        }
        assert_eq!(m.x_neighbor(6, 1), 0);
        assert!(m.velocity_symmetric());
    }
}
