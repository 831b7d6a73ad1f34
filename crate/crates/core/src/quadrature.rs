//! Gauss–Legendre rules and Lagrange nodal bases on the reference cell [-1, 1].

use crate::error::{Error, Result};

/// Gauss–Legendre quadrature rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    /// Number of points.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over the physical interval `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&xi, &w)| w * f(mid + half * xi))
            .sum::<f64>()
            * half
    }
}

/// Legendre polynomial P_n(x) and its derivative, by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 2..=n {
        let m = m as f64;
        let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Builds the `order`-point Gauss–Legendre rule by Newton iteration on P_order.
pub fn gauss_rule(order: usize) -> Result<QuadRule> {
    if order == 0 {
        return Err(Error::InvalidArgument("quadrature order must be >= 1".into()));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Roots come in symmetric pairs; compute the non-negative half.
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // The centre node of odd rules is exactly zero.
        let x = if 2 * i + 1 == n { 0.0 } else { x };
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok(QuadRule { nodes, weights })
}

/// Lagrange basis interpolating at the Gauss nodes of a rule.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalBasis1D {
    pub rule: QuadRule,
    /// `diff_matrix[i][j]` is the derivative of the j-th Lagrange polynomial at node i.
    pub diff_matrix: Vec<Vec<f64>>,
    /// Values of each Lagrange polynomial at the reference endpoints -1 and +1.
    pub boundary_values: [Vec<f64>; 2],
    bary: Vec<f64>,
}

/// Constructs the nodal basis on the `order`-point Gauss rule.
pub fn nodal_basis(order: usize) -> Result<NodalBasis1D> {
    let rule = gauss_rule(order)?;
    let x = &rule.nodes;
    let n = x.len();
    let bary: Vec<f64> = (0..n)
        .map(|j| {
            let prod: f64 = (0..n).filter(|&m| m != j).map(|m| x[j] - x[m]).product();
            1.0 / prod
        })
        .collect();
    let mut diff = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let d = bary[j] / bary[i] / (x[i] - x[j]);
                diff[i][j] = d;
                diag -= d;
            }
        }
        diff[i][i] = diag;
    }
    let mut basis = NodalBasis1D {
        rule,
        diff_matrix: diff,
        boundary_values: [Vec::new(), Vec::new()],
        bary,
    };
    basis.boundary_values = [basis.lagrange_values(-1.0), basis.lagrange_values(1.0)];
    Ok(basis)
}

impl NodalBasis1D {
    /// Number of nodes (polynomial degree + 1).
    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    /// Values of all Lagrange polynomials at reference coordinate `xi`.
    pub fn lagrange_values(&self, xi: f64) -> Vec<f64> {
        let x = &self.rule.nodes;
        if let Some(hit) = x.iter().position(|&node| node == xi) {
            let mut out = vec![0.0; x.len()];
            out[hit] = 1.0;
            return out;
        }
        let ell: f64 = x.iter().map(|&node| xi - node).product();
        x.iter()
            .zip(&self.bary)
            .map(|(&node, &b)| ell * b / (xi - node))
            .collect()
    }

    /// Evaluates the interpolant with nodal `values` at reference coordinate `xi`.
    pub fn interpolate(&self, values: &[f64], xi: f64) -> f64 {
        self.lagrange_values(xi)
            .iter()
            .zip(values)
            .map(|(l, v)| l * v)
            .sum()
    }

    /// Row-major `points.len() x order` matrix evaluating the interpolant at `points`.
    pub fn interpolation_matrix(&self, points: &[f64]) -> Vec<f64> {
        points
            .iter()
            .flat_map(|&p| self.lagrange_values(p))
            .collect()
    }

    /// Maps a reference coordinate into the physical cell `[a, b]`.
    pub fn map_to_cell(xi: f64, a: f64, b: f64) -> f64 {
        0.5 * (a + b) + 0.5 * (b - a) * xi
    }
}

/// Collocates `f` at the Gauss nodes mapped into `[a, b]`.
pub fn project_1d(f: impl Fn(f64) -> f64, basis: &NodalBasis1D, a: f64, b: f64) -> Result<Vec<f64>> {
    basis
        .nodes()
        .iter()
        .map(|&xi| {
            let v = f(NodalBasis1D::map_to_cell(xi, a, b));
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite(format!("projection sample on cell [{a}, {b}]")))
            }
        })
        .collect()
}
