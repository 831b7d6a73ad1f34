//! Restarted GMRES, Jacobian-free Newton–Krylov, and a small dense LU used as an oracle.

use crate::error::{Error, Result};

/// Restarted GMRES settings. Convergence: `||b - A x|| <= max(rtol ||b||, atol)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    pub restart: usize,
    pub max_iterations: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        KrylovConfig {
            restart: 30,
            max_iterations: 200,
            rtol: 1e-13,
            atol: f64::MIN_POSITIVE,
        }
    }
}

impl KrylovConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restart == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidArgument("GMRES restart and max_iterations must be >= 1".into()));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidArgument("GMRES tolerances must be > 0".into()));
        }
        Ok(())
    }
}

/// Outcome of a GMRES solve.
#[derive(Debug, Clone, Default)]
pub struct GmresReport {
    /// Number of Krylov iterations (operator applications inside Arnoldi).
    pub iterations: usize,
    /// True residual norm of the returned iterate.
    pub residual: f64,
    /// Estimated residual after each Krylov iteration.
    pub history: Vec<f64>,
    /// Index into `history` where each restart cycle begins.
    pub cycle_starts: Vec<usize>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Solves `A x = b` with unpreconditioned restarted GMRES.
pub fn gmres<A>(apply: A, b: &[f64], x0: &[f64], cfg: &KrylovConfig) -> Result<(Vec<f64>, GmresReport)>
where
    A: FnMut(&[f64], &mut [f64]),
{
    gmres_right_preconditioned(apply, |v: &[f64], out: &mut [f64]| out.copy_from_slice(v), b, x0, cfg)
}

/// Restarted GMRES on `A M^{-1} y = b`, `x = M^{-1} y`; `precond` applies `M^{-1}`.
pub fn gmres_right_preconditioned<A, P>(
    mut apply: A,
    mut precond: P,
    b: &[f64],
    x0: &[f64],
    cfg: &KrylovConfig,
) -> Result<(Vec<f64>, GmresReport)>
where
    A: FnMut(&[f64], &mut [f64]),
    P: FnMut(&[f64], &mut [f64]),
{
    cfg.validate()?;
    let n = b.len();
    crate::error::check_len("gmres initial guess", n, x0.len())?;
    let target = (cfg.rtol * norm2(b)).max(cfg.atol);
    let mut x = x0.to_vec();
    let mut report = GmresReport::default();
    let mut ax = vec![0.0; n];
    let mut r = vec![0.0; n];
    let residual = |x: &[f64], ax: &mut Vec<f64>, r: &mut Vec<f64>, apply: &mut A| {
        apply(x, ax);
        for i in 0..n {
            r[i] = b[i] - ax[i];
        }
        norm2(r)
    };
    let mut beta = residual(&x, &mut ax, &mut r, &mut apply);
    report.residual = beta;
    if !beta.is_finite() {
        return Err(Error::NonFinite("GMRES initial residual".into()));
    }
    if beta <= target || n == 0 {
        return Ok((x, report));
    }
    let m = cfg.restart.min(n.max(1));
    let mut v: Vec<Vec<f64>> = vec![vec![0.0; n]; m + 1];
    let mut h = vec![vec![0.0; m]; m + 1];
    let (mut cs, mut sn, mut g) = (vec![0.0; m], vec![0.0; m], vec![0.0; m + 1]);
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    loop {
        report.cycle_starts.push(report.history.len());
        for i in 0..n {
            v[0][i] = r[i] / beta;
        }
        g.fill(0.0);
        g[0] = beta;
        let mut used = 0;
        for j in 0..m {
            if report.iterations >= cfg.max_iterations {
                break;
            }
            precond(&v[j], &mut z);
            apply(&z, &mut w);
            report.iterations += 1;
            let w_before = norm2(&w);
            for i in 0..=j {
                let hij = dot(&w, &v[i]);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(&v[i]) {
                    *wk -= hij * vk;
                }
            }
            let hn = norm2(&w);
            h[j + 1][j] = hn;
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = h[j][j].hypot(h[j + 1][j]);
            if denom == 0.0 || !denom.is_finite() {
                return Err(Error::NonFinite("GMRES Arnoldi step".into()));
            }
            cs[j] = h[j][j] / denom;
            sn[j] = h[j + 1][j] / denom;
            h[j][j] = denom;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            used = j + 1;
            let est = g[j + 1].abs();
            report.history.push(est);
            let breakdown = hn <= 1e-15 * w_before || hn == 0.0;
            if est <= target || breakdown {
                break;
            }
            for i in 0..n {
                v[j + 1][i] = w[i] / hn;
            }
        }
        // Back substitution on the triangularised Hessenberg matrix.
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let s: f64 = (i + 1..used).map(|k| h[i][k] * y[k]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        w.fill(0.0);
        for (i, yi) in y.iter().enumerate() {
            for (wk, vk) in w.iter_mut().zip(&v[i]) {
                *wk += yi * vk;
            }
        }
        precond(&w, &mut z);
        for (xk, zk) in x.iter_mut().zip(&z) {
            *xk += zk;
        }
        beta = residual(&x, &mut ax, &mut r, &mut apply);
        report.residual = beta;
        if !beta.is_finite() {
            return Err(Error::NonFinite("GMRES residual".into()));
        }
        if beta <= target {
            return Ok((x, report));
        }
        if report.iterations >= cfg.max_iterations || used == 0 {
            return Err(Error::KrylovNotConverged {
                iterations: report.iterations,
                residual: beta,
                target,
                best: x,
            });
        }
    }
}

/// Newton settings. The finite-difference step is `fd_epsilon (1 + ||u||) / ||p||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iterations: usize,
    pub line_search: bool,
    pub fd_epsilon: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol: 1e-12,
            max_iterations: 30,
            line_search: true,
            fd_epsilon: f64::EPSILON.sqrt(),
        }
    }
}

impl NewtonConfig {
    pub fn with_tol(tol: f64) -> Self {
        NewtonConfig {
            tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.fd_epsilon > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidArgument("Newton tolerance, FD epsilon and iteration cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct NewtonReport {
    pub iterations: usize,
    pub krylov_iterations: usize,
    pub residual_evaluations: usize,
    /// Infinity norm of the residual at the returned iterate.
    pub residual: f64,
}

/// Jacobian-free Newton–Krylov: finds `u` with `||residual(u)||_inf < tol`.
///
/// Each linear solve targets the absolute tolerance `1e-2 tol`; a GMRES solve that
/// exhausts its budget still contributes its best iterate as an inexact step.
pub fn newton_krylov<R>(
    mut residual: R,
    u0: Vec<f64>,
    ncfg: &NewtonConfig,
    kcfg: &KrylovConfig,
) -> Result<(Vec<f64>, NewtonReport)>
where
    R: FnMut(&[f64], &mut [f64]),
{
    ncfg.validate()?;
    kcfg.validate()?;
    let n = u0.len();
    let mut u = u0;
    let mut r = vec![0.0; n];
    residual(&u, &mut r);
    let mut report = NewtonReport {
        residual_evaluations: 1,
        ..Default::default()
    };
    let lin_cfg = KrylovConfig {
        atol: 1e-2 * ncfg.tol,
        ..*kcfg
    };
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; n];
    let mut up = vec![0.0; n];
    let mut rp = vec![0.0; n];
    loop {
        let rinf = norm_inf(&r);
        report.residual = rinf;
        if !rinf.is_finite() {
            return Err(Error::NewtonFailed {
                iterations: report.iterations,
                residual: rinf,
                reason: "non-finite residual",
            });
        }
        if rinf < ncfg.tol {
            return Ok((u, report));
        }
        if report.iterations >= ncfg.max_iterations {
            return Err(Error::NewtonFailed {
                iterations: report.iterations,
                residual: rinf,
                reason: "iteration limit reached",
            });
        }
        let unorm = norm2(&u);
        let rnorm = norm2(&r);
        let neg_r: Vec<f64> = r.iter().map(|x| -x).collect();
        let mut evals = 0;
        let jv = |p: &[f64], out: &mut [f64]| {
            let pn = norm2(p);
            if pn == 0.0 {
                out.fill(0.0);
                return;
            }
            let sigma = ncfg.fd_epsilon * (1.0 + unorm) / pn;
            for i in 0..n {
                up[i] = u[i] + sigma * p[i];
            }
            residual(&up, &mut rp);
            evals += 1;
            for i in 0..n {
                out[i] = (rp[i] - r[i]) / sigma;
            }
        };
        let zero = vec![0.0; n];
        let step = match gmres(jv, &neg_r, &zero, &lin_cfg) {
            Ok((p, rep)) => {
                report.krylov_iterations += rep.iterations;
                p
            }
            Err(Error::KrylovNotConverged { best, iterations, .. }) => {
                report.krylov_iterations += iterations;
                best
            }
            Err(e) => return Err(e),
        };
        report.residual_evaluations += evals;
        let mut lambda = 1.0;
        let mut accepted = false;
        let mut best: Option<(f64, f64)> = None;
        for _ in 0..20 {
            for i in 0..n {
                trial[i] = u[i] + lambda * step[i];
            }
            residual(&trial, &mut r_trial);
            report.residual_evaluations += 1;
            let tn = norm2(&r_trial);
            if !ncfg.line_search || tn <= (1.0 - 1e-4 * lambda) * rnorm {
                accepted = true;
                break;
            }
            if tn.is_finite() && best.map_or(true, |(_, b)| tn < b) {
                best = Some((lambda, tn));
            }
            lambda *= 0.5;
        }
        if !accepted {
            match best {
                Some((l, tn)) if tn < rnorm => {
                    for i in 0..n {
                        trial[i] = u[i] + l * step[i];
                    }
                    residual(&trial, &mut r_trial);
                    report.residual_evaluations += 1;
                }
                _ => {
                    return Err(Error::NewtonFailed {
                        iterations: report.iterations,
                        residual: rinf,
                        reason: "line search could not reduce the residual",
                    })
                }
            }
        }
        std::mem::swap(&mut u, &mut trial);
        std::mem::swap(&mut r, &mut r_trial);
        report.iterations += 1;
    }
}

/// Assembles the dense row-major matrix of a linear operator by probing unit vectors.
pub fn assemble_dense(n: usize, mut apply: impl FnMut(&[f64], &mut [f64])) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        apply(&e, &mut col);
        for i in 0..n {
            a[i * n + j] = col[i];
        }
        e[j] = 0.0;
    }
    a
}

/// Solves the dense row-major system `a x = b` by LU with partial pivoting.
pub fn dense_solve(n: usize, mut a: Vec<f64>, b: &[f64]) -> Result<Vec<f64>> {
    crate::error::check_len("dense matrix", n * n, a.len())?;
    crate::error::check_len("dense right-hand side", n, b.len())?;
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap_or(k);
        if a[p * n + k] == 0.0 {
            return Err(Error::InvalidArgument("singular matrix in dense solve".into()));
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let piv = a[k * n + k];
        for i in k + 1..n {
            let factor = a[i * n + k] / piv;
            if factor != 0.0 {
                for j in k..n {
                    a[i * n + j] -= factor * a[k * n + j];
                }
                x[i] -= factor * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k * n + j] * x[j]).sum();
        x[k] = (x[k] - s) / a[k * n + k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matvec(a: &[f64], n: usize) -> impl FnMut(&[f64], &mut [f64]) + '_ {
        move |x, y| {
            for i in 0..n {
                y[i] = (0..n).map(|j| a[i * n + j] * x[j]).sum();
            }
        }
    }

    /// Deterministic pseudo-random sequence for test matrices.
    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let b = vec![1.0, -2.0, 3.5, 0.25];
        let (x, rep) = gmres(|v, o| o.copy_from_slice(v), &b, &[0.0; 4], &KrylovConfig::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-15);
        }
    }

    #[test]
    fn spd_three_by_three_matches_hand_inverse() {
        // A = [[4,1,0],[1,3,1],[0,1,2]], det = 18; inverse by cofactors.
        let a = [4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let inv = [5.0 / 18.0, -2.0 / 18.0, 1.0 / 18.0, -2.0 / 18.0, 8.0 / 18.0, -4.0 / 18.0, 1.0 / 18.0, -4.0 / 18.0, 11.0 / 18.0];
        let b = [1.0, 2.0, 3.0];
        let (x, _) = gmres(matvec(&a, 3), &b, &[0.0; 3], &KrylovConfig::default()).unwrap();
        for i in 0..3 {
            let exact: f64 = (0..3).map(|j| inv[i * 3 + j] * b[j]).sum();
            assert!((x[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn random_system_matches_dense_solve() {
        let n = 50;
        let mut seed = 7;
        let mut a: Vec<f64> = (0..n * n).map(|_| 0.3 * lcg(&mut seed) / (n as f64).sqrt()).collect();
        for i in 0..n {
            a[i * n + i] += 2.0;
        }
        let b: Vec<f64> = (0..n).map(|_| lcg(&mut seed)).collect();
        let cfg = KrylovConfig::default();
        let (x, rep) = gmres(matvec(&a, n), &b, &vec![0.0; n], &cfg).unwrap();
        let xd = dense_solve(n, a.clone(), &b).unwrap();
        let err: f64 = x.iter().zip(&xd).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-12 * norm2(&xd), "err {err}");
        assert!(rep.residual <= cfg.rtol * norm2(&b));
    }

    #[test]
    fn restarts_and_reports_non_convergence() {
        let n = 40;
        let mut seed = 3;
        let mut a: Vec<f64> = (0..n * n).map(|_| lcg(&mut seed)).collect();
        for i in 0..n {
            a[i * n + i] += 1.0;
        }
        let b: Vec<f64> = (0..n).map(|_| lcg(&mut seed)).collect();
        let cfg = KrylovConfig {
            restart: 5,
            max_iterations: 12,
            ..Default::default()
        };
        match gmres(matvec(&a, n), &b, &vec![0.0; n], &cfg) {
            Err(Error::KrylovNotConverged { iterations, best, residual, .. }) => {
                assert_eq!(iterations, 12);
                assert_eq!(best.len(), n);
                assert!(residual < norm2(&b));
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn preconditioned_matches_plain() {
        let a = [4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let b = [1.0, 0.0, -1.0];
        let jacobi = |v: &[f64], o: &mut [f64]| {
            o[0] = v[0] / 4.0;
            o[1] = v[1] / 3.0;
            o[2] = v[2] / 2.0;
        };
        let (x1, _) = gmres(matvec(&a, 3), &b, &[0.0; 3], &KrylovConfig::default()).unwrap();
        let (x2, _) = gmres_right_preconditioned(matvec(&a, 3), jacobi, &b, &[0.0; 3], &KrylovConfig::default()).unwrap();
        for i in 0..3 {
            assert!((x1[i] - x2[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn dense_solve_pivots() {
        let a = vec![0.0, 1.0, 1.0, 0.0];
        let x = dense_solve(2, a, &[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![3.0, 2.0]);
        assert!(dense_solve(2, vec![1.0, 2.0, 2.0, 4.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn newton_linear_residual_one_step() {
        let c = [1.0, -2.0, 0.5];
        let (u, rep) = newton_krylov(
            |u, r| {
                for i in 0..3 {
                    r[i] = u[i] - c[i];
                }
            },
            vec![0.0; 3],
            &NewtonConfig::with_tol(1e-7),
            &KrylovConfig::default(),
        )
        .unwrap();
        // Finite-difference Jacobian products limit a single step to about 1e-9.
        assert_eq!(rep.iterations, 1);
        for i in 0..3 {
            assert!((u[i] - c[i]).abs() < 1e-7);
        }
    }

    #[test]
    fn newton_scalar_quadratic() {
        let (u, rep) = newton_krylov(|u, r| r[0] = u[0] * u[0] - 4.0, vec![3.0], &NewtonConfig::with_tol(1e-12), &KrylovConfig::default()).unwrap();
        assert!((u[0] - 2.0).abs() < 1e-12);
        assert!(rep.residual < 1e-12);
    }

    #[test]
    fn newton_two_dimensional_system() {
        let (u, rep) = newton_krylov(
            |u, r| {
                r[0] = u[0] + u[1] - 3.0;
                r[1] = u[0] * u[1] - 2.0;
            },
            vec![2.5, 0.5],
            &NewtonConfig::with_tol(1e-12),
            &KrylovConfig::default(),
        )
        .unwrap();
        let near = |a: f64, b: f64| (u[0] - a).abs() < 1e-10 && (u[1] - b).abs() < 1e-10;
        assert!(near(2.0, 1.0) || near(1.0, 2.0), "{u:?}");
        assert!(rep.residual < 1e-12);
    }

    #[test]
    fn newton_reports_iteration_limit() {
        // No real root: u^2 + 1 = 0.
        let res = newton_krylov(|u, r| r[0] = u[0] * u[0] + 1.0, vec![0.5], &NewtonConfig::with_tol(1e-12), &KrylovConfig::default());
        assert!(matches!(res, Err(Error::NewtonFailed { .. })));
    }

    #[test]
    fn finite_difference_matches_jacobian() {
        // R(u) = (u0^2 u1, u1^3 - u0); J p analytic.
        let u = [0.7, -1.3];
        let p = [0.4, 0.9];
        let res = |u: &[f64]| [u[0] * u[0] * u[1], u[1].powi(3) - u[0]];
        let jp = [2.0 * u[0] * u[1] * p[0] + u[0] * u[0] * p[1], -p[0] + 3.0 * u[1] * u[1] * p[1]];
        let pn = norm2(&p);
        let sigma = f64::EPSILON.sqrt() * (1.0 + norm2(&u)) / pn;
        let r0 = res(&u);
        let r1 = res(&[u[0] + sigma * p[0], u[1] + sigma * p[1]]);
        for i in 0..2 {
            let fd = (r1[i] - r0[i]) / sigma;
            assert!((fd - jp[i]).abs() < 10.0 * sigma * pn * pn * 10.0, "{fd} vs {}", jp[i]);
        }
    }

    proptest! {
        #[test]
        fn gmres_history_monotone_within_cycles(seed in 0u64..1000, restart in 2usize..8) {
            let n = 20;
            let mut s = seed;
            // Positive-definite symmetric part, so restarted GMRES cannot stagnate.
            let mut a: Vec<f64> = (0..n * n).map(|_| lcg(&mut s) * 0.05).collect();
            for i in 0..n { a[i * n + i] += 1.5; }
            let b: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
            let cfg = KrylovConfig { restart, max_iterations: 400, ..Default::default() };
            let (_, rep) = gmres(matvec(&a, n), &b, &vec![0.0; n], &cfg).unwrap();
            let mut bounds = rep.cycle_starts.clone();
            bounds.push(rep.history.len());
            for w in bounds.windows(2) {
                let cyc = &rep.history[w[0]..w[1]];
                for pair in cyc.windows(2) {
                    prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
                }
            }
        }

        #[test]
        fn jfnk_linear_residual_single_iteration(seed in 0u64..500) {
            let n = 8;
            let mut s = seed;
            let mut a: Vec<f64> = (0..n * n).map(|_| lcg(&mut s) * 0.3).collect();
            for i in 0..n { a[i * n + i] += 2.0; }
            let c: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
            let (_, rep) = newton_krylov(
                |u, r| { for i in 0..n { r[i] = (0..n).map(|j| a[i * n + j] * u[j]).sum::<f64>() - c[i]; } },
                vec![0.0; n], &NewtonConfig::with_tol(1e-6), &KrylovConfig::default()).unwrap();
            prop_assert_eq!(rep.iterations, 1);
        }
    }
}
