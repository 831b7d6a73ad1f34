//! Property checks shared by the `properties` suite and the acceptance run.
#![allow(dead_code)]

use ecvm_core::fields::maxwell_weak_rhs;
use ecvm_core::harness::{weibel_initial_state, WeibelParams};
use ecvm_core::integrators::{
    scheme3_step, scheme4_residual, scheme4_step, scheme_a_step, scheme_c_step, DtPolicy, SchemeConfig, SchemeId, State,
};
use ecvm_core::solvers::{assemble_dense, dense_solve, newton_krylov};
use ecvm_core::vlasov::{transport_x_rhs, vlasov_rhs};
use ecvm_core::*;

/// Deterministic pseudo-random values in `[-1, 1]`.
pub fn noise(n: usize, seed: u64) -> Vec<f64> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Small mesh on the Run 1 domain.
pub fn tiny_mesh(nx: usize, nv: usize, k: usize) -> Mesh1D2V {
    build_mesh(nx, nv, nv, WeibelParams::run1().length(), 1.2, 1.2, k).unwrap()
}

/// Smooth f with x and v structure and fields strong enough to matter.
pub fn tiny_state(mesh: &Mesh1D2V) -> State {
    let w = WeibelParams {
        beta: 0.2,
        b: 0.3,
        ..WeibelParams::run1()
    };
    let mut s = weibel_initial_state(&w, mesh).unwrap();
    let f = DistributionField::from_fn(mesh, |x, v1, v2| (1.0 + 0.3 * (0.2 * x).cos()) * w.f0(v1, v2)).unwrap();
    s.f = f;
    let x = mesh.x2().nodes();
    s.em.e1 = x.iter().map(|x| 0.2 * (0.2 * x).cos()).collect();
    s.em.e2 = x.iter().map(|x| -0.1 * (0.4 * x).sin()).collect();
    s
}

pub fn quadrature_exactness() {
    for n in 1..=10 {
        let rule = gauss_rule(n).unwrap();
        for d in 0..2 * n {
            let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
            let got: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(d as i32)).sum();
            assert!((got - exact).abs() <= 1e-13 * exact.abs().max(1.0), "n={n} d={d}: {got} vs {exact}");
        }
    }
}

/// Central fluxes are skew in the nodal inner product, upwind fluxes dissipate,
/// and every Maxwell flux pairing conserves the field energy.
pub fn flux_identities() {
    for k in 1..=3 {
        let m = tiny_mesh(7, 2, k);
        let w = m.x2().weights();
        let n = m.nx_nodes();
        let u = noise(n, 3 + k as u64);
        let inner = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(w).map(|((x, y), w)| x * y * w).sum::<f64>();
        for speed in [0.7, -1.3] {
            let c = transport_x_rhs(&m, &u, speed, VlasovFlux::Central).unwrap();
            assert!(inner(&u, &c).abs() < 1e-12, "central x-transport not skew");
            let up = transport_x_rhs(&m, &u, speed, VlasovFlux::Upwind).unwrap();
            assert!(inner(&u, &up) < 0.0, "upwind x-transport not dissipative");
        }
        let e = noise(n, 11);
        let b = noise(n, 12);
        for flux in [MaxwellFlux::Central, MaxwellFlux::AlternatingEplusBminus, MaxwellFlux::AlternatingEminusBplus] {
            let (de, db) = maxwell_weak_rhs(&m, &e, &b, flux).unwrap();
            let rate = inner(&e, &de) + inner(&b, &db);
            assert!(rate.abs() < 1e-12, "{flux:?}: field energy rate {rate:e}");
        }
    }
}

pub fn rhs_linearity() {
    let m = tiny_mesh(3, 4, 2);
    let s = tiny_state(&m);
    let len = m.f_len();
    let f = DistributionField::from_values(&m, noise(len, 1)).unwrap();
    let g = DistributionField::from_values(&m, noise(len, 2)).unwrap();
    let (a, b) = (0.7, -2.5);
    let comb: Vec<f64> = f.values().iter().zip(g.values()).map(|(x, y)| a * x + b * y).collect();
    let h = DistributionField::from_values(&m, comb).unwrap();
    for flux in [VlasovFlux::Upwind, VlasovFlux::Central] {
        let rf = vlasov_rhs(&m, &f, &s.em.e1, &s.em.e2, &s.em.b3, flux).unwrap();
        let rg = vlasov_rhs(&m, &g, &s.em.e1, &s.em.e2, &s.em.b3, flux).unwrap();
        let rh = vlasov_rhs(&m, &h, &s.em.e1, &s.em.e2, &s.em.b3, flux).unwrap();
        let expect: Vec<f64> = rf.iter().zip(&rg).map(|(x, y)| a * x + b * y).collect();
        let scale = expect.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        assert!(max_abs_diff(&rh, &expect) < 1e-12 * scale, "rhs not linear in f");
    }
}

pub fn reversal_involution() {
    let m = tiny_mesh(3, 4, 2);
    let mut s = tiny_state(&m);
    // Run 1 beams are even in v, so use data without that symmetry.
    s.f = DistributionField::from_values(&m, noise(m.f_len(), 5)).unwrap();
    let twice = s.reversed().reversed();
    assert_eq!(twice.f.values(), s.f.values());
    assert_eq!(twice.em.e1, s.em.e1);
    assert_eq!(twice.em.e2, s.em.e2);
    assert_eq!(twice.em.b3, s.em.b3);
    let once = s.reversed();
    assert_ne!(once.f.values(), s.f.values());
}

/// `(I - dt/2 L) x = (I + dt/2 L) u` solved densely.
fn dense_midpoint(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>, u: &[f64], dt: f64) -> Vec<f64> {
    let a = assemble_dense(n, |x, y| {
        let l = apply(x);
        for i in 0..n {
            y[i] = x[i] - 0.5 * dt * l[i];
        }
    });
    let lu = apply(u);
    let rhs: Vec<f64> = u.iter().zip(&lu).map(|(x, l)| x + 0.5 * dt * l).collect();
    dense_solve(n, a, &rhs).unwrap()
}

/// Every linear implicit solve agrees with a dense LU solve, and the nonlinear
/// ones leave residuals at the Newton tolerance.
pub fn dense_oracles() {
    let m = tiny_mesh(3, 4, 1);
    let s = tiny_state(&m);
    let n = m.f_len();
    let nx = m.nx_nodes();
    let dt = 0.3;
    let zero = vec![0.0; nx];
    let wrap = |v: &[f64]| DistributionField::from_values(&m, v.to_vec()).unwrap();
    for flux in [VlasovFlux::Upwind, VlasovFlux::Central] {
        let mut cfg = SchemeConfig::new(SchemeId::S5, DtPolicy::Fixed(dt));
        cfg.vlasov_flux = flux;
        let scale = s.f.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));

        // x-streaming.
        let got = scheme_a_step(&m, &cfg, &s.f, dt).unwrap();
        let stream = |u: &[f64]| vlasov_rhs(&m, &wrap(u), &zero, &zero, &zero, flux).unwrap();
        let want = dense_midpoint(n, stream, s.f.values(), dt);
        assert!(max_abs_diff(got.values(), &want) < 1e-10 * scale, "scheme a vs dense");

        // Magnetic rotation with the time-averaged field from the Maxwell sub-step.
        let (got, _, b3n) = scheme_c_step(&m, &cfg, &s.f, &s.em.e1, &s.em.b3, dt).unwrap();
        let b_bar: Vec<f64> = s.em.b3.iter().zip(&b3n).map(|(a, b)| 0.5 * (a + b)).collect();
        let rot = |u: &[f64]| {
            let f = wrap(u);
            let all = vlasov_rhs(&m, &f, &zero, &zero, &b_bar, flux).unwrap();
            let x = vlasov_rhs(&m, &f, &zero, &zero, &zero, flux).unwrap();
            all.iter().zip(&x).map(|(a, b)| a - b).collect()
        };
        let want = dense_midpoint(n, rot, s.f.values(), dt);
        assert!(max_abs_diff(got.values(), &want) < 1e-10 * scale, "scheme c vs dense");

        // Scheme 3: linear midpoint Vlasov with leapfrogged E.
        cfg.scheme = SchemeId::S3;
        let got = scheme3_step(&m, &cfg, &s, dt).unwrap();
        let (e1h, e2h) = match got.em.staggered.as_ref().unwrap() {
            Staggered::EHalf { e1, e2, .. } => (e1.clone(), e2.clone()),
            other => panic!("unexpected staggered copy {other:?}"),
        };
        let b_bar: Vec<f64> = s.em.b3.iter().zip(&got.em.b3).map(|(a, b)| 0.5 * (a + b)).collect();
        let lv = |u: &[f64]| vlasov_rhs(&m, &wrap(u), &e1h, &e2h, &b_bar, flux).unwrap();
        let want = dense_midpoint(n, lv, s.f.values(), dt);
        assert!(max_abs_diff(got.f.values(), &want) < 1e-10 * scale, "scheme 3 vs dense");

        // Scheme 4: the returned state is a root of the midpoint residual.
        cfg.scheme = SchemeId::S4;
        let got = scheme4_step(&m, &cfg, &s, dt).unwrap();
        let mut u = got.f.values().to_vec();
        u.extend_from_slice(&got.em.e1);
        u.extend_from_slice(&got.em.e2);
        u.extend_from_slice(&got.em.b3);
        let mut r = vec![0.0; u.len()];
        scheme4_residual(&m, &cfg, &s, dt, &u, &mut r).unwrap();
        let res = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(res < cfg.newton.tol, "scheme 4 residual {res:e}");
    }
}

/// A linear residual is solved by a single Newton step.
pub fn jfnk_linear_one_step() {
    let n = 40;
    let a: Vec<f64> = noise(n * n, 9).iter().enumerate().map(|(i, v)| if i % (n + 1) == 0 { 4.0 + v } else { 0.1 * v }).collect();
    let b = noise(n, 10);
    let residual = |u: &[f64], r: &mut [f64]| {
        for i in 0..n {
            r[i] = (0..n).map(|j| a[i * n + j] * u[j]).sum::<f64>() - b[i];
        }
    };
    let (u, rep) = newton_krylov(residual, vec![0.0; n], &NewtonConfig::with_tol(1e-7), &KrylovConfig::default()).unwrap();
    assert_eq!(rep.iterations, 1, "{rep:?}");
    let want = dense_solve(n, a.clone(), &b).unwrap();
    assert!(max_abs_diff(&u, &want) < 1e-8);
}

pub const PROPERTY_SUITES: [(&str, fn()); 6] = [
    ("quadrature exactness", quadrature_exactness),
    ("flux identities", flux_identities),
    ("rhs linearity", rhs_linearity),
    ("reversal involution", reversal_involution),
    ("dense-oracle implicit solves", dense_oracles),
    ("JFNK one-step convergence", jfnk_linear_one_step),
];
