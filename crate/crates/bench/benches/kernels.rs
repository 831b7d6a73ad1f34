use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ecvm_bench::{weibel_mesh, weibel_state};
use ecvm_core::integrators::{step, DtPolicy, SchemeConfig, SchemeId};
use ecvm_core::solvers::gmres;
use ecvm_core::vlasov::vlasov_rhs;
use ecvm_core::{KrylovConfig, VlasovFlux};

fn rhs(c: &mut Criterion) {
    let mut g = c.benchmark_group("vlasov_rhs");
    for (n, k) in [(8, 1), (8, 2), (16, 2)] {
        let mesh = weibel_mesh(n, k);
        let s = weibel_state(&mesh);
        g.bench_with_input(BenchmarkId::from_parameter(format!("{n}^3_k{k}")), &(), |b, _| {
            b.iter(|| vlasov_rhs(&mesh, black_box(&s.f), &s.em.e1, &s.em.e2, &s.em.b3, VlasovFlux::Upwind).unwrap())
        });
    }
    g.finish();
}

fn krylov(c: &mut Criterion) {
    let n = 400;
    // Diagonally dominant tridiagonal system.
    let apply = |x: &[f64], y: &mut [f64]| {
        for i in 0..n {
            let l = if i > 0 { x[i - 1] } else { 0.0 };
            let r = if i + 1 < n { x[i + 1] } else { 0.0 };
            y[i] = 4.0 * x[i] - l - 0.5 * r;
        }
    };
    let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).sin()).collect();
    let cfg = KrylovConfig::default();
    c.bench_function("gmres_tridiagonal_400", |bch| {
        bch.iter(|| gmres(apply, black_box(&b), &vec![0.0; n], &cfg).unwrap())
    });
}

fn steps(c: &mut Criterion) {
    let mut g = c.benchmark_group("step");
    g.sample_size(10);
    let mesh = weibel_mesh(8, 2);
    let s = weibel_state(&mesh);
    for scheme in [SchemeId::S1, SchemeId::S2, SchemeId::S3, SchemeId::S5] {
        let cfg = SchemeConfig::new(scheme, DtPolicy::Fixed(0.1));
        let mut state = s.clone();
        ecvm_core::integrators::prime_staggered(&mesh, &cfg, &mut state, 0.1);
        g.bench_function(scheme.name(), |b| b.iter(|| step(&mesh, &cfg, black_box(&state), 0.1).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, rhs, krylov, steps);
criterion_main!(benches);
