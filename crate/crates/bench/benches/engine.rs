use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use layerstack::bragg::{reflection, BraggMethod, BraggSpec};
use layerstack::casimir::{force_direct, two_body_force, CavityConfig, QuadratureSettings};
use layerstack::{LayerStack, MaterialModel, Polarization, TransverseMode};

fn bragg_stack(pairs: usize) -> LayerStack {
    let hi = MaterialModel::dielectric(2.5);
    let lo = MaterialModel::dielectric(1.5);
    let mut s = LayerStack::new(lo.clone(), lo.clone());
    for _ in 0..pairs {
        s.push_layer(hi.clone(), 60e-9).unwrap();
        s.push_layer(lo.clone(), 100e-9).unwrap();
    }
    s
}

fn stacks(c: &mut Criterion) {
    let mut g = c.benchmark_group("evaluate");
    for pairs in [1, 10, 100] {
        let s = bragg_stack(pairs);
        let real = TransverseMode::real(Polarization::P, 4e6, 3e15).unwrap();
        let imag = TransverseMode::imaginary(Polarization::S, 4e6, 3e15).unwrap();
        g.bench_with_input(BenchmarkId::new("real", 2 * pairs), &s, |b, s| {
            b.iter(|| s.evaluate(black_box(&real)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("imaginary", 2 * pairs), &s, |b, s| {
            b.iter(|| s.evaluate(black_box(&imag)).unwrap())
        });
    }
    g.finish();
}

fn bragg(c: &mut Criterion) {
    let mut g = c.benchmark_group("bragg");
    let spec = BraggSpec::new(1.5, 2.5, 1024, 1e-6).unwrap();
    for method in BraggMethod::ALL {
        g.bench_function(method.to_string(), |b| {
            b.iter(|| reflection(black_box(&spec), method).unwrap())
        });
    }
    g.finish();
}

fn casimir(c: &mut Criterion) {
    let mut g = c.benchmark_group("casimir");
    g.sample_size(10);
    let pec = MaterialModel::IdealMirror;
    let vac = MaterialModel::Vacuum;
    let m1 = LayerStack::new(pec.clone(), vac.clone()).to_expr();
    let m2 = LayerStack::new(vac.clone(), pec.clone()).to_expr();
    let settings = QuadratureSettings::default();
    g.bench_function("two_body_ideal", |b| {
        b.iter(|| two_body_force(&m1, &m2, black_box(1e-6), &vac, &settings).unwrap())
    });

    let gold = MaterialModel::drude(1.37e16, 5.32e13);
    let slab = LayerStack::new(vac.clone(), vac.clone())
        .with_layer(MaterialModel::dielectric(1.5), 100e-9)
        .unwrap()
        .to_expr();
    let settings = QuadratureSettings {
        rel_tol: 1e-6,
        ..QuadratureSettings::default()
    };
    let config = CavityConfig::new(
        LayerStack::new(gold.clone(), vac.clone()).to_expr(),
        LayerStack::new(vac.clone(), gold).to_expr(),
        slab,
        0.4e-6,
        0.6e-6,
        vac,
        settings,
    )
    .unwrap();
    g.bench_function("three_body_drude", |b| {
        b.iter(|| force_direct(black_box(&config)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, stacks, bragg, casimir);
criterion_main!(benches);
