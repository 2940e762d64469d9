use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sphere_kernels::kernels::{kernel_series, KernelSpec};
use sphere_kernels::regress::gram_matrix;
use sphere_kernels::spectrum::{compute_spectrum, mu_phi_quadrature, Route, SpectrumOptions};
use sphere_kernels::sphharm::{legendre_batch, sample_sphere};

fn legendre(c: &mut Criterion) {
    c.bench_function("legendre_batch d=3 k=400", |b| b.iter(|| legendre_batch(3, 400, black_box(0.37)).unwrap()));
}

fn spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum d=3 kmax=61");
    group.sample_size(10);
    let opts = SpectrumOptions::default();
    for (name, route) in [
        ("arccos1", Route::Series),
        ("ntk:L=3", Route::Series),
        ("rf:L=4", Route::Quadrature),
        ("laplace:c=1", Route::Quadrature),
        ("step:L=3", Route::Quadrature),
    ] {
        let spec: KernelSpec = name.parse().unwrap();
        group.bench_with_input(BenchmarkId::new(format!("{route:?}"), name), &spec, |b, spec| {
            b.iter(|| compute_spectrum(spec, 3, 61, route, &opts).unwrap())
        });
    }
    group.finish();
}

fn series(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_series");
    group.sample_size(10);
    for name in ["arccos0", "ntk:L=4", "rf:L=5"] {
        let spec: KernelSpec = name.parse().unwrap();
        group.bench_with_input(BenchmarkId::new("order 2000", name), &spec, |b, spec| {
            b.iter(|| kernel_series(spec, 2000).unwrap())
        });
    }
    group.finish();
}

fn precise(c: &mut Criterion) {
    let mut group = c.benchmark_group("double-double phi quadrature");
    group.sample_size(10);
    group.bench_function("d=5 nu=2.5 kmax=50", |b| b.iter(|| mu_phi_quadrature(5, 2.5, 50, 256, false).unwrap()));
    group.finish();
}

fn gram(c: &mut Criterion) {
    let mut group = c.benchmark_group("gram_matrix d=4");
    group.sample_size(10);
    for n in [256, 1024] {
        let x = sample_sphere(4, n, 7).unwrap();
        for name in ["ntk:L=2,bias=1", "rf:L=3", "laplace:c=1"] {
            let spec: KernelSpec = name.parse().unwrap();
            group.bench_with_input(BenchmarkId::new(name, n), &x, |b, x| b.iter(|| gram_matrix(&spec, x, x).unwrap()));
        }
    }
    group.finish();
}

criterion_group!(benches, legendre, spectra, series, precise, gram);
criterion_main!(benches);
