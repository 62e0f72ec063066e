//! Benchmarks for the paths that dominate grid sweeps, ball quadratures,
//! and concentration profiles.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use projlog_core::kernels::{hessian_n_eps, kernel_n};
use projlog_core::measures::{q_concentration, sample_family, Family, FamilySpec};
use projlog_core::quadrature::radial_integrate_pn;
use projlog_core::{CVec, Measure, PotentialField, RegEps};

fn random_cvec(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> CVec {
    CVec::new(
        (0..n)
            .map(|_| {
                Complex64::new(
                    rng.random_range(-radius..radius),
                    rng.random_range(-radius..radius),
                )
            })
            .collect(),
    )
    .unwrap()
}

fn segment_cloud(samples: usize) -> Measure {
    sample_family(&FamilySpec {
        family: Family::Segment,
        center: Some(vec![0.0; 4]),
        scale: Some(2.0),
        orientation: None,
        k: None,
        ratio: None,
        n: None,
        samples,
        seed: 42,
    })
    .unwrap()
}

fn bench_kernel_value(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pairs: Vec<(CVec, CVec)> = (0..256)
        .map(|_| (random_cvec(&mut rng, 2, 2.0), random_cvec(&mut rng, 2, 2.0)))
        .collect();
    let eps = RegEps::new(0.1).unwrap();
    let mut i = 0;
    c.bench_function("kernel_n value (C^2)", |b| {
        b.iter(|| {
            let (z, w) = &pairs[i % pairs.len()];
            i += 1;
            black_box(kernel_n(black_box(z), black_box(w), eps).unwrap())
        })
    });
}

fn bench_kernel_hessian(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let eps = RegEps::new(0.1).unwrap();
    for n in [2usize, 3] {
        let pairs: Vec<(CVec, CVec)> = (0..256)
            .map(|_| (random_cvec(&mut rng, n, 2.0), random_cvec(&mut rng, n, 2.0)))
            .collect();
        let mut i = 0;
        c.bench_function(&format!("hessian_n_eps (C^{n})"), |b| {
            b.iter(|| {
                let (z, w) = &pairs[i % pairs.len()];
                i += 1;
                black_box(hessian_n_eps(black_box(z), black_box(w), eps).unwrap())
            })
        });
    }
}

fn bench_cloud_potential(c: &mut Criterion) {
    let mu = segment_cloud(500);
    let field = PotentialField::new(mu, RegEps::new(0.1).unwrap()).unwrap();
    let z = CVec::from_real_coords(&[0.7, -0.3, 0.2, 0.1]).unwrap();
    c.bench_function("500-atom field value (C^2)", |b| {
        b.iter(|| black_box(field.value(black_box(&z)).unwrap()))
    });
    c.bench_function("500-atom field gradient (C^2)", |b| {
        b.iter(|| black_box(field.grad(black_box(&z)).unwrap()))
    });
    c.bench_function("500-atom field Hessian (C^2)", |b| {
        b.iter(|| black_box(field.hessian(black_box(&z)).unwrap()))
    });
    c.bench_function("500-atom Monge-Ampere density (C^2)", |b| {
        b.iter(|| black_box(field.ma_density(black_box(&z), 2).unwrap()))
    });
}

fn bench_concentration(c: &mut Criterion) {
    let mu = segment_cloud(10_000);
    let radii: Vec<f64> = (0..12).map(|i| 0.01 * 1.5f64.powi(i)).collect();
    c.bench_function("q_concentration (10k points, 12 radii)", |b| {
        b.iter_batched(
            || radii.clone(),
            |r| black_box(q_concentration(&mu, &r).unwrap()),
            BatchSize::SmallInput,
        )
    });
}

fn bench_radial_rule(c: &mut Criterion) {
    c.bench_function("radial log-sine integral (P^2)", |b| {
        b.iter(|| {
            black_box(
                radial_integrate_pn(|r| (r / std::f64::consts::SQRT_2).sin().ln(), 2).unwrap(),
            )
        })
    });
}

criterion_group!(
    benches,
    bench_kernel_value,
    bench_kernel_hessian,
    bench_cloud_potential,
    bench_concentration,
    bench_radial_rule
);
criterion_main!(benches);
