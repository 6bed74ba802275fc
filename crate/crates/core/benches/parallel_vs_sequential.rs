//! Sequential against data-parallel execution for the three batch workloads:
//! a Hardy Z scan, a kernel closed-form sweep and a batch of bound audits.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nonres_core::characters::enumerate_characters;
use nonres_core::explicit::{audit_bound, AuditConfig, AuditMode};
use nonres_core::kernel::{kernel_check, KernelParams};
use nonres_core::lfunc::{build_archive, scan_critical_zeros, ScanConfig};
use nonres_core::par::{self, Exec};
use nonres_core::{Character, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn primitive(q: u64) -> Vec<Character> {
    enumerate_characters(q).unwrap().into_iter().filter(|c| c.is_primitive() && !c.is_principal()).collect()
}

fn z_scan(c: &mut Criterion) {
    let chi = primitive(5).into_iter().find(|c| c.order() == 2).unwrap();
    let mut group = c.benchmark_group("z_scan_mod5_0_to_40");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = ScanConfig { exec, cross_check: false, ..ScanConfig::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(scan_critical_zeros(&chi, 0.0, 40.0, &cfg).unwrap().zeros.len()))
        });
    }
    group.finish();
}

fn kernel_sweep(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let points: Vec<(Complex64, KernelParams)> = (0..200)
        .map(|_| {
            let p = KernelParams::unconstrained(
                rng.random_range(1.0..=100.0),
                rng.random_range(2.0..=5.0),
                rng.random_range(1.5..=10.0),
            )
            .unwrap();
            (Complex64::new(rng.random_range(-1.0..=2.0), rng.random_range(-20.0..=20.0)), p)
        })
        .collect();
    let mut group = c.benchmark_group("kernel_sweep_200");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(kernel_check(&points, 0, exec).unwrap().max_relative_error))
        });
    }
    group.finish();
}

fn batch_audits(c: &mut Criterion) {
    let moduli = [11u64, 13, 17, 19, 23, 29, 31, 37];
    let cfg = AuditConfig::new(AuditMode::Theorem13, 0.5, 1.1);
    let prepared: Vec<_> = moduli
        .iter()
        .map(|&q| {
            let chars = primitive(q);
            let height = 1.21 * (q as f64).ln();
            let scan = ScanConfig { exec: Exec::Sequential, ..ScanConfig::default() };
            let (archive, _) = build_archive(&chars, height, &scan).unwrap();
            (q, chars, archive)
        })
        .collect();
    let mut group = c.benchmark_group("audit_batch_8_moduli");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let results = par::map(exec, &prepared, |(q, chars, archive)| {
                    audit_bound(*q, &cfg, archive, chars).unwrap().len()
                });
                black_box(results.iter().sum::<usize>())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, z_scan, kernel_sweep, batch_audits);
criterion_main!(benches);
