//! Throughput of the sampling loop: data-parallel rayon path against the
//! sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use symsector_core::measure::run_samples_sequential;
use symsector_core::qudit::QuditGeometry;
use symsector_core::sectors::{basis_for, SectorKind};

fn bench_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_batch");
    for (label, kind, n, d, n_a) in [
        ("full_n8", SectorKind::Full, 8usize, 2usize, 4usize),
        ("momentum_n8_k1", SectorKind::Momentum(1), 8, 2, 4),
        ("symmetric_n10", SectorKind::Symmetric, 10, 2, 5),
    ] {
        let geometry = QuditGeometry::new(n, d, n_a).unwrap();
        let basis = basis_for(kind, n, d).unwrap();
        let count = 256;
        group.bench_with_input(BenchmarkId::new("sequential", label), &count, |b, &count| {
            b.iter(|| run_samples_sequential(&basis, geometry, 2.0, 7, count).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", label), &count, |b, &count| {
            b.iter(|| {
                symsector_core::measure::run_samples_parallel(&basis, geometry, 2.0, 7, count)
                    .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sampling);
criterion_main!(benches);
