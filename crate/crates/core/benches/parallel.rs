//! Parallel vs sequential execution of the batch workloads the verification
//! battery runs. Per-item grids stay below `exec::PARALLEL_THRESHOLD` so the
//! only parallelism measured is across items.

use std::hint::black_box;

use chronodyn::analytic::CyclotronParams;
use chronodyn::chronometry::period_map_numeric;
use chronodyn::dynamics::{integrate, FieldConfig, IntegratorConfig, Method, Particle, ParticleState};
use chronodyn::exec;
use chronodyn::spacetime::kinematic_g;
use chronodyn::worldline::uniform_times;
use chronodyn::{Boost, FrameTag, Vec3, Velocity3};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn period_sweep(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases: Vec<(f64, f64, f64)> = (0..256)
        .map(|_| (rng.random_range(-0.95..0.95), rng.random_range(0.05..0.95), rng.random_range(0.0..6.0)))
        .collect();
    let run = |&(v0, u0, t0): &(f64, f64, f64)| {
        let p = CyclotronParams::new(u0, 1.0, 0.0, Vec3::zeros(), 1.0, 1.0).unwrap();
        let n = 200;
        let w = p.worldline(&uniform_times(0.0, 2.0 * p.period() / n as f64, n)).unwrap();
        let b = Boost::new(v0).unwrap();
        period_map_numeric(&w, &b, t0.min(p.period() * 0.9), 1.0, p.period()).unwrap()
    };
    let mut group = c.benchmark_group("period_map_sweep");
    group.bench_function(BenchmarkId::new("parallel", cases.len()), |b| b.iter(|| exec::map_coarse(black_box(&cases), run)));
    group.bench_function(BenchmarkId::new("sequential", cases.len()), |b| b.iter(|| exec::map_sequential(black_box(&cases), run)));
    group.finish();
}

fn batch_integration(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let fields: Vec<FieldConfig> = (0..64)
        .map(|_| {
            let mut v = || Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            FieldConfig::new(0.3 * v(), v(), FrameTag::moving())
        })
        .collect();
    let s0 = ParticleState::new(0.0, Vec3::zeros(), Velocity3::new(0.2, 0.1, 0.0).unwrap(), Particle::new(1.0, 1.0).unwrap(), FrameTag::moving()).unwrap();
    let cfg = IntegratorConfig::new(Method::Rk4, 0.01, 200).unwrap();
    let run = |f: &FieldConfig| integrate(&s0, f, &cfg).unwrap().proper_time.last().copied();
    let mut group = c.benchmark_group("batch_integration");
    group.bench_function(BenchmarkId::new("parallel", fields.len()), |b| b.iter(|| exec::map_coarse(black_box(&fields), run)));
    group.bench_function(BenchmarkId::new("sequential", fields.len()), |b| b.iter(|| exec::map_sequential(black_box(&fields), run)));
    group.finish();
}

fn reciprocity_draws(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws: Vec<(f64, f64)> = (0..100_000).map(|_| (rng.random_range(-0.99..0.99), rng.random_range(-0.999..0.999))).collect();
    let run = |&(v0, ux): &(f64, f64)| kinematic_g(ux, &Boost::new(v0).unwrap()).unwrap();
    let mut group = c.benchmark_group("kinematic_g_draws");
    group.bench_function(BenchmarkId::new("parallel", draws.len()), |b| b.iter(|| exec::map(black_box(&draws), run)));
    group.bench_function(BenchmarkId::new("sequential", draws.len()), |b| b.iter(|| exec::map_sequential(black_box(&draws), run)));
    group.finish();
}

criterion_group!(benches, period_sweep, batch_integration, reciprocity_draws);
criterion_main!(benches);
