use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pursuit_bench::scene;
use pursuit_core::simulate;

fn obstacles(c: &mut Criterion) {
    let mut g = c.benchmark_group("obstacles");
    for hash in [false, true] {
        for n in [25, 50, 100, 200, 400] {
            let s = scene(n, 10.0, 0.2, hash);
            let id = BenchmarkId::new(if hash { "hash" } else { "scan" }, n);
            g.bench_with_input(id, &s, |b, s| b.iter(|| simulate(s).unwrap()));
        }
    }
    g.finish();
}

fn branches(c: &mut Criterion) {
    let mut g = c.benchmark_group("branches");
    for da in [0.8, 0.4, 0.2, 0.1] {
        let s = scene(50, 10.0, da, true);
        let n_a = pursuit_core::dynamics::branch_count(da).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n_a), &s, |b, s| b.iter(|| simulate(s).unwrap()));
    }
    g.finish();
}

fn steps(c: &mut Criterion) {
    let mut g = c.benchmark_group("steps");
    for horizon in [2.4, 4.8, 9.6, 19.2] {
        let s = scene(50, horizon, 0.2, true);
        g.bench_with_input(BenchmarkId::from_parameter(s.step_count()), &s, |b, s| {
            b.iter(|| simulate(s).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, obstacles, branches, steps);
criterion_main!(benches);
