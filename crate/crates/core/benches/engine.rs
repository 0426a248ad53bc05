use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use slidematch::eval::evaluate;
use slidematch::instances::{gen_random, RandomStreamSpec};
use slidematch::lookahead::{all_splits, refined_lookahead_audit, AuditParams};
use slidematch::{Exec, OracleLimits, Scalar, StreamSlice, Weight, WindowEngine, WindowParams};

fn eps() -> Weight {
    Weight::ratio(1, 10)
}

fn modes() -> [(&'static str, Exec); 2] {
    [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ]
}

/// Window replay plus the exact optimum of every window.
fn window_oracle(c: &mut Criterion) {
    let s = gen_random(&RandomStreamSpec::uniform(10, 48, 3));
    let params = WindowParams::new(16, eps(), 10).unwrap();
    let limits = OracleLimits::default();
    let mut group = c.benchmark_group("window_oracle");
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| evaluate(black_box(&s), &params, &limits, exec).unwrap())
        });
    }
    group.finish();
}

fn lookahead_audit(c: &mut Criterion) {
    let s = gen_random(&RandomStreamSpec::uniform(8, 14, 9));
    let params = AuditParams::refined(&WindowParams::new(1, eps(), 8).unwrap());
    let splits = all_splits(s.len());
    let limits = OracleLimits::default();
    let mut group = c.benchmark_group("lookahead_audit");
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                refined_lookahead_audit(black_box(&s), &splits, &params, &limits, exec).unwrap()
            })
        });
    }
    group.finish();
}

fn feed<W: Scalar>(s: &StreamSlice<W>, params: &WindowParams, exec: Exec) -> usize {
    let mut engine = WindowEngine::with_exec(params.clone(), exec);
    for e in &s.events {
        black_box(engine.on_edge(e).unwrap());
    }
    engine.bucket_count()
}

/// Engine throughput: exact rationals against floats, and bucket feeding
/// sequential against parallel.
fn engine_throughput(c: &mut Criterion) {
    let exact = gen_random(&RandomStreamSpec::uniform(64, 1000, 17));
    let float = exact.map_weights(|w| w.to_f64());
    let params = WindowParams::new(200, eps(), 64).unwrap();
    let mut group = c.benchmark_group("engine_throughput");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::new("exact", name), &exact, |b, s| {
            b.iter(|| feed(s, &params, exec))
        });
        group.bench_with_input(BenchmarkId::new("f64", name), &float, |b, s| {
            b.iter(|| feed(s, &params, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, window_oracle, lookahead_audit, engine_throughput);
criterion_main!(benches);
