use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ecl_core::certify::{solve_in_box, SolverConfig};
use ecl_core::ecl::{catalog, EnumBound};
use ecl_core::interval::IntervalBox;
use ecl_core::syntax::parse_system;

fn solve(c: &mut Criterion) {
    let sys = parse_system("x1^2 + x2^2 - 4; x2 - E(x1) + 2").unwrap();
    let bx = IntervalBox::parse("[-3, 3]; [-3, 3]", 64).unwrap();
    let mut group = c.benchmark_group("solve_in_box");
    for parallel in [false, true] {
        let cfg = SolverConfig::default().with_parallel(parallel);
        group.bench_with_input(BenchmarkId::from_parameter(if parallel { "parallel" } else { "sequential" }), &cfg, |b, cfg| {
            b.iter(|| black_box(solve_in_box(&sys, &bx, cfg).unwrap()))
        });
    }
    group.finish();
}

fn enumerate(c: &mut Criterion) {
    let bound = EnumBound { max_n: 1, max_tower: 1, max_coeff_bits: 1, max_monomials: 2 };
    let bx = IntervalBox::parse("[0, 3]", 64).unwrap();
    let mut group = c.benchmark_group("catalog");
    group.sample_size(10);
    for parallel in [false, true] {
        let cfg = SolverConfig::default().with_parallel(parallel);
        group.bench_with_input(BenchmarkId::from_parameter(if parallel { "parallel" } else { "sequential" }), &cfg, |b, cfg| {
            b.iter(|| black_box(catalog(bound, &bx, cfg)))
        });
    }
    group.finish();
}

criterion_group!(benches, solve, enumerate);
criterion_main!(benches);
