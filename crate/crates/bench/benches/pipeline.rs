use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use robinfem::fem::{assemble_system, Order};
use robinfem::harness::{lookup, solve, Rules};
use robinfem::mesh::generate_disk_mesh;

criterion_group!(benches, pipeline);
criterion_main!(benches);

fn pipeline(c: &mut Criterion) {
    let sol = lookup("cubic10").unwrap();
    let rules = Rules::new(5, 7);

    let mut group = c.benchmark_group("pipeline");
    for order in [Order::Linear, Order::Quadratic] {
        for n in [64, 128] {
            let id = format!("k{order}/N{n}");
            group.bench_function(BenchmarkId::new("mesh", &id), |b| {
                b.iter(|| generate_disk_mesh(black_box(n), order).unwrap())
            });

            let mesh = generate_disk_mesh(n, order).unwrap();
            group.bench_function(BenchmarkId::new("assemble", &id), |b| {
                b.iter(|| assemble_system(&mesh, sol.f, sol.tau, &rules.assembly_tri, &rules.assembly_edge).unwrap())
            });
            group.bench_function(BenchmarkId::new("solve", &id), |b| {
                b.iter(|| solve(&mesh, &sol, &rules, 1e-10).unwrap())
            });
        }
    }
    group.finish();
}
