use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dg_operad::dg::DgaModule;
use dg_operad::free::{FreeOperad, TruncationParams};
use dg_operad::operad::{build_m, check_operad, CheckOptions};
use dg_operad::smodule::free_h;
use dg_operad::{Execution, Field, SModule};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn axioms(c: &mut Criterion) {
    let m = build_m(&Field::Rational, 4);
    let mut group = c.benchmark_group("check_operad_m4");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| check_operad(black_box(&m), &CheckOptions::new(4).with_execution(exec)))
        });
    }
    group.finish();
}

fn free_stages(c: &mut Criterion) {
    let f = Field::Rational;
    let binary = SModule::nonsymmetric(
        f.clone(),
        vec![DgaModule::zero(f.clone()), DgaModule::zero(f.clone()), DgaModule::free(f, vec![("g".into(), 0)])],
    )
    .unwrap();
    let h = free_h(&binary);
    let mut group = c.benchmark_group("free_symmetric_4_3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| FreeOperad::with_execution(black_box(&h), TruncationParams::new(4, 3), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, axioms, free_stages);
criterion_main!(benches);
