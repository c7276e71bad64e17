use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use otoc_core::brickwork::{choi_state, evolve_heisenberg, reduced_choi, BrickworkCircuit};
use otoc_core::dual_unitary::{apply_replica, ColumnGate};
use otoc_core::otoc::{sample_otocs, OtocKernel};
use otoc_core::random::SeededSource;
use otoc_core::tensor::{pauli, Site, C64};
use otoc_core::Exec;

fn kernel() -> OtocKernel {
    let circuit = BrickworkCircuit::haar(8, 3, SeededSource::new(1), true).unwrap();
    let vt = evolve_heisenberg(&circuit, &pauli(3), 3).unwrap();
    let c = choi_state(&vt).unwrap();
    OtocKernel::new(&reduced_choi(&c, Site(1), Site(3)).unwrap()).unwrap()
}

fn monte_carlo(c: &mut Criterion) {
    let k = kernel();
    let mut group = c.benchmark_group("monte_carlo_d8");
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_with_input(BenchmarkId::new(name, 512), &exec, |b, &exec| {
            b.iter(|| sample_otocs(&k, 512, SeededSource::new(2), exec).unwrap())
        });
    }
    group.finish();
}

fn replica_sweep(c: &mut Criterion) {
    let mut rng = SeededSource::new(3).rng();
    let u = otoc_core::random::haar_unitary(4, &mut rng).unwrap();
    let gate = ColumnGate::new(&u);
    let width = 4;
    let state = vec![C64::new(1.0, 0.0); 16usize.pow(width as u32)];
    let mut group = c.benchmark_group("replica_column_w4");
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_function(name, |b| b.iter(|| apply_replica(&gate, &state, width, exec)));
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, replica_sweep);
criterion_main!(benches);
