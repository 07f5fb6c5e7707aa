//! Throughput of the data-parallel hot loops.
//!
//! With the default `parallel` feature each workload runs twice: on the
//! global rayon pool and inside a single-thread pool, so one `cargo bench`
//! shows the speedup. Without the feature (`--no-default-features`) the
//! same workloads run on the plain sequential fallback for comparison
//! against a saved baseline.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use fpfilter::scattering::{transmission_numeric, transmittance_curve};
use fpfilter::wavepacket::{boost_and_place, ground_state, propagate, CondensateParams, Grid};
use fpfilter::{PhysicalConstants, PotentialSpec};

fn bench_all(c: &mut Criterion, label: &str, run: &dyn Fn(&dyn Fn())) {
    let square = PotentialSpec::square(300.0, 150.0, 5.0).unwrap();
    let gaussian = PotentialSpec::gaussian(300.0, 150.0, 6.0, 2.0).unwrap();

    let mut group = c.benchmark_group(format!("square_curve_8192/{label}"));
    group.sample_size(20);
    group.bench_function("run", |b| {
        b.iter(|| {
            run(&|| {
                black_box(transmittance_curve(&square, 1e-3, 0.1, 8192).unwrap());
            })
        })
    });
    group.finish();

    let mut group = c.benchmark_group(format!("gaussian_curve_64/{label}"));
    group.sample_size(10);
    group.bench_function("run", |b| {
        b.iter(|| {
            run(&|| {
                black_box(transmittance_curve(&gaussian, 0.01, 0.08, 64).unwrap());
            })
        })
    });
    group.finish();

    let mut group = c.benchmark_group(format!("gaussian_point/{label}"));
    group.sample_size(30);
    group.bench_function("run", |b| {
        b.iter(|| {
            run(&|| {
                black_box(transmission_numeric(&gaussian, black_box(0.12)).unwrap());
            })
        })
    });
    group.finish();

    // 400 split-step iterations on a 2^13 grid.
    let constants = PhysicalConstants::sodium();
    let grid = Grid::new(-1000.0, 1000.0, 1 << 13).unwrap();
    let params = CondensateParams {
        n_atoms: 5e4,
        scattering_length_m: 2.93e-9,
        omega_x: 5.0,
        omega_yz: 100.0,
        v0: 0.0336,
        x_trap: -300.0,
    };
    let bare = ground_state(&params, &constants, &grid).unwrap();
    let psi = boost_and_place(&bare, params.v0, params.x_trap, &constants).unwrap();
    let spec = PotentialSpec::gaussian(300.0, 150.0, 6.0, 2.0).unwrap();
    let mut group = c.benchmark_group(format!("split_step_400x8192/{label}"));
    group.sample_size(10);
    group.bench_function("run", |b| {
        b.iter(|| {
            run(&|| {
                black_box(propagate(&psi, &spec, &params, psi.time + 0.04, 1e-4).unwrap());
            })
        })
    });
    group.finish();
}

#[cfg(feature = "parallel")]
fn benches(c: &mut Criterion) {
    bench_all(c, "rayon", &|f| f());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    bench_all(c, "serial", &|f| pool.install(f));
}

#[cfg(not(feature = "parallel"))]
fn benches(c: &mut Criterion) {
    bench_all(c, "sequential", &|f| f());
}

criterion_group!(throughput, benches);
criterion_main!(throughput);
