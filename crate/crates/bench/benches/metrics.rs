use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use shockfront::harness::ExactWedge;
use shockfront::metrics::{w1_between, winf_between, wp_between, StepProfile};
use shockfront::piecewise::{project_to_grid, PiecewiseConstantFn};
use shockfront::{DistanceReport, Evolution};

fn ramp(cells: usize, shift: f64) -> PiecewiseConstantFn {
    let dx = 1.0 / cells as f64;
    let values: Vec<f64> = (0..cells).map(|i| (2 * i + 1) as f64 * dx).collect();
    PiecewiseConstantFn::from_cells(shift, dx, values).unwrap()
}

fn exact_step_distances(c: &mut Criterion) {
    let mut group = c.benchmark_group("distance_report");
    for n in [256, 4096, 65536] {
        let (u, v) = (ramp(n, 0.0), ramp(n / 2, 0.01));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| DistanceReport::compute(black_box(&u), black_box(&v), &[1.0, 2.0, 4.0, f64::INFINITY]).unwrap())
        });
    }
    group.finish();
}

fn against_exact_profile(c: &mut Criterion) {
    let exact = ExactWedge.profile_at(0.5).unwrap();
    let wedge = project_to_grid(&ramp(4096, 0.0), 1.0 / 256.0).unwrap();
    let approx = StepProfile::new(wedge);
    let mut group = c.benchmark_group("wedge_profile_256_cells");
    group.sample_size(20);
    group.bench_function("w1", |b| b.iter(|| w1_between(&*exact, &approx).unwrap()));
    group.bench_function("w2", |b| b.iter(|| wp_between(&*exact, &approx, 2.0).unwrap()));
    group.bench_function("winf", |b| b.iter(|| winf_between(&*exact, &approx).unwrap()));
    group.finish();
}

criterion_group!(benches, exact_step_distances, against_exact_profile);
criterion_main!(benches);
