use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use korovkin::domain::{BoxRegion, Domain};
use korovkin::function::VectorFunction;
use korovkin::modulus::{ModulusProfile, Norm};
use korovkin::operators::{make_bernstein, make_tensor, OperatorPair};
use korovkin::par::Execution;

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn mixed() -> VectorFunction {
    VectorFunction::new("mixed", 2, |u| vec![(u[0] + 2.0 * u[1]).sin(), (u[0] - 0.5).abs() * u[1]]).unwrap()
}

fn modulus_profile(c: &mut Criterion) {
    let f = mixed();
    let mut group = c.benchmark_group("modulus_profile_61x61");
    for mode in MODES {
        let grid = BoxRegion::cube(2, 0.0, 1.0).unwrap().grid(61).unwrap().with_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(format!("{mode:?}")), |b| {
            b.iter(|| ModulusProfile::new(black_box(&f), &grid, Norm::Euclidean, Some(0.2)).unwrap())
        });
    }
    group.finish();
}

fn operator_sweep(c: &mut Criterion) {
    let f = mixed();
    let pair = OperatorPair::new(
        make_tensor(&make_bernstein(60).unwrap(), 2).unwrap(),
        Domain::bounded(BoxRegion::cube(2, 0.0, 1.0).unwrap()),
    )
    .unwrap();
    let points = BoxRegion::cube(2, 0.05, 0.95).unwrap().grid(31).unwrap().points();
    let mut group = c.benchmark_group("tensor_bernstein_60_sweep");
    group.sample_size(10);
    for mode in MODES {
        group.bench_function(BenchmarkId::from_parameter(format!("{mode:?}")), |b| {
            b.iter(|| {
                mode.try_map(&points, |t| {
                    let lf = pair.apply_l(&f, t)?;
                    let ft = f.eval(t);
                    Ok::<f64, korovkin::Error>(lf.iter().zip(&ft).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                })
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, modulus_profile, operator_sweep);
criterion_main!(benches);
