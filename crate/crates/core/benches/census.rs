use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pfaff_census::census::{census, CensusOptions, CurveKind, CurveSpec, Family, Parallelism};
use pfaff_census::monomial::PlaneCurve;
use pfaff_census::pfaffian::{ChainKind, PfaffianChain, PfaffianFunction, Poly};
use pfaff_census::rational::{int, HeightBound};

fn specs() -> Vec<(CurveSpec, u64)> {
    let mordell = PlaneCurve::from_int_terms(&[(0, 2, 1), (3, 0, -1), (0, 0, 2)]).unwrap();
    let chain = std::sync::Arc::new(PfaffianChain::new(ChainKind::Pow(int(2))));
    let pow2 = PfaffianFunction::from_poly(chain, Poly::var(2, 1)).unwrap();
    vec![
        (CurveSpec::new("mordell", CurveKind::Algebraic(mordell)), 300),
        (CurveSpec::new("pow2-numeric", CurveKind::PfaffNumeric(pow2)), 40),
        (CurveSpec::new("sqrt", CurveKind::PfaffExact(Family::Root(pfaff_census::rational::rat(1, 2)))), 100_000),
    ]
}

fn bench(c: &mut Criterion) {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).max(2);
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    for (spec, h) in specs() {
        let h = HeightBound::new(h).unwrap();
        for (label, par) in [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Threads(threads))] {
            let opts = CensusOptions { parallelism: par, keep_points: false, ..CensusOptions::default() };
            group.bench_with_input(BenchmarkId::new(label, &spec.id), &h, |b, &h| {
                b.iter(|| black_box(census(&spec, h, &opts).unwrap().n))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
