use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use biharm_core::campaign::{build_field, place_pole, DomainKind, FieldChoice, PolePlacement};
use biharm_core::identities::{self, IdentityId};
use biharm_core::jets::{JetField, JetOrder, DEFAULT_FIELD_DEGREE_CAP};
use biharm_core::solver::{self, Backend, ExactData, SolveOptions};
use biharm_core::{Polygon2D, SampleBudget};

fn jets(c: &mut Criterion) {
    let d = DomainKind::Simplex.build(8).unwrap();
    let u = build_field(&d, &FieldChoice::Default, 24).unwrap();
    let x = vec![0.1; 8];
    c.bench_function("jet/simplex8/second", |b| b.iter(|| black_box(u.jet(black_box(&x), JetOrder::Second))));
    c.bench_function("jet/simplex8/fourth", |b| b.iter(|| black_box(u.jet(black_box(&x), JetOrder::Fourth))));
}

fn identity(c: &mut Criterion) {
    let budget = SampleBudget::default();
    let mut g = c.benchmark_group("identity");
    g.sample_size(10);
    for (kind, n) in [(DomainKind::Ball, 4), (DomainKind::Simplex, 4)] {
        let d = kind.build(n).unwrap();
        let u = build_field(&d, &FieldChoice::Default, DEFAULT_FIELD_DEGREE_CAP).unwrap();
        for pole in [PolePlacement::Exterior, PolePlacement::Boundary] {
            let y = place_pole(&d, pole).unwrap();
            let name = format!("{kind:?}{n}/{pole:?}/all");
            g.bench_function(name, |b| b.iter(|| identities::evaluate_many(&IdentityId::ALL, &d, &u, &y, 1.0, &budget).unwrap()));
        }
    }
    g.finish();
}

fn plate(c: &mut Criterion) {
    let u = solver::manufactured_cubic();
    let poly = Polygon2D::l_shape();
    let mut g = c.benchmark_group("solve/l-shape/h=1_32");
    g.sample_size(10);
    for backend in [Backend::Cg, Backend::Banded] {
        let opts = SolveOptions { backend, ..Default::default() };
        g.bench_function(format!("{backend:?}"), |b| b.iter(|| solver::solve_polygon(&poly, 1.0 / 32.0, &ExactData(&u), &opts).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, jets, identity, plate);
criterion_main!(benches);
