use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use relaxproj::batch::{map, map_sequential};
use relaxproj::corpus::{face_corpus, random_points, rng, stress_batch, StressRun};
use relaxproj::faces::face_of_projection;
use relaxproj::iteration::run;
use relaxproj::{Polyhedron, Tolerances, Vector};

fn stress(c: &mut Criterion) {
    let tol = Tolerances::default();
    let runs = stress_batch(7, 16, 2_000, &tol).unwrap();
    let one = |s: &StressRun| {
        run(
            &s.collection,
            &s.policy,
            &s.schedule,
            s.x0.clone(),
            s.n_steps,
            &tol,
        )
        .unwrap()
        .sup_norm()
    };
    let mut g = c.benchmark_group("stress_batch");
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("parallel", runs.len()), |b| {
        b.iter(|| map(&runs, one))
    });
    g.bench_function(BenchmarkId::new("sequential", runs.len()), |b| {
        b.iter(|| map_sequential(&runs, one))
    });
    g.finish();
}

fn face_identity(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut r = rng(2);
    let work: Vec<(Polyhedron, Vec<Vector>)> = face_corpus(1, 24)
        .into_iter()
        .map(|p| {
            let xs = random_points(&mut r, p.ambient_dim(), 100, 5.0);
            (p, xs)
        })
        .collect();
    let one = |(p, xs): &(Polyhedron, Vec<Vector>)| {
        xs.iter()
            .map(|x| {
                let (f, q) = face_of_projection(p, x, &tol).unwrap();
                f.hull().project(x).unwrap().dist(&q)
            })
            .fold(0.0, f64::max)
    };
    let mut g = c.benchmark_group("face_identity_corpus");
    g.bench_function("parallel", |b| b.iter(|| map(&work, one)));
    g.bench_function("sequential", |b| b.iter(|| map_sequential(&work, one)));
    g.finish();
}

criterion_group!(benches, stress, face_identity);
criterion_main!(benches);
