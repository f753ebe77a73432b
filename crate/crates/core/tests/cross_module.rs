use relaxproj::corpus::{embedded_corpus, face_corpus, random_points, random_polyhedron, rng};
use relaxproj::decomposition::{
    common_kernel, orbit_decomposition, project_via_split, split, KChoice,
};
use relaxproj::faces::{enumerate_faces, face_of_projection, partition_check};
use relaxproj::iteration::{fejer_check, run, Collection, RelaxationSchedule, SelectionPolicy};
use relaxproj::projectors::{project_polyhedron, Target};
use relaxproj::{Halfspace, Polyhedron, Tolerances, Vector};

#[test]
fn face_identity_over_corpus() {
    let tol = Tolerances::default();
    let mut r = rng(21);
    for c in face_corpus(20, 20) {
        for x in random_points(&mut r, c.ambient_dim(), 50, 6.0) {
            let (f, p) = face_of_projection(&c, &x, &tol).unwrap();
            assert!(f.hull().project(&x).unwrap().dist(&p) <= 10.0 * tol.feas);
        }
    }
}

#[test]
fn faces_partition_corpus_members() {
    let tol = Tolerances::default();
    let mut r = rng(22);
    for c in face_corpus(23, 12) {
        let samples: Vec<Vector> = random_points(&mut r, c.ambient_dim(), 40, 4.0)
            .into_iter()
            .map(|x| project_polyhedron(&c, &x, &tol).unwrap().0)
            .collect();
        let rep = partition_check(&c, &samples, &tol).unwrap();
        assert!(rep.violations.is_empty(), "{rep:?}");
    }
}

#[test]
fn minimal_faces_match_lattice() {
    let tol = Tolerances::default();
    let mut r = rng(24);
    for c in face_corpus(25, 12) {
        let lattice = enumerate_faces(&c, &tol).unwrap();
        for x in random_points(&mut r, c.ambient_dim(), 30, 4.0) {
            let (f, _) = face_of_projection(&c, &x, &tol).unwrap();
            assert!(lattice.find(f.active()).is_some());
        }
    }
}

#[test]
fn splitting_over_embedded_corpus() {
    let tol = Tolerances::default();
    let mut r = rng(26);
    let cs = embedded_corpus(27, 20);
    for c in &cs {
        let s = split(c, KChoice::Auto, &tol).unwrap();
        assert!(s.kperp_basis().len() <= c.len());
        for k in s.kernel().basis() {
            for h in c.halfspaces() {
                assert!(h.normal().dot(k).abs() < 1e-12);
            }
        }
        for x in random_points(&mut r, 40, 20, 5.0) {
            let direct = project_polyhedron(c, &x, &tol).unwrap().0;
            assert!(direct.dist(&project_via_split(&s, &x, &tol).unwrap()) <= 10.0 * tol.feas);
        }
    }
    let k = common_kernel(&cs[..3], &tol).unwrap();
    for c in &cs[..3] {
        for b in k.basis() {
            for h in c.halfspaces() {
                assert!(h.normal().dot(b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn orbit_decomposition_on_embedded_collection() {
    let tol = Tolerances::default();
    let cs = embedded_corpus(28, 8);
    let x0 = random_points(&mut rng(29), 40, 1, 5.0).pop().unwrap();
    for policy in [
        SelectionPolicy::Cyclic,
        SelectionPolicy::RandomUniform { seed: 3 },
    ] {
        let sched = RelaxationSchedule::RandomIn { max: 1.9, seed: 4 };
        let cmp = orbit_decomposition(&cs[4..8], &policy, &sched, &x0, 200, &tol).unwrap();
        assert_eq!(cmp.gaps.len(), 201);
        assert!(cmp.max_gap() <= 10.0 * tol.feas, "{}", cmp.max_gap());
    }
}

#[test]
fn fejer_with_forced_common_point() {
    let tol = Tolerances::default();
    let mut r = rng(30);
    let z = Vector::new(vec![0.5, -1.0, 2.0, 0.25]).unwrap();
    let sets: Vec<Target> = (0..4)
        .map(|_| {
            let (c, _) = random_polyhedron(&mut r, 4, 5, 2.0);
            // shift every row so that z sits on or inside each boundary
            let hs = c
                .halfspaces()
                .iter()
                .map(|h| {
                    Halfspace::new(
                        h.normal().clone(),
                        h.normal().dot(&z) + 0.5 * (h.slack(&z) * h.normal_norm()).max(0.0),
                    )
                    .unwrap()
                })
                .collect();
            Target::Polyhedron(Polyhedron::new(4, hs).unwrap())
        })
        .collect();
    let c = Collection::new(sets, &tol).unwrap();
    let x0 = Vector::new(vec![9.0, -7.0, 3.0, 5.0]).unwrap();
    let sched = RelaxationSchedule::RandomIn { max: 2.0, seed: 31 };
    let t = run(
        &c,
        &SelectionPolicy::RandomUniform { seed: 32 },
        &sched,
        x0,
        500,
        &tol,
    )
    .unwrap();
    let rep = fejer_check(&t, &c, Some(&z), &tol).unwrap();
    assert!(rep.monotone(), "{:?}", rep.violations);
}
