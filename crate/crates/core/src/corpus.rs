//! Seeded random test material: nonempty polyhedra, sample points, their
//! low-support embeddings into a large ambient space, and stress runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{Halfspace, Polyhedron, Tolerances, Vector};
use crate::iteration::{Collection, RelaxationSchedule, SelectionPolicy};
use crate::projectors::Target;

pub const MAX_DIM: usize = 6;
pub const MAX_CONSTRAINTS: usize = 10;
/// Ambient dimension of the embedded corpus.
pub const EMBED_DIM: usize = 40;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_vec(rng: &mut ChaCha8Rng, d: usize, half_width: f64) -> Vec<f64> {
    (0..d)
        .map(|_| rng.gen_range(-half_width..=half_width))
        .collect()
}

fn random_normal(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    loop {
        let a = uniform_vec(rng, d, 1.0);
        if a.iter().map(|x| x * x).sum::<f64>() > 1e-2 {
            return Vector::new(a).expect("finite, nonempty");
        }
    }
}

/// `m` halfspaces `<a_i, x> <= <a_i, c0> + s_i` with `s_i ~ U(0.1, 2)`, so
/// `c0` is an interior point.
pub fn random_polyhedron(
    rng: &mut ChaCha8Rng,
    d: usize,
    m: usize,
    center_scale: f64,
) -> (Polyhedron, Vector) {
    let c0 = Vector::new(uniform_vec(rng, d, center_scale)).expect("finite, nonempty");
    let hs = (0..m)
        .map(|_| {
            let a = random_normal(rng, d);
            let beta = a.dot(&c0) + rng.gen_range(0.1..2.0);
            Halfspace::new(a, beta).expect("normal is nonzero")
        })
        .collect();
    (Polyhedron::new(d, hs).expect("dimensions agree"), c0)
}

/// Structured members with degenerate faces: a cube, a simplex, a segment
/// cut out by two opposite halfspaces and a pyramid with a redundant row.
pub fn structured_polyhedra() -> Vec<Polyhedron> {
    let cube = Polyhedron::boxed(&[0.0; 3], &[1.0; 3]).expect("valid box");
    let simplex = Polyhedron::from_rows(
        3,
        vec![
            (vec![-1.0, 0.0, 0.0], 0.0),
            (vec![0.0, -1.0, 0.0], 0.0),
            (vec![0.0, 0.0, -1.0], 0.0),
            (vec![1.0, 1.0, 1.0], 1.0),
        ],
    )
    .expect("valid rows");
    let segment = Polyhedron::from_rows(
        2,
        vec![
            (vec![1.0, 1.0], 1.0),
            (vec![-1.0, -1.0], -1.0),
            (vec![-1.0, 0.0], 0.0),
            (vec![0.0, -1.0], 0.0),
        ],
    )
    .expect("valid rows");
    let pyramid = Polyhedron::from_rows(
        3,
        vec![
            (vec![1.0, 0.0, -1.0], 0.0),
            (vec![-1.0, 0.0, -1.0], 0.0),
            (vec![0.0, 1.0, -1.0], 0.0),
            (vec![0.0, -1.0, -1.0], 0.0),
            (vec![0.0, 0.0, 1.0], 2.0),
            (vec![0.0, 0.0, 2.0], 4.0),
        ],
    )
    .expect("valid rows");
    vec![cube, simplex, segment, pyramid]
}

/// Structured members followed by random ones with `d <= 6` and at most
/// 10 constraints; `count` in total.
pub fn face_corpus(seed: u64, count: usize) -> Vec<Polyhedron> {
    let mut r = rng(seed);
    let mut out: Vec<Polyhedron> = structured_polyhedra().into_iter().take(count).collect();
    while out.len() < count {
        let d = r.gen_range(1..=MAX_DIM);
        let m = r.gen_range(1..=MAX_CONSTRAINTS);
        out.push(random_polyhedron(&mut r, d, m, 2.0).0);
    }
    out
}

/// Uniform points in `[-half_width, half_width]^d`.
pub fn random_points(rng: &mut ChaCha8Rng, d: usize, count: usize, half_width: f64) -> Vec<Vector> {
    (0..count)
        .map(|_| Vector::new(uniform_vec(rng, d, half_width)).expect("finite, nonempty"))
        .collect()
}

/// Places coordinate `j` of every normal at position `support[j]` of
/// `R^ambient`, zero elsewhere.
pub fn embed_low_support(c: &Polyhedron, ambient: usize, support: &[usize]) -> Polyhedron {
    assert_eq!(
        support.len(),
        c.ambient_dim(),
        "one position per coordinate"
    );
    assert!(support.iter().all(|&i| i < ambient), "support out of range");
    let hs = c
        .halfspaces()
        .iter()
        .map(|h| {
            let mut a = vec![0.0; ambient];
            for (&pos, &v) in support.iter().zip(h.normal().as_slice()) {
                a[pos] = v;
            }
            Halfspace::new(Vector::new(a).expect("finite"), h.offset()).expect("normal is nonzero")
        })
        .collect();
    Polyhedron::new(ambient, hs).expect("dimensions agree")
}

/// The face corpus embedded into `R^40`, each member on its own randomly
/// chosen set of coordinates.
pub fn embedded_corpus(seed: u64, count: usize) -> Vec<Polyhedron> {
    let mut r = rng(seed ^ 0x5eed);
    face_corpus(seed, count)
        .iter()
        .map(|c| {
            let support = rand::seq::index::sample(&mut r, EMBED_DIM, c.ambient_dim()).into_vec();
            embed_low_support(c, EMBED_DIM, &support)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct StressRun {
    pub collection: Collection,
    pub policy: SelectionPolicy,
    pub schedule: RelaxationSchedule,
    pub x0: Vector,
    pub n_steps: usize,
}

pub const STRESS_LAMBDA_MAX: f64 = 1.9;

/// `runs` randomized collections of at most 5 polyhedra in `d <= 6`, with
/// Farthest and RandomUniform policies alternating and `lambda` uniform on
/// `[0, 1.9]`.
pub fn stress_batch(
    seed: u64,
    runs: usize,
    n_steps: usize,
    tol: &Tolerances,
) -> Result<Vec<StressRun>> {
    let mut r = rng(seed);
    (0..runs)
        .map(|i| {
            let d = r.gen_range(2..=MAX_DIM);
            let k = r.gen_range(1..=5);
            let sets = (0..k)
                .map(|_| {
                    let m = r.gen_range(1..=MAX_DIM);
                    Target::Polyhedron(random_polyhedron(&mut r, d, m, 3.0).0)
                })
                .collect();
            let collection = Collection::new(sets, tol)?;
            let policy = if i % 2 == 0 {
                SelectionPolicy::Farthest
            } else {
                SelectionPolicy::RandomUniform { seed: r.gen() }
            };
            let schedule = RelaxationSchedule::RandomIn {
                max: STRESS_LAMBDA_MAX,
                seed: r.gen(),
            };
            let x0 = Vector::new(uniform_vec(&mut r, d, 10.0)).expect("finite, nonempty");
            Ok(StressRun {
                collection,
                policy,
                schedule,
                x0,
                n_steps,
            })
        })
        .collect()
}
