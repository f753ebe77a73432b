//! The orbit engine `x_{n+1} = (1 - lambda_n) x_n + lambda_n P_{S_n} x_n`
//! with pluggable set selection and relaxation schedules, plus diagnostics.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffineSubspace, Halfspace, Tolerances, Vector};
use crate::projectors::{project_polyhedron, ConstraintSystem, EpiExp, Target};
use crate::scalar_reflect::{fmt17, LambdaSchedule};

/// Identifier of the generator behind every randomized policy and schedule.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Above this many constraints the feasibility sweep in [`fejer_check`] is
/// skipped and a common point has to be supplied.
pub const SWEEP_CAP: usize = 24;

#[derive(Debug, Clone)]
pub struct Collection {
    sets: Vec<Target>,
    ambient_dim: usize,
}

impl Collection {
    /// Every polyhedron is checked for nonemptiness.
    pub fn new(sets: Vec<Target>, tol: &Tolerances) -> Result<Self> {
        let Some(first) = sets.first() else {
            return Err(Error::EmptyCollection);
        };
        let ambient_dim = first.ambient_dim();
        for s in &sets {
            if s.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: s.ambient_dim(),
                });
            }
            if let Target::Polyhedron(c) = s {
                project_polyhedron(c, &Vector::zeros(ambient_dim), tol)?;
            }
        }
        Ok(Self { sets, ambient_dim })
    }

    pub fn sets(&self) -> &[Target] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectionPolicy {
    Cyclic,
    RandomUniform {
        seed: u64,
    },
    /// The set maximizing `||x - P_S x||`; ties go to the lowest index.
    Farthest,
    /// Explicit indices, repeated periodically.
    Scripted {
        indices: Vec<usize>,
    },
}

impl SelectionPolicy {
    pub fn validate(&self, n_sets: usize) -> Result<()> {
        if let SelectionPolicy::Scripted { indices } = self {
            if indices.is_empty() {
                return Err(Error::InvalidPolicy("scripted index list is empty".into()));
            }
            if let Some(&i) = indices.iter().find(|&&i| i >= n_sets) {
                return Err(Error::InvalidPolicy(format!(
                    "index {i} out of range for {n_sets} sets"
                )));
            }
        }
        Ok(())
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, SelectionPolicy::RandomUniform { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelaxationSchedule {
    Constant {
        lambda: f64,
    },
    /// Explicit values, repeated periodically.
    Sequence {
        values: Vec<f64>,
    },
    Formula {
        schedule: LambdaSchedule,
    },
    /// Uniform on `[0, max]`.
    RandomIn {
        max: f64,
        seed: u64,
    },
}

impl RelaxationSchedule {
    /// Checks the values used by a run of `n_steps`.
    pub fn validate(&self, n_steps: usize) -> Result<()> {
        let in_range = |l: f64| (0.0..=2.0).contains(&l);
        match self {
            RelaxationSchedule::Constant { lambda } if !in_range(*lambda) => {
                Err(Error::LambdaOutOfRange(*lambda))
            }
            RelaxationSchedule::Sequence { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidSchedule("sequence is empty".into()));
                }
                match values.iter().find(|l| !in_range(**l)) {
                    Some(&l) => Err(Error::LambdaOutOfRange(l)),
                    None => Ok(()),
                }
            }
            RelaxationSchedule::Formula { schedule } => schedule.validate(n_steps),
            RelaxationSchedule::RandomIn { max, .. } if !in_range(*max) => {
                Err(Error::LambdaOutOfRange(*max))
            }
            _ => Ok(()),
        }
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, RelaxationSchedule::RandomIn { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pick {
    pub set: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub iterates: Vec<Vector>,
    pub norms: Vec<f64>,
    /// `picks[n]` produced `iterates[n + 1]`.
    pub picks: Vec<Pick>,
    pub running_max: Vec<f64>,
    pub norms_nonincreasing: bool,
    pub norms_nondecreasing: bool,
    pub rng: &'static str,
}

impl Trajectory {
    fn start(x0: Vector, capacity: usize) -> Self {
        let n0 = x0.norm();
        let mut iterates = Vec::with_capacity(capacity + 1);
        iterates.push(x0);
        Self {
            iterates,
            norms: vec![n0],
            picks: Vec::with_capacity(capacity),
            running_max: vec![n0],
            norms_nonincreasing: true,
            norms_nondecreasing: true,
            rng: RNG_ALGORITHM,
        }
    }

    fn push(&mut self, x: Vector, pick: Pick) {
        let n = x.norm();
        let prev = *self.norms.last().expect("trajectory starts nonempty");
        self.norms_nonincreasing &= n <= prev;
        self.norms_nondecreasing &= n >= prev;
        let m = self.running_max.last().copied().unwrap_or(0.0).max(n);
        self.running_max.push(m);
        self.norms.push(n);
        self.iterates.push(x);
        self.picks.push(pick);
    }

    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn last(&self) -> &Vector {
        self.iterates.last().expect("trajectory starts nonempty")
    }

    pub fn sup_norm(&self) -> f64 {
        self.running_max.last().copied().unwrap_or(0.0)
    }

    /// Columns `n, x_1..x_d, norm, set_index, lambda`; row 0 has no pick.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let d = self.iterates[0].dim();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["n".to_string()];
        header.extend((1..=d).map(|i| format!("x_{i}")));
        header.extend(["norm", "set_index", "lambda"].map(String::from));
        w.write_record(&header)?;
        for (n, (x, norm)) in self.iterates.iter().zip(&self.norms).enumerate() {
            let mut row = Vec::with_capacity(d + 4);
            row.push(n.to_string());
            row.extend(x.as_slice().iter().map(|c| fmt17(*c)));
            row.push(fmt17(*norm));
            match n.checked_sub(1).map(|k| self.picks[k]) {
                Some(p) => {
                    row.push(p.set.to_string());
                    row.push(fmt17(p.lambda));
                }
                None => row.extend([String::new(), String::new()]),
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `n_steps` relaxed projections from `x0`.
pub fn run(
    c: &Collection,
    policy: &SelectionPolicy,
    sched: &RelaxationSchedule,
    x0: Vector,
    n_steps: usize,
    tol: &Tolerances,
) -> Result<Trajectory> {
    x0.check_dim(c.ambient_dim())?;
    policy.validate(c.len())?;
    sched.validate(n_steps)?;

    let mut policy_rng = match policy {
        SelectionPolicy::RandomUniform { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut sched_rng = match sched {
        RelaxationSchedule::RandomIn { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };

    let mut t = Trajectory::start(x0, n_steps);
    for n in 0..n_steps {
        let x = t.last();
        let (set, p) = match policy {
            SelectionPolicy::Cyclic => (n % c.len(), None),
            SelectionPolicy::RandomUniform { .. } => {
                let rng = policy_rng.as_mut().expect("seeded above");
                (rng.gen_range(0..c.len()), None)
            }
            SelectionPolicy::Scripted { indices } => (indices[n % indices.len()], None),
            SelectionPolicy::Farthest => {
                let mut best: Option<(usize, f64, Vector)> = None;
                for (i, s) in c.sets().iter().enumerate() {
                    let p = s.project(x, tol)?;
                    let dist = x.dist(&p);
                    if best.as_ref().is_none_or(|(_, d, _)| dist > *d) {
                        best = Some((i, dist, p));
                    }
                }
                let (i, _, p) = best.expect("collection is nonempty");
                (i, Some(p))
            }
        };
        let lambda = match sched {
            RelaxationSchedule::Constant { lambda } => *lambda,
            RelaxationSchedule::Sequence { values } => values[n % values.len()],
            RelaxationSchedule::Formula { schedule } => schedule.lambda(n),
            RelaxationSchedule::RandomIn { max, .. } => {
                let rng = sched_rng.as_mut().expect("seeded above");
                rng.gen::<f64>() * max
            }
        };
        let next = if lambda == 0.0 {
            x.clone()
        } else {
            let p = match p {
                Some(p) => p,
                None => c.sets()[set].project(x, tol)?,
            };
            x.relax_toward(&p, lambda)
        };
        if !next.is_finite() {
            let index = next
                .as_slice()
                .iter()
                .position(|v| !v.is_finite())
                .unwrap_or(0);
            return Err(Error::NonFinite { index });
        }
        t.push(next, Pick { set, lambda });
    }
    Ok(t)
}

/// Thresholds of the growth heuristic in [`boundedness_report`].
pub mod growth {
    /// Trailing-window max over first-window max.
    pub const MIN_RATIO: f64 = 1.25;
    /// Number of consecutive sub-windows of the trailing half whose maxima
    /// must increase strictly.
    pub const SUB_WINDOWS: usize = 4;
    /// Least-squares slope of `ln ||x_n||` against `ln(n + 1)` over the
    /// trailing half.
    pub const MIN_LOG_LOG_SLOPE: f64 = 0.01;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Stable,
    Growing,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "STABLE",
            Verdict::Growing => "GROWING",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub sup_norm: f64,
    pub first_window_max: f64,
    pub trailing_window_max: f64,
    pub sub_window_maxima: Vec<f64>,
    pub log_log_slope: f64,
    pub verdict: Verdict,
}

/// Sup norms and a GROWING/STABLE verdict. GROWING needs all of: the
/// trailing window max at least [`growth::MIN_RATIO`] times the first window
/// max, strictly increasing maxima over [`growth::SUB_WINDOWS`] consecutive
/// pieces of the trailing half, and a log-log slope above
/// [`growth::MIN_LOG_LOG_SLOPE`].
pub fn boundedness_report(t: &Trajectory, window: usize) -> BoundednessReport {
    let norms = &t.norms;
    let len = norms.len();
    let w = window.clamp(1, len);
    let max_of = |s: &[f64]| s.iter().copied().fold(0.0_f64, f64::max);
    let first_window_max = max_of(&norms[..w]);
    let trailing_window_max = max_of(&norms[len - w..]);

    let half = &norms[len / 2..];
    let sub_window_maxima: Vec<f64> = if half.len() >= growth::SUB_WINDOWS {
        let chunk = half.len() / growth::SUB_WINDOWS;
        let tail = &half[half.len() - chunk * growth::SUB_WINDOWS..];
        tail.chunks(chunk).map(max_of).collect()
    } else {
        Vec::new()
    };
    let increasing =
        !sub_window_maxima.is_empty() && sub_window_maxima.windows(2).all(|p| p[1] > p[0]);

    let log_log_slope = {
        let pts: Vec<(f64, f64)> = (len / 2..len)
            .filter(|&n| norms[n] > 0.0)
            .map(|n| (((n + 1) as f64).ln(), norms[n].ln()))
            .collect();
        slope(&pts)
    };

    let ratio_ok = if first_window_max > 0.0 {
        trailing_window_max >= growth::MIN_RATIO * first_window_max
    } else {
        trailing_window_max > 0.0
    };
    let verdict = if ratio_ok && increasing && log_log_slope > growth::MIN_LOG_LOG_SLOPE {
        Verdict::Growing
    } else {
        Verdict::Stable
    };
    BoundednessReport {
        sup_norm: t.sup_norm(),
        first_window_max,
        trailing_window_max,
        sub_window_maxima,
        log_log_slope,
        verdict,
    }
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FejerReport {
    pub z: Vec<f64>,
    /// Steps `n` with `||x_{n+1} - z|| > ||x_n - z|| + tau`.
    pub violations: Vec<usize>,
    pub max_excess: f64,
    pub distances: Vec<f64>,
}

impl FejerReport {
    pub fn monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A point in every set of the collection, found by projecting the origin
/// onto the intersection of all linear constraints.
pub fn common_point(c: &Collection, tol: &Tolerances) -> Result<Vector> {
    let mut halfspaces: Vec<Halfspace> = Vec::new();
    let mut equalities: Vec<(Vector, f64)> = Vec::new();
    for s in c.sets() {
        match s {
            Target::Affine(a) => equalities.extend(a.to_equalities(tol)),
            Target::Polyhedron(p) => halfspaces.extend(p.halfspaces().iter().cloned()),
            Target::EpiExp => {
                return Err(Error::NotApplicable(
                    "feasibility sweep cannot handle epi(exp)".into(),
                ))
            }
        }
    }
    if halfspaces.len() > SWEEP_CAP {
        return Err(Error::NotApplicable(format!(
            "{} constraints exceed the sweep cap of {SWEEP_CAP}",
            halfspaces.len()
        )));
    }
    ConstraintSystem::new(&halfspaces, &[], &equalities)
        .project(&Vector::zeros(c.ambient_dim()), tol)?
        .ok_or_else(|| Error::NotApplicable("sets have no common point".into()))
}

fn in_target(s: &Target, z: &Vector, tol: &Tolerances) -> Result<bool> {
    let slack = tol.feas * (1.0 + z.norm());
    Ok(match s {
        Target::Affine(a) => a.distance(z)? <= slack,
        Target::Polyhedron(p) => p.contains(z, slack),
        Target::EpiExp => EpiExp.contains(z, slack),
    })
}

/// Checks `||x_{n+1} - z|| <= ||x_n - z|| + tau_feas (1 + ||x_n - z||)` along
/// the run, with `z` supplied or found by [`common_point`].
pub fn fejer_check(
    t: &Trajectory,
    c: &Collection,
    z: Option<&Vector>,
    tol: &Tolerances,
) -> Result<FejerReport> {
    let z = match z {
        Some(z) => {
            z.check_dim(c.ambient_dim())?;
            for s in c.sets() {
                if !in_target(s, z, tol)? {
                    return Err(Error::NotApplicable(
                        "supplied point is not common to all sets".into(),
                    ));
                }
            }
            z.clone()
        }
        None => common_point(c, tol)?,
    };
    let distances: Vec<f64> = t.iterates.iter().map(|x| x.dist(&z)).collect();
    let mut violations = Vec::new();
    let mut max_excess = f64::NEG_INFINITY;
    for (n, p) in distances.windows(2).enumerate() {
        let excess = p[1] - p[0];
        max_excess = max_excess.max(excess);
        if excess > tol.feas * (1.0 + p[0]) {
            violations.push(n);
        }
    }
    Ok(FejerReport {
        z: z.into_inner(),
        violations,
        max_excess: if distances.len() < 2 { 0.0 } else { max_excess },
        distances,
    })
}

/// The collection `{R x {0}, epi(exp)}` in the plane.
pub fn line_epiexp_collection(tol: &Tolerances) -> Result<Collection> {
    let axis = AffineSubspace::line(Vector::zeros(2), &Vector::unit(2, 0), tol)?;
    Collection::new(vec![Target::Affine(axis), Target::EpiExp], tol)
}

/// Alternating projections, first onto the horizontal axis, then onto
/// `epi(exp)`.
pub fn divergence_experiment_line_epiexp(
    x0: Vector,
    n_steps: usize,
    tol: &Tolerances,
) -> Result<Trajectory> {
    x0.check_dim(2)?;
    let c = line_epiexp_collection(tol)?;
    run(
        &c,
        &SelectionPolicy::Cyclic,
        &RelaxationSchedule::Constant { lambda: 1.0 },
        x0,
        n_steps,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polyhedron;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn axes(tol: &Tolerances) -> Collection {
        let x = AffineSubspace::line(v(&[0.0, 0.0]), &v(&[1.0, 0.0]), tol).unwrap();
        let y = AffineSubspace::line(v(&[0.0, 0.0]), &v(&[0.0, 1.0]), tol).unwrap();
        Collection::new(vec![x.into(), y.into()], tol).unwrap()
    }

    const ONE: RelaxationSchedule = RelaxationSchedule::Constant { lambda: 1.0 };

    #[test]
    fn zero_steps() {
        let tol = Tolerances::default();
        let t = run(
            &axes(&tol),
            &SelectionPolicy::Cyclic,
            &ONE,
            v(&[3.0, 5.0]),
            0,
            &tol,
        )
        .unwrap();
        assert_eq!(t.iterates, vec![v(&[3.0, 5.0])]);
        assert!(t.picks.is_empty());
    }

    #[test]
    fn two_axes_by_hand() {
        let tol = Tolerances::default();
        let t = run(
            &axes(&tol),
            &SelectionPolicy::Cyclic,
            &ONE,
            v(&[3.0, 5.0]),
            4,
            &tol,
        )
        .unwrap();
        let want = [[3.0, 5.0], [3.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]];
        for (x, w) in t.iterates.iter().zip(want) {
            assert_eq!(x.as_slice(), &w);
        }
        assert_eq!(
            t.picks.iter().map(|p| p.set).collect::<Vec<_>>(),
            vec![0, 1, 0, 1]
        );
        assert!(t.norms_nonincreasing);
        assert_eq!(t.sup_norm(), 34f64.sqrt());
    }

    #[test]
    fn single_set_is_constant_after_one_step() {
        let tol = Tolerances::default();
        let c = Collection::new(
            vec![Polyhedron::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap().into()],
            &tol,
        )
        .unwrap();
        let t = run(
            &c,
            &SelectionPolicy::Farthest,
            &ONE,
            v(&[4.0, -2.0]),
            5,
            &tol,
        )
        .unwrap();
        for x in &t.iterates[1..] {
            assert_eq!(x, &t.iterates[1]);
        }
    }

    #[test]
    fn zero_lambda_keeps_iterate() {
        let tol = Tolerances::default();
        let sched = RelaxationSchedule::Sequence {
            values: vec![0.0, 1.0],
        };
        let t = run(
            &axes(&tol),
            &SelectionPolicy::Cyclic,
            &sched,
            v(&[3.0, 5.0]),
            4,
            &tol,
        )
        .unwrap();
        assert_eq!(t.iterates[1], t.iterates[0]);
        assert_eq!(t.iterates[2].as_slice(), &[0.0, 5.0]);
        assert_eq!(t.iterates[3], t.iterates[2]);
    }

    #[test]
    fn seeded_runs_repeat() {
        let tol = Tolerances::default();
        let pol = SelectionPolicy::RandomUniform { seed: 11 };
        let sched = RelaxationSchedule::RandomIn { max: 1.9, seed: 12 };
        let a = run(&axes(&tol), &pol, &sched, v(&[3.0, 5.0]), 50, &tol).unwrap();
        let b = run(&axes(&tol), &pol, &sched, v(&[3.0, 5.0]), 50, &tol).unwrap();
        assert_eq!(a, b);
        assert!(a.picks.iter().all(|p| (0.0..=1.9).contains(&p.lambda)));
    }

    #[test]
    fn farthest_picks_the_far_set() {
        let tol = Tolerances::default();
        let t = run(
            &axes(&tol),
            &SelectionPolicy::Farthest,
            &ONE,
            v(&[3.0, 5.0]),
            1,
            &tol,
        )
        .unwrap();
        // distance to the x-axis is 5, to the y-axis 3
        assert_eq!(t.picks[0].set, 0);
        let t = run(
            &axes(&tol),
            &SelectionPolicy::Farthest,
            &ONE,
            v(&[2.0, 2.0]),
            1,
            &tol,
        )
        .unwrap();
        assert_eq!(t.picks[0].set, 0);
    }

    #[test]
    fn invalid_inputs() {
        let tol = Tolerances::default();
        let c = axes(&tol);
        let x0 = v(&[1.0, 1.0]);
        let bad = RelaxationSchedule::Constant { lambda: 2.5 };
        assert_eq!(
            run(&c, &SelectionPolicy::Cyclic, &bad, x0.clone(), 3, &tol).unwrap_err(),
            Error::LambdaOutOfRange(2.5)
        );
        let script = SelectionPolicy::Scripted {
            indices: vec![0, 2],
        };
        assert!(matches!(
            run(&c, &script, &ONE, x0.clone(), 3, &tol).unwrap_err(),
            Error::InvalidPolicy(_)
        ));
        assert!(matches!(
            run(&c, &SelectionPolicy::Cyclic, &ONE, v(&[1.0]), 3, &tol).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
        assert_eq!(
            Collection::new(vec![], &tol).unwrap_err(),
            Error::EmptyCollection
        );
        let empty = Polyhedron::from_rows(1, vec![(vec![1.0], 0.0), (vec![-1.0], -1.0)]).unwrap();
        assert_eq!(
            Collection::new(vec![empty.into()], &tol).unwrap_err(),
            Error::EmptyPolyhedron
        );
    }

    #[test]
    fn constant_trajectory_is_stable() {
        let tol = Tolerances::default();
        let t = run(
            &axes(&tol),
            &SelectionPolicy::Cyclic,
            &ONE,
            v(&[0.0, 0.0]),
            100,
            &tol,
        )
        .unwrap();
        let r = boundedness_report(&t, 10);
        assert_eq!(r.verdict, Verdict::Stable);
        assert_eq!(r.log_log_slope, 0.0);
    }

    #[test]
    fn line_epiexp_grows() {
        let tol = Tolerances::default();
        let t = divergence_experiment_line_epiexp(v(&[0.0, 0.0]), 2000, &tol).unwrap();
        let r = boundedness_report(&t, 200);
        assert_eq!(r.verdict, Verdict::Growing, "{r:?}");
        for w in t.iterates[10..].windows(2) {
            assert!(w[1][0] <= w[0][0]);
        }
    }

    #[test]
    fn line_epiexp_far_left_drifts() {
        // the drift per step is about exp(2 x_1), so from -10 the norm barely moves
        let tol = Tolerances::default();
        let t = divergence_experiment_line_epiexp(v(&[-10.0, 0.0]), 2000, &tol).unwrap();
        for w in t.iterates[1..].windows(2) {
            assert!(w[1][0] <= w[0][0]);
        }
        for n in (2..t.len() - 2).step_by(2) {
            assert!(t.norms[n + 2] > t.norms[n]);
        }
    }

    #[test]
    fn fejer_two_lines_random_relaxation() {
        let tol = Tolerances::default();
        let c = Collection::new(
            vec![
                AffineSubspace::line(v(&[0.0, 0.0]), &v(&[1.0, 2.0]), &tol)
                    .unwrap()
                    .into(),
                AffineSubspace::line(v(&[0.0, 0.0]), &v(&[3.0, -1.0]), &tol)
                    .unwrap()
                    .into(),
            ],
            &tol,
        )
        .unwrap();
        let sched = RelaxationSchedule::RandomIn { max: 2.0, seed: 5 };
        let t = run(
            &c,
            &SelectionPolicy::Cyclic,
            &sched,
            v(&[4.0, -7.0]),
            300,
            &tol,
        )
        .unwrap();
        let rep = fejer_check(&t, &c, None, &tol).unwrap();
        assert!(rep.monotone(), "{rep:?}");
        assert!(rep.z.iter().all(|z| z.abs() < 1e-12));
    }

    #[test]
    fn fejer_singleton_collapses() {
        let tol = Tolerances::default();
        let p = v(&[1.0, -2.0]);
        let c = Collection::new(vec![AffineSubspace::singleton(p.clone()).into()], &tol).unwrap();
        let t = run(&c, &SelectionPolicy::Cyclic, &ONE, v(&[5.0, 5.0]), 3, &tol).unwrap();
        let rep = fejer_check(&t, &c, Some(&p), &tol).unwrap();
        assert!(rep.monotone());
        assert!(rep.distances[1..].iter().all(|&d| d == 0.0));
    }

    #[test]
    fn fejer_not_applicable() {
        let tol = Tolerances::default();
        let c = line_epiexp_collection(&tol).unwrap();
        let t = divergence_experiment_line_epiexp(v(&[0.0, 0.0]), 4, &tol).unwrap();
        assert!(matches!(
            fejer_check(&t, &c, None, &tol),
            Err(Error::NotApplicable(_))
        ));
        let disjoint = Collection::new(
            vec![
                AffineSubspace::singleton(v(&[0.0])).into(),
                AffineSubspace::singleton(v(&[1.0])).into(),
            ],
            &tol,
        )
        .unwrap();
        let t = run(
            &disjoint,
            &SelectionPolicy::Cyclic,
            &ONE,
            v(&[0.5]),
            4,
            &tol,
        )
        .unwrap();
        assert!(matches!(
            fejer_check(&t, &disjoint, None, &tol),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let tol = Tolerances::default();
        let t = run(
            &axes(&tol),
            &SelectionPolicy::Cyclic,
            &ONE,
            v(&[3.0, 5.0]),
            2,
            &tol,
        )
        .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,x_1,x_2,norm,set_index,lambda");
        assert!(lines[1].ends_with(",,"));
        assert!(lines[2]
            .starts_with("1,3.0000000000000000e0,0.0000000000000000e0,3.0000000000000000e0,0,"));
    }
}
