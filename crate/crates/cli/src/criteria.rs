//! The acceptance criteria, each a self-contained measurement with its
//! thresholds pinned here.

use std::fmt;
use std::time::Instant;

use relaxproj::batch;
use relaxproj::corpus;
use relaxproj::iteration::divergence_experiment_line_epiexp;
use relaxproj::scalar_reflect::{
    classify_sequence, iterate_scalar, summability_relation, Decay, DerivedSequences,
    LambdaSchedule, Regime, ScalarProblem,
};
use relaxproj::{Tolerances, Vector};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bundled;
use crate::config::{
    Experiment, ExperimentConfig, FacesParams, Overrides, SplitParams, StressParams,
};
use crate::experiment::{block_maxima, run_experiment};

pub const FACE_SEED: u64 = 1;
pub const FACE_POLYHEDRA: usize = 24;
pub const FACE_POINTS: usize = 100;
pub const FACE_GAP_MAX: f64 = 1e-8;
pub const FACE_SECONDS_MAX: f64 = 60.0;
pub const HALF_WIDTH: f64 = 5.0;

pub const SPLIT_SEED: u64 = 1;
pub const SPLIT_POINTS: usize = 100;
pub const SPLIT_GAP_MAX: f64 = 1e-8;
pub const ORBIT_GROUP: usize = 4;
pub const ORBIT_STEPS: usize = 200;
pub const ORBIT_GAP_MAX: f64 = 1e-7;

pub const STRESS_SEED: u64 = 7;
pub const STRESS_RUNS: usize = 50;
pub const STRESS_STEPS: usize = 10_000;
pub const STRESS_WINDOW: usize = 1_000;
pub const STRESS_SECONDS_MAX: f64 = 300.0;
/// Relative slack when comparing sup norms against the recorded bounds.
pub const STRESS_BOUND_SLACK: f64 = 1e-12;
/// Set to `1` to rewrite the recorded stress bounds.
pub const RECORD_BOUNDS_ENV: &str = "RELAXPROJ_RECORD_BOUNDS";

pub const DIVERGENCE_STEPS: usize = 500;
pub const DIVERGENCE_EARLY: usize = 50;
pub const DIVERGENCE_FACTOR: f64 = 10.0;
pub const DIVERGENCE_BURN_IN: usize = 10;

pub const SCALAR_PAIRS: usize = 1_000;
pub const CLOSED_FORM_GAP_MAX: f64 = 1e-10;
pub const TELESCOPE_GAP_MAX: f64 = 1e-12;
pub const ODD_LIMIT_GAP_MAX: f64 = 1e-6;
pub const RESET_BLOCKS: usize = 40;
pub const BLOCK_EARLY: usize = 5;
pub const BLOCK_LATE: usize = 20;
pub const BLOCK_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub measured: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {}: {} ({}) [{:.2}s]",
            self.id,
            self.title,
            if self.passed { "PASS" } else { "FAIL" },
            self.measured,
            self.seconds
        )
    }
}

fn timed(id: u8, title: &'static str, body: impl FnOnce() -> (bool, String)) -> CriterionResult {
    let start = Instant::now();
    let (passed, measured) = body();
    CriterionResult {
        id,
        title,
        passed,
        measured,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn fail(e: impl fmt::Display) -> (bool, String) {
    (false, format!("error: {e}"))
}

pub type Criterion = fn(&Tolerances) -> CriterionResult;

pub const ALL: [Criterion; 11] = [
    face_projection_identity,
    splitting_identity,
    boundedness_stress,
    line_epiexp_divergence,
    closed_form,
    harmonic_telescoping,
    summable_eps_divergence,
    mixed_schedule_limits,
    truncated_schedule_resets,
    inequality_chain,
    determinism,
];

/// Runs every criterion, concurrently when the `parallel` feature is on.
pub fn run_all(tol: &Tolerances) -> Vec<CriterionResult> {
    batch::map(&ALL, |c| c(tol))
}

fn overrides_for(tol: &Tolerances) -> Overrides {
    Overrides {
        tol: tol_overrides(tol),
        ..Overrides::default()
    }
}

fn run_report(cfg: ExperimentConfig, tol: &Tolerances) -> std::result::Result<Value, String> {
    run_experiment(&cfg, &overrides_for(tol))
        .map(|a| a.report)
        .map_err(|e| e.to_string())
}

fn num(report: &Value, key: &str) -> f64 {
    report.get(key).and_then(Value::as_f64).unwrap_or(f64::NAN)
}

pub fn face_config() -> ExperimentConfig {
    ExperimentConfig {
        name: "criterion_face_identity".into(),
        description: String::new(),
        seed: Some(FACE_SEED),
        experiment: Experiment::FacesCheck(FacesParams {
            polyhedra: FACE_POLYHEDRA,
            points: FACE_POINTS,
            half_width: HALF_WIDTH,
        }),
        expect: Default::default(),
    }
}

pub fn split_config() -> ExperimentConfig {
    ExperimentConfig {
        name: "criterion_split_identity".into(),
        description: String::new(),
        seed: Some(SPLIT_SEED),
        experiment: Experiment::SplitCheck(SplitParams {
            polyhedra: FACE_POLYHEDRA,
            points: SPLIT_POINTS,
            orbit_group: ORBIT_GROUP,
            orbit_steps: ORBIT_STEPS,
            half_width: HALF_WIDTH,
        }),
        expect: Default::default(),
    }
}

pub fn stress_config() -> ExperimentConfig {
    ExperimentConfig {
        name: "criterion_stress".into(),
        description: String::new(),
        seed: Some(STRESS_SEED),
        experiment: Experiment::Stress(StressParams {
            runs: STRESS_RUNS,
            n_steps: STRESS_STEPS,
            window: Some(STRESS_WINDOW),
        }),
        expect: Default::default(),
    }
}

pub fn face_projection_identity(tol: &Tolerances) -> CriterionResult {
    timed(1, "face-projection identity", || {
        let start = Instant::now();
        let report = match run_report(face_config(), tol) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let secs = start.elapsed().as_secs_f64();
        let worst = num(&report, "max_gap");
        (
            worst <= FACE_GAP_MAX && secs <= FACE_SECONDS_MAX,
            format!(
                "{FACE_POLYHEDRA} polyhedra x {FACE_POINTS} points, max gap {worst:.3e} <= {FACE_GAP_MAX:e}, {secs:.2}s <= {FACE_SECONDS_MAX}s"
            ),
        )
    })
}

pub fn splitting_identity(tol: &Tolerances) -> CriterionResult {
    timed(2, "splitting identity", || {
        let report = match run_report(split_config(), tol) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let point_gap = num(&report, "pointwise_max_gap");
        let orbit_gap = num(&report, "orbit_max_gap");
        (
            point_gap <= SPLIT_GAP_MAX && orbit_gap <= ORBIT_GAP_MAX,
            format!(
                "d = {}, pointwise max gap {point_gap:.3e} <= {SPLIT_GAP_MAX:e}, orbit max gap over {ORBIT_STEPS} steps {orbit_gap:.3e} <= {ORBIT_GAP_MAX:e}",
                corpus::EMBED_DIM
            ),
        )
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressBounds {
    pub seed: u64,
    pub runs: usize,
    pub n_steps: usize,
    pub sup_norms: Vec<f64>,
}

const RECORDED_BOUNDS: &str = include_str!("../data/stress_bounds.json");

pub fn recorded_bounds() -> Option<StressBounds> {
    serde_json::from_str(RECORDED_BOUNDS).ok()
}

fn bounds_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/stress_bounds.json")
}

fn check_bounds(sups: &[f64]) -> std::result::Result<String, String> {
    if std::env::var(RECORD_BOUNDS_ENV).as_deref() == Ok("1") {
        let b = StressBounds {
            seed: STRESS_SEED,
            runs: STRESS_RUNS,
            n_steps: STRESS_STEPS,
            sup_norms: sups.to_vec(),
        };
        let body = serde_json::to_string_pretty(&b).expect("bounds serialize") + "\n";
        return std::fs::write(bounds_path(), body)
            .map(|()| "bounds recorded".to_string())
            .map_err(|e| format!("cannot record bounds: {e}"));
    }
    match recorded_bounds() {
        Some(b)
            if b.seed == STRESS_SEED
                && b.runs == STRESS_RUNS
                && b.n_steps == STRESS_STEPS
                && b.sup_norms.len() == sups.len() =>
        {
            let over: Vec<usize> = sups
                .iter()
                .zip(&b.sup_norms)
                .enumerate()
                .filter(|(_, (s, bound))| **s > **bound * (1.0 + STRESS_BOUND_SLACK))
                .map(|(i, _)| i)
                .collect();
            if over.is_empty() {
                Ok("all sup norms within recorded bounds".to_string())
            } else {
                Err(format!("runs above recorded bounds: {over:?}"))
            }
        }
        _ => Err(format!(
            "no recorded bounds; rerun with {RECORD_BOUNDS_ENV}=1"
        )),
    }
}

pub fn boundedness_stress(tol: &Tolerances) -> CriterionResult {
    timed(3, "boundedness stress", || {
        let start = Instant::now();
        let report = match run_report(stress_config(), tol) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let secs = start.elapsed().as_secs_f64();
        let sups: Vec<f64> = report["sup_norms"]
            .as_array()
            .map(|a| a.iter().filter_map(Value::as_f64).collect())
            .unwrap_or_default();
        let growing: Vec<u64> = report["growing_runs"]
            .as_array()
            .map(|a| a.iter().filter_map(Value::as_u64).collect())
            .unwrap_or_default();
        let bounds = check_bounds(&sups);
        let max_sup = sups.iter().copied().fold(0.0, f64::max);
        let passed = growing.is_empty() && bounds.is_ok() && secs <= STRESS_SECONDS_MAX;
        let note = bounds.unwrap_or_else(|e| e);
        (
            passed,
            format!(
                "{STRESS_RUNS} runs x {STRESS_STEPS} steps, lambda_max {}, STABLE {}/{STRESS_RUNS}, GROWING runs {growing:?}, max sup norm {max_sup:.3}, {note}, {secs:.2}s <= {STRESS_SECONDS_MAX}s",
                corpus::STRESS_LAMBDA_MAX,
                STRESS_RUNS - growing.len(),
            ),
        )
    })
}

pub fn line_epiexp_divergence(tol: &Tolerances) -> CriterionResult {
    timed(4, "line/epi(exp) divergence", || {
        let x0 = Vector::new(vec![0.0, 0.0]).expect("valid");
        let t = match divergence_experiment_line_epiexp(x0, DIVERGENCE_STEPS, tol) {
            Ok(t) => t,
            Err(e) => return fail(e),
        };
        let (late, early) = (t.norms[DIVERGENCE_STEPS], t.norms[DIVERGENCE_EARLY]);
        let growth_ok = late > DIVERGENCE_FACTOR * early;
        let tail = &t.iterates[DIVERGENCE_BURN_IN..];
        let per_step_strict = tail.windows(2).all(|w| w[1][0] < w[0][0]);
        let per_step_nonincreasing = tail.windows(2).all(|w| w[1][0] <= w[0][0]);
        let per_pair_strict = tail.windows(3).step_by(2).all(|w| w[2][0] < w[0][0]);
        let coordinate_ok = per_step_nonincreasing && per_pair_strict;
        (
            growth_ok && coordinate_ok,
            format!(
                "||x_{DIVERGENCE_STEPS}|| = {late:.4}, ||x_{DIVERGENCE_EARLY}|| = {early:.4}, ratio {:.4} (need > {DIVERGENCE_FACTOR}); after {DIVERGENCE_BURN_IN} steps first coordinate non-increasing per step: {per_step_nonincreasing}, strictly decreasing per projection pair: {per_pair_strict}, strictly decreasing per step: {per_step_strict}",
                late / early
            ),
        )
    })
}

/// Every scalar schedule shipped in the bundled configs.
pub fn bundled_scalar_problems() -> Vec<(String, ScalarProblem, LambdaSchedule)> {
    bundled::configs()
        .into_iter()
        .filter_map(|c| match c.experiment {
            Experiment::Scalar(p) => Some((c.name, ScalarProblem::new(p.a, p.b, p.x0), p.schedule)),
            _ => None,
        })
        .collect()
}

pub fn closed_form(_tol: &Tolerances) -> CriterionResult {
    timed(5, "closed form for even terms", || {
        let problems = bundled_scalar_problems();
        let mut worst = 0.0_f64;
        let mut worst_name = String::new();
        for (name, p, sched) in &problems {
            let xs = iterate_scalar(p, sched, 2 * SCALAR_PAIRS);
            let der = DerivedSequences::new(p, sched, SCALAR_PAIRS);
            for n in 0..=SCALAR_PAIRS {
                let y = xs[2 * n];
                let gap = (der.closed_form(p.x0, n) - y).abs() / y.abs().max(1.0);
                if gap > worst || worst_name.is_empty() {
                    worst = worst.max(gap);
                    worst_name = name.clone();
                }
            }
        }
        (
            !problems.is_empty() && worst <= CLOSED_FORM_GAP_MAX,
            format!(
                "{} schedules, n <= {SCALAR_PAIRS}, max relative gap {worst:.3e} ({worst_name}) <= {CLOSED_FORM_GAP_MAX:e}",
                problems.len()
            ),
        )
    })
}

pub fn harmonic_telescoping(_tol: &Tolerances) -> CriterionResult {
    timed(6, "harmonic telescoping", || {
        let p = ScalarProblem::new(0.0, 1.0, 0.0);
        let der = DerivedSequences::new(&p, &LambdaSchedule::Harmonic, SCALAR_PAIRS + 1);
        let table = der.gamma_table(SCALAR_PAIRS + 1);
        let mut worst = 0.0_f64;
        for (k, row) in table.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                let n = k + j;
                let exact = (2 * k + 1) as f64 / (2 * n + 3) as f64;
                worst = worst.max((g - exact).abs() / exact);
            }
        }
        (
            worst <= TELESCOPE_GAP_MAX,
            format!("0 <= k <= n <= {SCALAR_PAIRS}, max relative error {worst:.3e} <= {TELESCOPE_GAP_MAX:e}"),
        )
    })
}

pub fn summable_eps_divergence(_tol: &Tolerances) -> CriterionResult {
    timed(7, "summable eps: x_2n -> +inf", || {
        let p = ScalarProblem::new(0.0, 1.0, 0.0);
        let sched = LambdaSchedule::TwoMinus {
            eps: Decay::Geometric { ratio: 0.5 },
        };
        let xs = iterate_scalar(&p, &sched, 2 * SCALAR_PAIRS);
        let rep = classify_sequence(&p, &xs);
        let ys: Vec<f64> = xs.iter().step_by(2).copied().collect();
        let positive = ys[1..].iter().all(|&y| y > 0.0);
        let increasing = ys[1..].windows(2).all(|w| w[1] > w[0]);
        (
            rep.regime == Regime::DivergentToInfinity && positive && increasing,
            format!(
                "regime {}, x_2n > 0 for n >= 1: {positive}, x_2n increasing: {increasing}, x_{} = {:.4}",
                rep.regime,
                2 * SCALAR_PAIRS,
                ys[SCALAR_PAIRS]
            ),
        )
    })
}

pub fn mixed_schedule_limits(_tol: &Tolerances) -> CriterionResult {
    timed(8, "mixed schedule limits", || {
        let (a, b) = (0.0, 1.0);
        let p = ScalarProblem::new(a, b, 0.0);
        let sched = LambdaSchedule::Mixed {
            rho: Decay::Reciprocal { shift: 2.0 },
        };
        let xs = iterate_scalar(&p, &sched, 2 * SCALAR_PAIRS + 1);
        let even_exact = (1..=SCALAR_PAIRS).all(|n| xs[2 * n] == b);
        let odd_gap = (xs[2 * SCALAR_PAIRS + 1] - (2.0 * a - b)).abs();
        let regime = classify_sequence(&p, &xs).regime;
        (
            even_exact && odd_gap <= ODD_LIMIT_GAP_MAX,
            format!(
                "rho_n = 1/(n+2), a = {a}, b = {b}: x_2n == b for 1 <= n <= {SCALAR_PAIRS}: {even_exact}; |x_{} - (2a-b)| = {odd_gap:.3e} (need <= {ODD_LIMIT_GAP_MAX:e}); regime {regime}",
                2 * SCALAR_PAIRS + 1
            ),
        )
    })
}

pub fn truncated_schedule_resets(_tol: &Tolerances) -> CriterionResult {
    timed(9, "truncated schedule resets", || {
        let p = ScalarProblem::new(0.0, 1.0, 0.0);
        let sched = LambdaSchedule::Truncated {
            mu: Box::new(LambdaSchedule::TwoMinus {
                eps: Decay::Geometric { ratio: 0.5 },
            }),
        };
        let steps = (RESET_BLOCKS + 1) * (RESET_BLOCKS + 2);
        let xs = iterate_scalar(&p, &sched, steps);
        let resets = (1..=RESET_BLOCKS).all(|n| xs[n * (n + 1)] == p.b);
        let blocks = block_maxima(&xs);
        let ratio = blocks[BLOCK_LATE] / blocks[BLOCK_EARLY];
        let regime = classify_sequence(&p, &xs).regime;
        (
            resets && ratio >= BLOCK_GROWTH && regime == Regime::UnboundedWithBoundedSubseq,
            format!(
                "x_n(n+1) == b for 1 <= n <= {RESET_BLOCKS}: {resets}; block max m={BLOCK_EARLY}: {:.3}, m={BLOCK_LATE}: {:.3}, ratio {ratio:.3} (need >= {BLOCK_GROWTH}); regime {regime}",
                blocks[BLOCK_EARLY], blocks[BLOCK_LATE]
            ),
        )
    })
}

pub fn inequality_chain(_tol: &Tolerances) -> CriterionResult {
    timed(10, "summability inequality chain", || {
        let n = SCALAR_PAIRS;
        let mut parts = Vec::new();
        let mut ok = true;
        for (label, decay) in [
            ("2^-(n+1)", Decay::Geometric { ratio: 0.5 }),
            ("1/(n+2)", Decay::Reciprocal { shift: 2.0 }),
        ] {
            match summability_relation(&decay.values(n)) {
                Ok(r) => {
                    ok &= r.holds;
                    parts.push(format!(
                        "{label}: {} ({:.6} >= {:.6} >= {:.6} >= {:.6})",
                        if r.holds { "holds" } else { "violated" },
                        r.sum_eps,
                        r.sum_delta,
                        r.lower,
                        r.half_sum_eps
                    ));
                }
                Err(e) => return fail(e),
            }
        }
        (ok, format!("N = {n}; {}", parts.join("; ")))
    })
}

pub fn determinism(tol: &Tolerances) -> CriterionResult {
    timed(11, "determinism", || {
        let overrides = overrides_for(tol);
        let configs = bundled::configs();
        let results = batch::map(&configs, |c| {
            let a = run_experiment(c, &overrides);
            let b = run_experiment(c, &overrides);
            match (a, b) {
                (Ok(a), Ok(b)) => Ok(a == b),
                (Err(e), _) | (_, Err(e)) => Err(format!("{}: {e}", c.name)),
            }
        });
        let mut differing = Vec::new();
        for (c, r) in configs.iter().zip(results) {
            match r {
                Ok(true) => {}
                Ok(false) => differing.push(c.name.clone()),
                Err(e) => return fail(e),
            }
        }
        (
            differing.is_empty(),
            format!(
                "{} bundled configs re-run, byte-identical: {}{}",
                configs.len(),
                configs.len() - differing.len(),
                if differing.is_empty() {
                    String::new()
                } else {
                    format!(", differing: {}", differing.join(", "))
                }
            ),
        )
    })
}

fn tol_overrides(tol: &Tolerances) -> Vec<(String, f64)> {
    vec![
        ("orth".into(), tol.orth),
        ("feas".into(), tol.feas),
        ("rank".into(), tol.rank),
        ("dual".into(), tol.dual),
        ("act".into(), tol.act),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundled(name: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(bundled::source(name).unwrap()).unwrap()
    }

    #[test]
    fn bundled_configs_match_criterion_constants() {
        let f = bundled("face_projection_identity");
        let Experiment::FacesCheck(p) = &f.experiment else {
            panic!()
        };
        assert_eq!(
            (f.seed, p.polyhedra, p.points, p.half_width),
            (Some(FACE_SEED), FACE_POLYHEDRA, FACE_POINTS, HALF_WIDTH)
        );

        let s = bundled("split_identity_d40");
        let Experiment::SplitCheck(p) = &s.experiment else {
            panic!()
        };
        assert_eq!(
            (s.seed, p.polyhedra, p.points, p.orbit_group, p.orbit_steps),
            (
                Some(SPLIT_SEED),
                FACE_POLYHEDRA,
                SPLIT_POINTS,
                ORBIT_GROUP,
                ORBIT_STEPS
            )
        );

        let m = bundled("meshpoly_stress_d6");
        let Experiment::Stress(p) = &m.experiment else {
            panic!()
        };
        assert_eq!(
            (m.seed, p.runs, p.n_steps, p.window),
            (
                Some(STRESS_SEED),
                STRESS_RUNS,
                STRESS_STEPS,
                Some(STRESS_WINDOW)
            )
        );

        let t = bundled("scalar_truncated");
        let Experiment::Scalar(p) = &t.experiment else {
            panic!()
        };
        assert!(p.n_steps >= (RESET_BLOCKS + 1) * (RESET_BLOCKS + 2));
    }

    #[test]
    fn recorded_bounds_cover_the_stress_batch() {
        let b = recorded_bounds().expect("bounds recorded");
        assert_eq!(
            (b.seed, b.runs, b.n_steps),
            (STRESS_SEED, STRESS_RUNS, STRESS_STEPS)
        );
        assert_eq!(b.sup_norms.len(), STRESS_RUNS);
    }

    #[test]
    fn display_shows_verdict() {
        let r = CriterionResult {
            id: 3,
            title: "x",
            passed: false,
            measured: "m".into(),
            seconds: 0.0,
        };
        assert_eq!(r.to_string(), "criterion  3 x: FAIL (m) [0.00s]");
    }
}
