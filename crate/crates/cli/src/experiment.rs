//! Turning a config into artifacts: a CSV table, a plain-text report, a JSON
//! report and two-column plot-data files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use relaxproj::batch;
use relaxproj::corpus::{self, embedded_corpus, face_corpus, random_points, stress_batch};
use relaxproj::decomposition::{orbit_decomposition, project_via_split, split, KChoice};
use relaxproj::faces::{enumerate_faces, face_of_projection};
use relaxproj::iteration::{
    boundedness_report, divergence_experiment_line_epiexp, fejer_check, run, Collection,
    RelaxationSchedule, SelectionPolicy, Trajectory, RNG_ALGORITHM,
};
use relaxproj::projectors::{project_polyhedron, Target};
use relaxproj::scalar_reflect::{
    classify_sequence, fmt17, harmonic_limit_check, iterate_scalar, summability_relation,
    write_scalar_csv, DerivedSequences, LambdaSchedule, ScalarProblem,
};
use relaxproj::{AffineSubspace, Polyhedron, Tolerances, Vector};
use serde_json::{json, Map, Value};

use crate::config::{
    DivergenceParams, Experiment, ExperimentConfig, FacesParams, OrbitParams, Overrides,
    ScalarParams, SetSpec, SplitParams, StressParams,
};
use crate::error::{invalid, numerical, CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub name: String,
    /// File name of the main table.
    pub csv_name: &'static str,
    pub csv: String,
    pub report_txt: String,
    pub report: Value,
    /// `(file name, contents)` of two-column series.
    pub plots: Vec<(String, String)>,
}

impl Artifacts {
    /// Writes every artifact into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: &str, body: &str| -> Result<()> {
            let p = dir.join(name);
            std::fs::write(&p, body)?;
            written.push(p);
            Ok(())
        };
        put(self.csv_name, &self.csv)?;
        put("report.txt", &self.report_txt)?;
        put(
            "report.json",
            &(serde_json::to_string_pretty(&self.report).expect("json values serialize") + "\n"),
        )?;
        for (name, body) in &self.plots {
            put(name, body)?;
        }
        Ok(written)
    }

    /// Keys of `expect` whose values differ from the report.
    pub fn unmet_expectations(&self, cfg: &ExperimentConfig) -> Vec<String> {
        cfg.expect
            .iter()
            .filter(|(k, v)| self.report.get(k.as_str()) != Some(v))
            .map(|(k, v)| {
                let got = self.report.get(k.as_str()).cloned().unwrap_or(Value::Null);
                format!("{k}: expected {v}, got {got}")
            })
            .collect()
    }
}

/// Runs a config after applying overrides.
pub fn run_experiment(cfg: &ExperimentConfig, o: &Overrides) -> Result<Artifacts> {
    let tol = o.tolerances()?;
    let cfg = cfg.clone().with_overrides(o);
    if cfg.uses_randomness() {
        cfg.require_seed()?;
    }
    let mut report = Map::new();
    report.insert("name".into(), json!(cfg.name));
    report.insert("kind".into(), json!(cfg.experiment.kind()));
    report.insert("description".into(), json!(cfg.description));
    report.insert("seed".into(), json!(cfg.seed));
    report.insert("rng".into(), json!(RNG_ALGORITHM));
    let body = match &cfg.experiment {
        Experiment::Orbit(p) => orbit(p, cfg.seed, &tol, &mut report)?,
        Experiment::Stress(p) => stress(p, cfg.require_seed()?, &tol, &mut report)?,
        Experiment::Scalar(p) => scalar(p, &mut report)?,
        Experiment::FacesCheck(p) => faces(p, cfg.require_seed()?, &tol, &mut report)?,
        Experiment::SplitCheck(p) => split_check(p, cfg.require_seed()?, &tol, &mut report)?,
        Experiment::DivergenceEpiexp(p) => divergence(p, &tol, &mut report)?,
    };
    let report = Value::Object(report);
    Ok(Artifacts {
        name: cfg.name.clone(),
        csv_name: body.csv_name,
        csv: body.csv,
        report_txt: render_txt(&report),
        report,
        plots: body.plots,
    })
}

struct Body {
    csv_name: &'static str,
    csv: String,
    plots: Vec<(String, String)>,
}

fn render_txt(report: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(m) = report {
        for (k, v) in m {
            let shown = match v {
                Value::String(s) => s.clone(),
                Value::Array(a) if a.len() > 12 => format!("[{} values]", a.len()),
                other => other.to_string(),
            };
            let _ = writeln!(out, "{k}: {shown}");
        }
    }
    out
}

fn series<I: IntoIterator<Item = (f64, f64)>>(points: I) -> String {
    let mut out = String::new();
    for (x, y) in points {
        let _ = writeln!(out, "{} {}", fmt17(x), fmt17(y));
    }
    out
}

fn norm_plot(t: &Trajectory) -> (String, String) {
    (
        "norms.dat".into(),
        series(t.norms.iter().enumerate().map(|(n, v)| (n as f64, *v))),
    )
}

fn trajectory_csv(t: &Trajectory) -> Result<String> {
    let mut buf = Vec::new();
    t.write_csv(&mut buf).map_err(numerical("iteration"))?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn vector(v: &[f64], what: &str) -> Result<Vector> {
    Vector::new(v.to_vec()).map_err(invalid(what))
}

fn build_set(s: &SetSpec, tol: &Tolerances) -> Result<Target> {
    Ok(match s {
        SetSpec::Affine { base, directions } => {
            let dirs = directions
                .iter()
                .map(|d| vector(d, "affine direction"))
                .collect::<Result<Vec<_>>>()?;
            Target::Affine(
                AffineSubspace::from_spanning(vector(base, "affine base")?, &dirs, tol)
                    .map_err(invalid("affine set"))?,
            )
        }
        SetSpec::Polyhedron { dim, rows } => Target::Polyhedron(
            Polyhedron::from_rows(*dim, rows.iter().map(|r| (r.a.clone(), r.b)).collect())
                .map_err(invalid("polyhedron"))?,
        ),
        SetSpec::Box { lo, hi } => {
            Target::Polyhedron(Polyhedron::boxed(lo, hi).map_err(invalid("box"))?)
        }
        SetSpec::EpiExp => Target::EpiExp,
    })
}

fn verdict_fields(t: &Trajectory, window: Option<usize>, report: &mut Map<String, Value>) {
    let w = window.unwrap_or((t.len() / 10).max(1));
    let b = boundedness_report(t, w);
    report.insert("window".into(), json!(w));
    report.insert("verdict".into(), json!(b.verdict.to_string()));
    report.insert("sup_norm".into(), json!(b.sup_norm));
    report.insert("first_window_max".into(), json!(b.first_window_max));
    report.insert("trailing_window_max".into(), json!(b.trailing_window_max));
    report.insert("sub_window_maxima".into(), json!(b.sub_window_maxima));
    report.insert("log_log_slope".into(), json!(b.log_log_slope));
    report.insert("final_norm".into(), json!(t.norms.last()));
}

fn orbit(
    p: &OrbitParams,
    seed: Option<u64>,
    tol: &Tolerances,
    report: &mut Map<String, Value>,
) -> Result<Body> {
    let sets = p
        .sets
        .iter()
        .map(|s| build_set(s, tol))
        .collect::<Result<Vec<_>>>()?;
    let c = Collection::new(sets, tol).map_err(invalid("collection"))?;
    let policy = p.policy.build(seed)?;
    let sched = p.schedule.build(seed)?;
    policy.validate(c.len()).map_err(invalid("policy"))?;
    sched.validate(p.n_steps).map_err(invalid("schedule"))?;
    let x0 = vector(&p.x0, "x0")?;
    x0.check_dim(c.ambient_dim()).map_err(invalid("x0"))?;
    let z = p
        .common_point
        .as_ref()
        .map(|z| vector(z, "common_point"))
        .transpose()?;

    let t = run(&c, &policy, &sched, x0, p.n_steps, tol).map_err(numerical("iteration"))?;
    report.insert("dim".into(), json!(c.ambient_dim()));
    report.insert("sets".into(), json!(c.len()));
    report.insert("n_steps".into(), json!(p.n_steps));
    verdict_fields(&t, p.window, report);
    let mut plots = vec![norm_plot(&t)];
    if p.fejer {
        match fejer_check(&t, &c, z.as_ref(), tol) {
            Ok(f) => {
                report.insert("fejer_monotone".into(), json!(f.monotone()));
                report.insert("fejer_violations".into(), json!(f.violations.len()));
                report.insert("fejer_max_excess".into(), json!(f.max_excess));
                report.insert("common_point".into(), json!(f.z));
                plots.push((
                    "distance_to_common_point.dat".into(),
                    series(f.distances.iter().enumerate().map(|(n, d)| (n as f64, *d))),
                ));
            }
            Err(relaxproj::Error::NotApplicable(why)) => {
                report.insert(
                    "fejer_monotone".into(),
                    json!(format!("not applicable: {why}")),
                );
            }
            Err(e) => return Err(numerical("iteration")(e)),
        }
    }
    Ok(Body {
        csv_name: "trajectory.csv",
        csv: trajectory_csv(&t)?,
        plots,
    })
}

fn divergence(
    p: &DivergenceParams,
    tol: &Tolerances,
    report: &mut Map<String, Value>,
) -> Result<Body> {
    let x0 = vector(&p.x0, "x0")?;
    if x0.dim() != 2 {
        return Err(CliError::ConfigInvalid(format!(
            "x0 must have 2 coordinates, got {}",
            x0.dim()
        )));
    }
    let t =
        divergence_experiment_line_epiexp(x0, p.n_steps, tol).map_err(numerical("iteration"))?;
    report.insert("n_steps".into(), json!(p.n_steps));
    verdict_fields(&t, p.window, report);
    report.insert("final_first_coordinate".into(), json!(t.last()[0]));
    let x_decreasing = t.iterates.windows(2).skip(10).all(|w| w[1][0] <= w[0][0]);
    report.insert(
        "first_coordinate_nonincreasing_after_10".into(),
        json!(x_decreasing),
    );
    let plots = vec![
        norm_plot(&t),
        (
            "first_coordinate.dat".into(),
            series(t.iterates.iter().enumerate().map(|(n, x)| (n as f64, x[0]))),
        ),
        (
            "path.dat".into(),
            series(t.iterates.iter().map(|x| (x[0], x[1]))),
        ),
    ];
    Ok(Body {
        csv_name: "trajectory.csv",
        csv: trajectory_csv(&t)?,
        plots,
    })
}

fn stress(
    p: &StressParams,
    seed: u64,
    tol: &Tolerances,
    report: &mut Map<String, Value>,
) -> Result<Body> {
    let runs = stress_batch(seed, p.runs, p.n_steps, tol).map_err(numerical("corpus"))?;
    let window = p.window.unwrap_or((p.n_steps / 10).max(1));
    let results = batch::map(&runs, |r| {
        run(
            &r.collection,
            &r.policy,
            &r.schedule,
            r.x0.clone(),
            r.n_steps,
            tol,
        )
        .map(|t| boundedness_report(&t, window))
    });
    let mut csv =
        String::from("run,dim,sets,policy,sup_norm,trailing_window_max,log_log_slope,verdict\n");
    let mut sups = Vec::new();
    let mut growing = Vec::new();
    for (i, (r, res)) in runs.iter().zip(results).enumerate() {
        let b = res.map_err(numerical("iteration"))?;
        let policy = match r.policy {
            SelectionPolicy::Farthest => "farthest",
            SelectionPolicy::RandomUniform { .. } => "random_uniform",
            SelectionPolicy::Cyclic => "cyclic",
            SelectionPolicy::Scripted { .. } => "scripted",
        };
        let _ = writeln!(
            csv,
            "{i},{},{},{policy},{},{},{},{}",
            r.collection.ambient_dim(),
            r.collection.len(),
            fmt17(b.sup_norm),
            fmt17(b.trailing_window_max),
            fmt17(b.log_log_slope),
            b.verdict
        );
        if b.verdict != relaxproj::iteration::Verdict::Stable {
            growing.push(i);
        }
        sups.push(b.sup_norm);
    }
    report.insert("runs".into(), json!(p.runs));
    report.insert("n_steps".into(), json!(p.n_steps));
    report.insert("lambda_max".into(), json!(corpus::STRESS_LAMBDA_MAX));
    report.insert("window".into(), json!(window));
    report.insert("all_stable".into(), json!(growing.is_empty()));
    report.insert("growing_runs".into(), json!(growing));
    report.insert("sup_norms".into(), json!(sups));
    let plots = vec![(
        "sup_norms.dat".into(),
        series(sups.iter().enumerate().map(|(i, s)| (i as f64, *s))),
    )];
    Ok(Body {
        csv_name: "summary.csv",
        csv,
        plots,
    })
}

fn scalar(p: &ScalarParams, report: &mut Map<String, Value>) -> Result<Body> {
    p.schedule
        .validate(p.n_steps)
        .map_err(invalid("schedule"))?;
    let prob = ScalarProblem::new(p.a, p.b, p.x0);
    let xs = iterate_scalar(&prob, &p.schedule, p.n_steps);
    let pairs = p.n_steps / 2;
    let derived = DerivedSequences::new(&prob, &p.schedule, pairs);
    let closed_gap = (0..=pairs)
        .map(|n| (derived.closed_form(p.x0, n) - xs[2 * n]).abs() / xs[2 * n].abs().max(1.0))
        .fold(0.0, f64::max);
    let regime = classify_sequence(&prob, &xs);
    report.insert("a".into(), json!(p.a));
    report.insert("b".into(), json!(p.b));
    report.insert("x0".into(), json!(p.x0));
    report.insert("n_steps".into(), json!(p.n_steps));
    report.insert("regime".into(), json!(regime.regime.to_string()));
    report.insert("lead_max".into(), json!(regime.lead_max));
    report.insert("trail_max".into(), json!(regime.trail_max));
    report.insert("trail_min".into(), json!(regime.trail_min));
    report.insert("last_even".into(), json!(regime.last_even));
    report.insert("last_odd".into(), json!(regime.last_odd));
    report.insert("closed_form_max_relative_gap".into(), json!(closed_gap));

    let eps: Vec<f64> = p
        .schedule
        .values(2 * pairs)
        .iter()
        .map(|l| 2.0 - l)
        .collect();
    match summability_relation(&eps) {
        Ok(s) => {
            report.insert("summability_chain_holds".into(), json!(s.holds));
            report.insert("sum_eps".into(), json!(s.sum_eps));
            report.insert("sum_delta".into(), json!(s.sum_delta));
        }
        Err(_) => {
            report.insert("summability_chain_holds".into(), json!("not applicable"));
        }
    }
    let mut plots = vec![
        (
            "x_n.dat".into(),
            series(xs.iter().enumerate().map(|(n, x)| (n as f64, *x))),
        ),
        (
            "y_n.dat".into(),
            series(
                xs.iter()
                    .step_by(2)
                    .enumerate()
                    .map(|(n, y)| (n as f64, *y)),
            ),
        ),
    ];
    match &p.schedule {
        LambdaSchedule::Harmonic if pairs >= 4 => {
            let h = harmonic_limit_check(&prob, pairs);
            report.insert("harmonic_sign_ok".into(), json!(h.sign_ok));
            report.insert("harmonic_growing".into(), json!(h.growing));
        }
        LambdaSchedule::Mixed { .. } => {
            let even_exact = (1..=pairs).all(|n| xs[2 * n] == p.b);
            let odd_target = 2.0 * p.a - p.b;
            let odd_gap = xs
                .iter()
                .skip(1)
                .step_by(2)
                .next_back()
                .map_or(f64::NAN, |x| (x - odd_target).abs());
            report.insert("even_terms_equal_b".into(), json!(even_exact));
            report.insert("final_odd_gap".into(), json!(odd_gap));
        }
        LambdaSchedule::Truncated { .. } => {
            let blocks = block_maxima(&xs);
            let resets = (1..)
                .map(|n: usize| n * (n + 1))
                .take_while(|&i| i < xs.len())
                .all(|i| xs[i] == p.b);
            report.insert("resets_equal_b".into(), json!(resets));
            report.insert("block_maxima".into(), json!(blocks));
            plots.push((
                "block_max.dat".into(),
                series(blocks.iter().enumerate().map(|(m, v)| (m as f64, *v))),
            ));
        }
        _ => {}
    }
    let mut buf = Vec::new();
    write_scalar_csv(&mut buf, &prob, &p.schedule, p.n_steps)
        .map_err(numerical("scalar_reflect"))?;
    Ok(Body {
        csv_name: "trajectory.csv",
        csv: String::from_utf8(buf).expect("csv output is utf-8"),
        plots,
    })
}

/// `max |x|` over each complete block `m(m+1) .. (m+1)(m+2) - 1`.
pub fn block_maxima(xs: &[f64]) -> Vec<f64> {
    (0..)
        .map(|m: usize| (m * (m + 1), (m + 1) * (m + 2)))
        .take_while(|&(_, end)| end <= xs.len())
        .map(|(start, end)| xs[start..end].iter().fold(0.0_f64, |a, x| a.max(x.abs())))
        .collect()
}

fn faces(
    p: &FacesParams,
    seed: u64,
    tol: &Tolerances,
    report: &mut Map<String, Value>,
) -> Result<Body> {
    let cs = face_corpus(seed, p.polyhedra);
    let work: Vec<(usize, Polyhedron, Vec<Vector>)> = {
        let mut r = corpus::rng(seed.wrapping_add(1));
        cs.into_iter()
            .enumerate()
            .map(|(i, c)| {
                let xs = random_points(&mut r, c.ambient_dim(), p.points, p.half_width);
                (i, c, xs)
            })
            .collect()
    };
    let results = batch::map(&work, |(_, c, xs)| -> relaxproj::Result<(usize, f64)> {
        let lattice = enumerate_faces(c, tol)?;
        let mut gap = 0.0_f64;
        for x in xs {
            let (f, pc) = face_of_projection(c, x, tol)?;
            gap = gap.max(f.hull().project(x)?.dist(&pc));
        }
        Ok((lattice.len(), gap))
    });
    let mut csv = String::from("polyhedron,dim,constraints,points,faces,max_gap\n");
    let mut worst = 0.0_f64;
    let mut gaps = Vec::new();
    for ((i, c, xs), res) in work.iter().zip(results) {
        let (n_faces, gap) = res.map_err(numerical("faces"))?;
        worst = worst.max(gap);
        gaps.push(gap);
        let _ = writeln!(
            csv,
            "{i},{},{},{},{n_faces},{}",
            c.ambient_dim(),
            c.len(),
            xs.len(),
            fmt17(gap)
        );
    }
    report.insert("polyhedra".into(), json!(p.polyhedra));
    report.insert("points_per_polyhedron".into(), json!(p.points));
    report.insert("max_gap".into(), json!(worst));
    report.insert(
        "identity_holds".into(),
        json!(worst <= crate::criteria::FACE_GAP_MAX),
    );
    Ok(Body {
        csv_name: "summary.csv",
        csv,
        plots: vec![(
            "max_gap.dat".into(),
            series(gaps.iter().enumerate().map(|(i, g)| (i as f64, *g))),
        )],
    })
}

fn split_check(
    p: &SplitParams,
    seed: u64,
    tol: &Tolerances,
    report: &mut Map<String, Value>,
) -> Result<Body> {
    if p.orbit_group == 0 {
        return Err(CliError::ConfigInvalid(
            "orbit_group must be at least 1".into(),
        ));
    }
    let cs = embedded_corpus(seed, p.polyhedra);
    let work: Vec<(usize, Polyhedron, Vec<Vector>)> = {
        let mut r = corpus::rng(seed.wrapping_add(1));
        cs.iter()
            .enumerate()
            .map(|(i, c)| {
                (
                    i,
                    c.clone(),
                    random_points(&mut r, c.ambient_dim(), p.points, p.half_width),
                )
            })
            .collect()
    };
    let results = batch::map(&work, |(_, c, xs)| -> relaxproj::Result<(usize, f64)> {
        let s = split(c, KChoice::Auto, tol)?;
        let mut gap = 0.0_f64;
        for x in xs {
            let direct = project_polyhedron(c, x, tol)?.0;
            gap = gap.max(direct.dist(&project_via_split(&s, x, tol)?));
        }
        Ok((s.kperp_basis().len(), gap))
    });
    let mut csv = String::from("polyhedron,support,kperp_dim,max_gap\n");
    let mut point_gap = 0.0_f64;
    for ((i, c, _), res) in work.iter().zip(results) {
        let (kperp, gap) = res.map_err(numerical("decomposition"))?;
        point_gap = point_gap.max(gap);
        let _ = writeln!(csv, "{i},{},{kperp},{}", support_size(c), fmt17(gap));
    }

    let groups: Vec<&[Polyhedron]> = cs.chunks(p.orbit_group).collect();
    let x0 = random_points(
        &mut corpus::rng(seed.wrapping_add(2)),
        corpus::EMBED_DIM,
        1,
        p.half_width,
    )
    .pop()
    .expect("one point");
    let sched = RelaxationSchedule::RandomIn {
        max: corpus::STRESS_LAMBDA_MAX,
        seed: crate::config::stream_seeds(seed).1,
    };
    let orbit_results = batch::map(&groups, |g| {
        orbit_decomposition(g, &SelectionPolicy::Cyclic, &sched, &x0, p.orbit_steps, tol)
    });
    let mut orbit_gap = 0.0_f64;
    let mut per_step = vec![0.0_f64; p.orbit_steps + 1];
    for res in orbit_results {
        let cmp = res.map_err(numerical("decomposition"))?;
        for (acc, g) in per_step.iter_mut().zip(&cmp.gaps) {
            *acc = acc.max(*g);
        }
        orbit_gap = orbit_gap.max(cmp.max_gap());
    }
    report.insert("ambient_dim".into(), json!(corpus::EMBED_DIM));
    report.insert("polyhedra".into(), json!(p.polyhedra));
    report.insert("points_per_polyhedron".into(), json!(p.points));
    report.insert("pointwise_max_gap".into(), json!(point_gap));
    report.insert("orbit_collections".into(), json!(groups.len()));
    report.insert("orbit_steps".into(), json!(p.orbit_steps));
    report.insert("orbit_max_gap".into(), json!(orbit_gap));
    report.insert(
        "identity_holds".into(),
        json!(
            point_gap <= crate::criteria::SPLIT_GAP_MAX
                && orbit_gap <= crate::criteria::ORBIT_GAP_MAX
        ),
    );
    Ok(Body {
        csv_name: "summary.csv",
        csv,
        plots: vec![(
            "orbit_gap.dat".into(),
            series(per_step.iter().enumerate().map(|(n, g)| (n as f64, *g))),
        )],
    })
}

fn support_size(c: &Polyhedron) -> usize {
    (0..c.ambient_dim())
        .filter(|&j| c.halfspaces().iter().any(|h| h.normal()[j] != 0.0))
        .count()
}
