//! Experiment configuration documents.
//!
//! A config is a JSON object:
//!
//! ```json
//! {
//!   "name": "epiexp_divergence",
//!   "description": "what the run demonstrates",
//!   "seed": 1,
//!   "kind": "divergence_epiexp",
//!   "parameters": { "x0": [0.0, 0.0], "n_steps": 500 },
//!   "expect": { "verdict": "GROWING" }
//! }
//! ```
//!
//! `seed` is required as soon as a policy or schedule is randomized.
//! `expect` maps top-level keys of the machine-readable report to the values
//! the run should produce; `verify` checks them.

use std::collections::BTreeMap;
use std::path::Path;

use relaxproj::iteration::{RelaxationSchedule, SelectionPolicy};
use relaxproj::scalar_reflect::LambdaSchedule;
use relaxproj::Tolerances;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(default)]
    pub expect: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum Experiment {
    Orbit(OrbitParams),
    Stress(StressParams),
    Scalar(ScalarParams),
    FacesCheck(FacesParams),
    SplitCheck(SplitParams),
    DivergenceEpiexp(DivergenceParams),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Orbit(_) => "orbit",
            Experiment::Stress(_) => "stress",
            Experiment::Scalar(_) => "scalar",
            Experiment::FacesCheck(_) => "faces_check",
            Experiment::SplitCheck(_) => "split_check",
            Experiment::DivergenceEpiexp(_) => "divergence_epiexp",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Affine {
        base: Vec<f64>,
        #[serde(default)]
        directions: Vec<Vec<f64>>,
    },
    Polyhedron {
        dim: usize,
        rows: Vec<RowSpec>,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    EpiExp,
}

/// `<a, x> <= b`
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Cyclic,
    RandomUniform,
    Farthest,
    Scripted { indices: Vec<usize> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Constant { lambda: f64 },
    Sequence { values: Vec<f64> },
    Formula { schedule: LambdaSchedule },
    RandomIn { max: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitParams {
    pub sets: Vec<SetSpec>,
    pub policy: PolicySpec,
    pub schedule: ScheduleSpec,
    pub x0: Vec<f64>,
    pub n_steps: usize,
    #[serde(default)]
    pub window: Option<usize>,
    /// Run the Fejér check against `common_point`, or a point found by the
    /// feasibility sweep.
    #[serde(default)]
    pub fejer: bool,
    #[serde(default)]
    pub common_point: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StressParams {
    pub runs: usize,
    pub n_steps: usize,
    #[serde(default)]
    pub window: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarParams {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub schedule: LambdaSchedule,
    pub n_steps: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacesParams {
    pub polyhedra: usize,
    pub points: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitParams {
    pub polyhedra: usize,
    pub points: usize,
    /// Polyhedra per collection in the orbit comparison.
    pub orbit_group: usize,
    pub orbit_steps: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceParams {
    pub x0: Vec<f64>,
    pub n_steps: usize,
    #[serde(default)]
    pub window: Option<usize>,
}

fn default_half_width() -> f64 {
    5.0
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub tol: Vec<(String, f64)>,
}

impl Overrides {
    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut tol = Tolerances::default();
        for (name, value) in &self.tol {
            tol.set(name, *value).map_err(CliError::ConfigInvalid)?;
        }
        Ok(tol)
    }
}

/// Parses `name=value`.
pub fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad value in {s:?}: {e}"))?;
    let mut probe = Tolerances::default();
    probe.set(name.trim(), value)?;
    Ok((name.trim().to_string(), value))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::ConfigInvalid(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::ConfigInvalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Applies seed and step overrides.
    pub fn with_overrides(mut self, o: &Overrides) -> Self {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if let Some(n) = o.steps {
            match &mut self.experiment {
                Experiment::Orbit(p) => p.n_steps = n,
                Experiment::Stress(p) => p.n_steps = n,
                Experiment::Scalar(p) => p.n_steps = n,
                Experiment::SplitCheck(p) => p.orbit_steps = n,
                Experiment::DivergenceEpiexp(p) => p.n_steps = n,
                Experiment::FacesCheck(_) => {}
            }
        }
        self
    }

    pub fn uses_randomness(&self) -> bool {
        match &self.experiment {
            Experiment::Orbit(p) => {
                matches!(p.policy, PolicySpec::RandomUniform)
                    || matches!(p.schedule, ScheduleSpec::RandomIn { .. })
            }
            Experiment::Stress(_) | Experiment::FacesCheck(_) | Experiment::SplitCheck(_) => true,
            Experiment::Scalar(_) | Experiment::DivergenceEpiexp(_) => false,
        }
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| {
            CliError::ConfigInvalid(format!(
                "{}: a seed is required for randomized runs",
                self.name
            ))
        })
    }
}

/// Seeds for the policy and schedule streams of one run.
pub fn stream_seeds(seed: u64) -> (u64, u64) {
    (seed, seed ^ 0x9e37_79b9_7f4a_7c15)
}

impl PolicySpec {
    pub fn build(&self, seed: Option<u64>) -> Result<SelectionPolicy> {
        Ok(match self {
            PolicySpec::Cyclic => SelectionPolicy::Cyclic,
            PolicySpec::Farthest => SelectionPolicy::Farthest,
            PolicySpec::Scripted { indices } => SelectionPolicy::Scripted {
                indices: indices.clone(),
            },
            PolicySpec::RandomUniform => {
                SelectionPolicy::RandomUniform {
                    seed: stream_seeds(seed.ok_or_else(|| {
                        CliError::ConfigInvalid("random policy needs a seed".into())
                    })?)
                    .0,
                }
            }
        })
    }
}

impl ScheduleSpec {
    pub fn build(&self, seed: Option<u64>) -> Result<RelaxationSchedule> {
        Ok(match self {
            ScheduleSpec::Constant { lambda } => RelaxationSchedule::Constant { lambda: *lambda },
            ScheduleSpec::Sequence { values } => RelaxationSchedule::Sequence {
                values: values.clone(),
            },
            ScheduleSpec::Formula { schedule } => RelaxationSchedule::Formula {
                schedule: schedule.clone(),
            },
            ScheduleSpec::RandomIn { max } => RelaxationSchedule::RandomIn {
                max: *max,
                seed: stream_seeds(seed.ok_or_else(|| {
                    CliError::ConfigInvalid("random schedule needs a seed".into())
                })?)
                .1,
            },
        })
    }
}
