//! The `verify` subcommand: bundled configs against their expectations,
//! extra configs, then every acceptance criterion.

use std::io::Write;
use std::path::{Path, PathBuf};

use relaxproj::batch;

use crate::bundled;
use crate::config::{ExperimentConfig, Overrides};
use crate::criteria;
use crate::error::{CliError, Result};
use crate::experiment::run_experiment;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigOutcome {
    Pass,
    Fail(Vec<String>),
    Error(String),
    Invalid(String),
}

fn check_config(cfg: &ExperimentConfig, o: &Overrides, out: Option<&Path>) -> ConfigOutcome {
    let a = match run_experiment(cfg, o) {
        Ok(a) => a,
        Err(CliError::ConfigInvalid(m)) => return ConfigOutcome::Invalid(m),
        Err(e) => return ConfigOutcome::Error(e.to_string()),
    };
    if let Some(dir) = out {
        if let Err(e) = a.write_to(&dir.join(&cfg.name)) {
            return ConfigOutcome::Error(e.to_string());
        }
    }
    let unmet = a.unmet_expectations(cfg);
    if unmet.is_empty() {
        ConfigOutcome::Pass
    } else {
        ConfigOutcome::Fail(unmet)
    }
}

fn line(label: &str, outcome: &ConfigOutcome) -> String {
    match outcome {
        ConfigOutcome::Pass => format!("config {label}: PASS"),
        ConfigOutcome::Fail(u) => format!("config {label}: FAIL ({})", u.join("; ")),
        ConfigOutcome::Error(e) => format!("config {label}: ERROR ({e})"),
        ConfigOutcome::Invalid(e) => format!("config {label}: CONFIG_INVALID ({e})"),
    }
}

/// Prints one line per config and criterion to `w`; returns whether
/// everything passed.
pub fn verify_all(
    o: &Overrides,
    extra: &[PathBuf],
    out: Option<&Path>,
    w: &mut dyn Write,
) -> Result<bool> {
    let tol = o.tolerances()?;
    let mut ok = true;

    let configs = bundled::configs();
    let outcomes = batch::map(&configs, |c| check_config(c, o, out));
    for (c, r) in configs.iter().zip(&outcomes) {
        ok &= *r == ConfigOutcome::Pass;
        writeln!(w, "{}", line(&c.name, r))?;
    }

    for path in extra {
        let r = match ExperimentConfig::from_path(path) {
            Ok(c) => check_config(&c, o, out),
            Err(e) => ConfigOutcome::Invalid(e.to_string()),
        };
        ok &= r == ConfigOutcome::Pass;
        writeln!(w, "{}", line(&path.display().to_string(), &r))?;
    }

    for r in criteria::run_all(&tol) {
        ok &= r.passed;
        writeln!(w, "{r}")?;
    }
    writeln!(w, "verify: {}", if ok { "PASS" } else { "FAIL" })?;
    Ok(ok)
}
