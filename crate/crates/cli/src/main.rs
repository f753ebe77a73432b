use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relaxproj_cli::bundled;
use relaxproj_cli::config::{parse_tol, ExperimentConfig, Overrides};
use relaxproj_cli::error::Result;
use relaxproj_cli::experiment::run_experiment;
use relaxproj_cli::verify::verify_all;

const EXIT_VERIFY_FAILED: u8 = 4;

/// Relaxed projection experiments.
#[derive(Parser)]
#[command(name = "relaxproj", version)]
struct Cli {
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the iteration count.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Tolerance override, e.g. `--tol feas=1e-8`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs one config, given as a path or a bundled name.
    Run { config: String },
    /// Lists the bundled configs.
    List,
    /// Runs every bundled config and acceptance criterion.
    Verify {
        /// Additional configs to check.
        configs: Vec<PathBuf>,
    },
}

fn load(config: &str) -> Result<ExperimentConfig> {
    match bundled::source(config) {
        Some(text) => ExperimentConfig::from_json(text),
        None => ExperimentConfig::from_path(config.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        steps: cli.steps,
        tol: cli.tol,
    };
    let result = match cli.command {
        Command::Run { config } => load(&config).and_then(|cfg| {
            let a = run_experiment(&cfg, &overrides)?;
            let dir = cli
                .out
                .unwrap_or_else(|| PathBuf::from("out").join(&a.name));
            a.write_to(&dir)?;
            print!("{}", a.report_txt);
            println!("artifacts: {}", dir.display());
            Ok(true)
        }),
        Command::List => {
            for cfg in bundled::configs() {
                println!("{:<28} {}", cfg.name, cfg.description);
            }
            Ok(true)
        }
        Command::Verify { configs } => verify_all(
            &overrides,
            &configs,
            cli.out.as_deref(),
            &mut std::io::stdout().lock(),
        ),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
