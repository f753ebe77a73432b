//! Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
//! any fails. Thresholds live in `relaxproj_cli::criteria`.

use std::process::ExitCode;

use relaxproj::Tolerances;
use relaxproj_cli::criteria;

fn main() -> ExitCode {
    let results = criteria::run_all(&Tolerances::default());
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
