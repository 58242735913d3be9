//! Runs every verification suite with default settings, as
//! `focuswave verify <suite>` does, without writing files.

use focuswave::cli::config::RunConfig;
use focuswave::cli::verify::{run_suite, SUITES};

fn main() -> focuswave::Result<()> {
    let config = RunConfig::default();
    for suite in SUITES {
        let report = run_suite(suite, &config)?;
        println!("{suite}: {}", if report.passed { "passed" } else { "FAILED" });
        for c in &report.checks {
            println!("  {:<28} {:?} value {:.3e} (tol {:.1e})", c.name, c.status, c.value, c.tolerance);
        }
    }
    Ok(())
}
