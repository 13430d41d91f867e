//! CSV emission and the per-experiment check ledger that decides the exit
//! code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Reference accuracy of the deterministic (matrix-exponential) observables;
/// reported as the error estimate on every non-Monte-Carlo value.
pub const DETERMINISTIC_TOL: f64 = 1e-11;

/// Fixed-width float formatting: 17 significant digits, `.` decimal
/// separator, identical across runs and platforms.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a CSV file with a header row; rows must arrive pre-sorted by their
/// grid key so parallel execution never changes the bytes.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    writeln!(&mut text, "{}", header.join(",")).expect("string write");
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        writeln!(&mut text, "{}", row.join(",")).expect("string write");
    }
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// One named assertion of an experiment.
#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            passed,
            detail,
        }
    }
}

/// Collects checks and output files for the final summary.
#[derive(Debug, Default, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub checks: Vec<Check>,
    pub outputs: Vec<PathBuf>,
}

impl RunReport {
    pub fn new(experiment: &str) -> Self {
        RunReport {
            experiment: experiment.into(),
            ..Default::default()
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        println!("check {:-<44} {}", format!("{name} "), if passed { "pass" } else { "FAIL" });
        if !passed {
            println!("       {detail}");
        }
        self.checks.push(Check::new(name, passed, detail));
    }

    /// Assert a truncation-drift bound and record it.
    pub fn drift_check(&mut self, name: &str, drift: f64, bound: f64) {
        self.check(
            name,
            drift < bound,
            format!("drift {drift:.3e} against bound {bound:.1e}"),
        );
    }

    pub fn record_output(&mut self, path: PathBuf) {
        println!("wrote {}", path.display());
        self.outputs.push(path);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Machine-readable one-line summary; printed last so scripts can take
    /// the final stdout line.
    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            experiment: &'a str,
            passed: bool,
            failures: Vec<&'a str>,
            outputs: Vec<String>,
        }
        serde_json::to_string(&Summary {
            experiment: &self.experiment,
            passed: self.all_passed(),
            failures: self
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect(),
            outputs: self
                .outputs
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
        })
        .expect("summary serializes")
    }
}
