//! Experiment runner: far-limit and finite-distance sweeps written as CSV,
//! constant-offset fits against the asymptotic predictions, and a self-test.

pub mod config;
pub mod distance;
pub mod error;
pub mod fit;
pub mod kernels;
pub mod output;
pub mod selftest;
pub mod sweeps;

use std::path::{Path, PathBuf};

pub use config::{load_config, parse_config, ExperimentConfig, Measure, Scenario};
pub use error::{CliError, Result};
pub use fit::{fit_constant, FitResult};
pub use output::{emit_csv, read_csv, Table};

/// What a scenario run produced on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub written: Vec<(PathBuf, usize)>,
    pub selftest_passed: Option<bool>,
    pub max_imag_eigenvalue: f64,
}

/// `runs/x.csv` → `runs/x.<tag>.csv`.
pub fn companion_path(out: &Path, tag: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{tag}.csv"))
}

fn write(table: &Table, path: &Path, written: &mut Vec<(PathBuf, usize)>) -> Result<()> {
    emit_csv(table, path)?;
    written.push((path.to_path_buf(), table.rows.len()));
    Ok(())
}

/// Runs the configured scenario and writes its tables next to `out`.
pub fn run_scenario(config: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    let mut written = Vec::new();
    let mut summary = RunSummary { written: Vec::new(), selftest_passed: None, max_imag_eigenvalue: 0.0 };
    match config.scenario {
        Scenario::SweepLength | Scenario::SweepBias | Scenario::SweepPosition => {
            let r = sweeps::run(config)?;
            write(&r.rows_table(), out, &mut written)?;
            write(&r.fit_table(), &companion_path(out, "fit"), &mut written)?;
            summary.max_imag_eigenvalue = r.diagnostics.max_imag_eigenvalue;
        }
        Scenario::SweepDistance => {
            let r = distance::run_sweep_distance(config)?;
            write(&r.samples_table(), out, &mut written)?;
            write(&r.summary_table(), &companion_path(out, "summary"), &mut written)?;
            summary.max_imag_eigenvalue = r.diagnostics.max_imag_eigenvalue;
        }
        Scenario::EvalAsymptotics => write(&kernels::run_eval_asymptotics(config)?, out, &mut written)?,
        Scenario::Selftest => {
            let checks = selftest::run_selftest();
            write(&selftest::checks_table(&checks), out, &mut written)?;
            summary.selftest_passed = Some(checks.iter().all(|c| c.passed));
        }
    }
    summary.written = written;
    Ok(summary)
}
