use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ness_cli::config::{load_config, parse_config_str, Scenario};
use ness_cli::selftest::run_selftest;
use ness_cli::{run_scenario, CliError};

#[derive(Debug, Parser)]
#[command(name = "ness", version, about = "Entanglement measures of biased free-fermion chains")]
struct Args {
    scenario: Scenario,
    /// Experiment configuration (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV; companion tables are written beside it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parameter points.
    #[arg(long, env = "NESS_THREADS")]
    threads: Option<usize>,
}

fn run(args: &Args) -> Result<bool, CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid { key: "threads".into(), msg: e.to_string() })?;
    }
    let config = match (&args.config, args.scenario) {
        (Some(path), s) => load_config(path, Some(s))?,
        (None, Scenario::Selftest) => parse_config_str("", Some(Scenario::Selftest))?,
        (None, _) => return Err(CliError::MissingKey("--config".into())),
    };
    if config.scenario == Scenario::Selftest && args.out.is_none() && config.output.is_none() {
        let checks = run_selftest();
        for c in &checks {
            println!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        return Ok(checks.iter().all(|c| c.passed));
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", config.scenario.name())));
    let summary = run_scenario(&config, &out)?;
    for (path, rows) in &summary.written {
        println!("wrote {} ({rows} rows)", path.display());
    }
    if let Some(passed) = summary.selftest_passed {
        println!("selftest {}", if passed { "PASS" } else { "FAIL" });
        return Ok(passed);
    }
    Ok(true)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error kind={} message={:?}", e.kind(), e.to_string());
            ExitCode::from(2)
        }
    }
}
