//! Experiment runner: JSON configs in, CSV/JSON artifacts and a run report out.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};

use config::{Experiment, SchemaError, Validated};
use experiments::Outcome;
use report::RunReport;

pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

pub fn load(path: &Path) -> Result<Validated, SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|e| SchemaError(format!("{}: {e}", path.display())))?;
    config::validate(config::parse(&text)?)
}

/// Effective output directory: `--out`, then the config's `output_dir`, then `runs/<experiment>`.
pub fn output_dir(v: &Validated, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf)
        .or_else(|| v.config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(v.config.experiment.name()))
}

pub fn run(v: &Validated, dir: &Path) -> Result<RunReport> {
    let start = Instant::now();
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut outcome = Outcome::new(dir);
    experiments::run(v, &mut outcome)?;
    let mut config = v.config.clone();
    config.output_dir = Some(dir.to_path_buf());
    let report = RunReport {
        experiment: v.config.experiment.name(),
        input_hash: report::input_hash(&v.config),
        config,
        files: report::manifest(dir, &outcome.files)?,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        passed: outcome.assertions.iter().all(|a| a.passed),
        assertions: outcome.assertions,
        metrics: outcome.metrics,
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    std::fs::write(dir.join("report.json"), text)?;
    Ok(report)
}

/// Exit code for a failed run: 3 when a size limit was hit, else 1.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let resource = err
        .chain()
        .any(|e| matches!(e.downcast_ref::<iprep_core::Error>(), Some(iprep_core::Error::SizeLimit { .. })));
    if resource {
        EXIT_RESOURCE
    } else {
        EXIT_ASSERTION
    }
}

pub fn list() -> String {
    let mut s = String::new();
    for e in Experiment::ALL {
        let required: Vec<&str> = std::iter::once("experiment").chain(e.required_fields().iter().copied()).collect();
        s += &format!("{}\n  {}\n  required: {}\n", e.name(), e.summary(), required.join(", "));
        s += &format!("  params (defaults): {}\n", e.default_params());
    }
    s
}
