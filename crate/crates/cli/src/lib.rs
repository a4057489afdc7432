//! Experiment runner: declarative configs in, versioned CSV and metadata out.

pub mod config;
pub mod output;
pub mod plot;
pub mod runner;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, Kind};
pub use runner::{execute, ResultRow, RunInfo};

/// Environment variable that fixes the worker thread count.
pub const THREADS_ENV: &str = "STRICHARTZ_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid config: {key}: {message}")]
    Validation { key: String, message: String },
    #[error(transparent)]
    Numerical(#[from] strichartz_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// 2 for validation failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Validation { .. } => 2,
            _ => 1,
        }
    }
}

/// Where a run writes its results and sidecar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outputs {
    pub results: PathBuf,
    pub meta: PathBuf,
}

/// Loads, validates and runs `config_path`, then writes both output files.
pub fn run_config_file(config_path: &Path, output: Option<&Path>) -> Result<(Outputs, usize), LabError> {
    let cfg = ExperimentConfig::from_path(config_path)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let results = match output {
        Some(p) => p.to_path_buf(),
        None => cfg.output_path(base, &config_path.with_extension("csv")),
    };
    let (rows, info) = execute(&cfg)?;
    let meta = output::sidecar_path(&results);
    output::write_results(&results, &rows)?;
    output::write_meta(&meta, &cfg, &info, rows.len())?;
    Ok((Outputs { results, meta }, rows.len()))
}

/// Reads a results file and writes `<stem>.py` next to it; returns the script path and warnings.
pub fn plot_results_file(results: &Path, script: Option<&Path>) -> Result<(PathBuf, Vec<String>), LabError> {
    let rows = output::read_results(results)?;
    let name = results.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let (text, warnings) = plot::emit_plot_script(&rows, &name);
    let target = script.map(Path::to_path_buf).unwrap_or_else(|| results.with_extension("py"));
    std::fs::write(&target, text)?;
    Ok((target, warnings))
}

/// Sizes the global worker pool from [`THREADS_ENV`] when set.
pub fn configure_threads() -> Result<(), LabError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| LabError::Validation {
        key: THREADS_ENV.into(),
        message: format!("{raw:?} is not a positive thread count"),
    })?;
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
