//! Versioned CSV results and the metadata sidecar, both written atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use strichartz_core::cutoff::ETA_FORMULA;
use tempfile::NamedTempFile;

use crate::config::ExperimentConfig;
use crate::runner::{ResultRow, RunInfo};
use crate::LabError;

pub const SCHEMA_VERSION: u32 = 1;
pub const COLUMNS: [&str; 6] = ["experiment", "params", "metric", "value", "error", "seed"];

fn schema_line() -> String {
    format!("# strichartz-lab results, schema_version = {SCHEMA_VERSION}\r\n")
}

/// `<stem>.meta.toml` next to the results file.
pub fn sidecar_path(results: &Path) -> PathBuf {
    let stem = results.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "results".into());
    results.with_file_name(format!("{stem}.meta.toml"))
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| LabError::Io(e.error))?;
    Ok(())
}

pub fn render_csv(rows: &[ResultRow]) -> Result<Vec<u8>, LabError> {
    let mut buf = schema_line().into_bytes();
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(&mut buf);
        w.write_record(COLUMNS)?;
        for r in rows {
            w.write_record([&r.experiment, &r.params, &r.metric, &r.value, &r.error, &r.seed.to_string()])?;
        }
        w.flush()?;
    }
    Ok(buf)
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<(), LabError> {
    atomic_write(path, &render_csv(rows)?)
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, LabError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(LabError::Validation { key: "header".into(), message: format!("unexpected columns {header:?}") });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let seed = rec[5]
            .parse()
            .map_err(|_| LabError::Validation { key: "seed".into(), message: format!("bad seed {:?}", &rec[5]) })?;
        rows.push(ResultRow {
            experiment: rec[0].to_string(),
            params: rec[1].to_string(),
            metric: rec[2].to_string(),
            value: rec[3].to_string(),
            error: rec[4].to_string(),
            seed,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct Meta<'a> {
    schema_version: u32,
    software: &'a str,
    version: &'a str,
    experiment: String,
    kind: &'a str,
    seed: u64,
    rows: usize,
    cutoff_eta: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    time_window: Option<[f64; 2]>,
    config: toml::Table,
}

pub fn render_meta(cfg: &ExperimentConfig, info: &RunInfo, rows: usize) -> String {
    let config: toml::Table = toml::from_str(&cfg.to_toml_string()).expect("serialized config parses");
    let meta = Meta {
        schema_version: SCHEMA_VERSION,
        software: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: cfg.experiment_id(),
        kind: cfg.kind.name(),
        seed: cfg.seed,
        rows,
        cutoff_eta: ETA_FORMULA,
        grid: info.grid.as_deref(),
        time_window: info.time_window.map(|(a, b)| [a, b]),
        config,
    };
    toml::to_string(&meta).expect("metadata serializes")
}

pub fn write_meta(path: &Path, cfg: &ExperimentConfig, info: &RunInfo, rows: usize) -> Result<(), LabError> {
    atomic_write(path, render_meta(cfg, info, rows).as_bytes())
}
