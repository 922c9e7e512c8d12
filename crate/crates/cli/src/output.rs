//! Report envelope, CSV rendering and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use tempfile::NamedTempFile;

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::schema;

pub const REPORT_VERSION: u32 = 1;

/// Result of one command before it touches the disk.
pub struct Outcome {
    pub converged: bool,
    /// Why the run did not converge, when it did not.
    pub note: Option<String>,
    pub result: Value,
    /// The single report.csv row, in schema order.
    pub summary: Vec<String>,
    pub files: Vec<(String, Vec<u8>)>,
}

#[derive(Serialize)]
struct GridMeta {
    n: usize,
    #[serde(rename = "N")]
    npts: usize,
    #[serde(rename = "L")]
    half_length: f64,
    dx: f64,
    dxi: f64,
    points: usize,
    nodes: &'static str,
}

#[derive(Serialize)]
struct Report<'a> {
    report_version: u32,
    command: &'static str,
    status: &'static str,
    config: &'a RunConfig,
    grid: GridMeta,
    result: &'a Value,
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Renders a CSV with the schema columns of `command`/`file`.
pub fn csv(command: &str, file: &str, rows: &[Vec<String>]) -> Vec<u8> {
    let cols = schema::columns(command, file);
    let mut out = cols.join(",");
    out.push('\n');
    for row in rows {
        assert_eq!(row.len(), cols.len(), "row width for {command}/{file}");
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        fs::set_permissions(tmp.path(), fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(dir.join(name)).map_err(|e| CliError::Runtime(e.error.to_string()))?;
    Ok(())
}

fn grid_meta(cfg: &RunConfig) -> GridMeta {
    let (n, npts, l) = (cfg.problem.n, cfg.grid.npts, cfg.grid.half_length);
    GridMeta {
        n,
        npts,
        half_length: l,
        dx: 2.0 * l / npts as f64,
        dxi: 1.0 / (2.0 * l),
        points: npts.saturating_pow(n as u32),
        nodes: "x_j = -L + (j + 1/2) dx",
    }
}

pub fn report_json(cmd: Command, cfg: &RunConfig, converged: bool, result: &Value) -> Vec<u8> {
    let report = Report {
        report_version: REPORT_VERSION,
        command: cmd.name(),
        status: if converged { "ok" } else { "not_converged" },
        config: cfg,
        grid: grid_meta(cfg),
        result,
    };
    let mut bytes = serde_json::to_vec_pretty(&report).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

/// Writes report.json, report.csv and the command tables into the output directory.
pub fn emit(cmd: Command, cfg: &RunConfig, outcome: &Outcome) -> Result<(), CliError> {
    let dir = cfg.output.as_path();
    fs::create_dir_all(dir)?;
    for (name, bytes) in &outcome.files {
        write_atomic(dir, name, bytes)?;
    }
    write_atomic(dir, "report.csv", &csv(cmd.name(), "report.csv", &[outcome.summary.clone()]))?;
    write_atomic(dir, "report.json", &report_json(cmd, cfg, outcome.converged, &outcome.result))?;
    Ok(())
}
