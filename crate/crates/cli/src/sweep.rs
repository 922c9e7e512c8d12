//! Cartesian parameter sweeps over any single command.

use std::fs;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{resolve, Command, RunConfig, SweepSolver};
use crate::error::CliError;
use crate::output::{report_json, write_atomic};
use crate::schema;
use crate::{run_single, Finished};

struct Entry {
    index: usize,
    values: Vec<Value>,
    config: RunConfig,
}

fn set_path(layer: &mut Map<String, Value>, path: &str, value: Value) {
    match path.split_once('.') {
        Some((section, key)) => {
            let slot = layer.entry(section.to_string()).or_insert_with(|| Value::Object(Map::new()));
            if let Value::Object(m) = slot {
                m.insert(key.to_string(), value);
            }
        }
        None => {
            layer.insert(path.to_string(), value);
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn plan(cfg: &RunConfig, sweep: &SweepSolver) -> Result<Vec<Entry>, CliError> {
    if sweep.command == Command::Sweep {
        return Err(CliError::Validation("solver.command: sweeps cannot be nested".into()));
    }
    if sweep.jobs == 0 {
        return Err(CliError::Validation("solver.jobs must be at least 1".into()));
    }
    let mut axes = Vec::new();
    let mut errors = Vec::new();
    for (path, values) in &sweep.axes {
        match values.as_array() {
            Some(list) if !list.is_empty() => axes.push((path.clone(), list.clone())),
            _ => errors.push(format!("solver.axes.{path}: expected a non-empty array")),
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Validation(errors.join("\n")));
    }
    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    let mut base = Map::new();
    base.insert("problem".into(), serde_json::to_value(cfg.problem).unwrap());
    base.insert("grid".into(), serde_json::to_value(cfg.grid).unwrap());
    base.insert("solver".into(), Value::Object(sweep.solver.clone()));
    base.insert("seed".into(), json!(cfg.seed));

    let mut entries = Vec::with_capacity(total);
    for index in 0..total {
        let mut layer = base.clone();
        let mut rest = index;
        let mut values = vec![Value::Null; axes.len()];
        // first axis varies slowest
        for (k, (path, list)) in axes.iter().enumerate().rev() {
            let v = list[rest % list.len()].clone();
            rest /= list.len();
            set_path(&mut layer, path, v.clone());
            values[k] = v;
        }
        layer.insert("output".into(), json!(cfg.output.join(format!("{index:04}"))));
        let layer = Value::Object(layer);
        match resolve(sweep.command, &[("entry", &layer)]) {
            Ok(config) => entries.push(Entry { index, values, config }),
            Err(e) => {
                let at: Vec<String> =
                    axes.iter().zip(&values).map(|((p, _), v)| format!("{p}={}", cell(v))).collect();
                errors.push(format!("entry {index} [{}]: {e}", at.join(", ")));
            }
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Validation(format!("sweep rejected:\n{}", errors.join("\n"))));
    }
    Ok(entries)
}

/// Runs every entry in a pool of `jobs` workers; returns the exit code.
pub fn run(cfg: &RunConfig) -> Result<u8, CliError> {
    let sweep: SweepSolver = cfg.solver()?;
    let entries = plan(cfg, &sweep)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep.jobs)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let results: Vec<Finished> =
        pool.install(|| entries.par_iter().map(|e| run_single(sweep.command, &e.config)).collect());

    let inner = schema::columns(sweep.command.name(), "report.csv");
    let mut header = vec!["index".to_string()];
    header.extend(sweep.axes.keys().cloned());
    header.push("exit_code".into());
    header.extend(inner.iter().map(|c| c.to_string()));
    let mut text = header.join(",") + "\n";
    let mut listing = Vec::new();
    for (entry, done) in entries.iter().zip(&results) {
        let mut row = vec![entry.index.to_string()];
        row.extend(entry.values.iter().map(cell));
        row.push(done.code.to_string());
        match &done.summary {
            Some(s) => row.extend(s.iter().cloned()),
            None => row.extend(std::iter::repeat(String::new()).take(inner.len())),
        }
        text.push_str(&row.join(","));
        text.push('\n');
        listing.push(json!({
            "index": entry.index,
            "values": entry.values,
            "output": entry.config.output,
            "exit_code": done.code,
            "message": done.message,
        }));
    }
    let code = [1, 2, 3].into_iter().find(|c| results.iter().any(|r| r.code == *c)).unwrap_or(0);
    fs::create_dir_all(&cfg.output)?;
    write_atomic(&cfg.output, "sweep.csv", text.as_bytes())?;
    write_atomic(&cfg.output, "SCHEMA.md", schema::render().as_bytes())?;
    let result = json!({"command": sweep.command, "entries": listing});
    write_atomic(&cfg.output, "report.json", &report_json(Command::Sweep, cfg, code == 0, &result))?;
    Ok(code)
}
