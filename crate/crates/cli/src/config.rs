//! Run configuration: built-in defaults, then the JSON file, then flags.
//!
//! Every key of the file and of the flag overlay is checked on its own
//! against the defaults, so one pass reports all offending keys.

use std::fs;
use std::path::{Path, PathBuf};

use frachs::solvers::{HardyConfig, MinimizerConfig, MountainPassConfig};
use frachs::profiles::ProfileKind;
use frachs::{make_grid, ProblemParams, SpectralGrid};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    HardyConstant,
    Quotient,
    Minimize,
    TranslateScan,
    MountainPass,
    ExtensionCheck,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::HardyConstant => "hardy-constant",
            Command::Quotient => "quotient",
            Command::Minimize => "minimize",
            Command::TranslateScan => "translate-scan",
            Command::MountainPass => "mountain-pass",
            Command::ExtensionCheck => "extension-check",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub n: usize,
    pub alpha: f64,
    pub s: f64,
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "N")]
    pub npts: usize,
    #[serde(rename = "L")]
    pub half_length: f64,
}

/// Fully resolved configuration, embedded verbatim in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    pub grid: GridSection,
    pub solver: Value,
    pub output: PathBuf,
    pub seed: u64,
}

impl RunConfig {
    pub fn params(&self) -> Result<ProblemParams, CliError> {
        let p = self.problem;
        Ok(ProblemParams::new(p.n, p.alpha, p.s, p.gamma)?)
    }

    pub fn grid(&self) -> Result<SpectralGrid, CliError> {
        Ok(make_grid(self.problem.n, self.grid.npts, self.grid.half_length)?)
    }

    pub fn solver<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        serde_json::from_value(self.solver.clone()).map_err(|e| CliError::Validation(format!("solver: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardyConstantSolver {
    /// Empty means the problem's alpha.
    pub alphas: Vec<f64>,
    /// Also minimize the discrete Hardy ratio on the grid.
    pub minimize: Option<HardyConfig>,
}

impl Default for HardyConstantSolver {
    fn default() -> Self {
        Self { alphas: Vec::new(), minimize: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuotientSolver {
    pub profile: ProfileKind,
}

impl Default for QuotientSolver {
    fn default() -> Self {
        Self { profile: ProfileKind::Bubble }
    }
}

/// A solver config plus the profile that seeds it, stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct Seeded<C> {
    pub init: ProfileKind,
    pub config: C,
}

impl<C: Serialize + DeserializeOwned> Seeded<C> {
    fn from_value(v: Value) -> Result<Self, String> {
        let Value::Object(mut map) = v else {
            return Err("expected an object".into());
        };
        let init = match map.remove("init") {
            Some(v) => serde_json::from_value(v).map_err(|e| e.to_string())?,
            None => return Err("missing field `init`".into()),
        };
        let config = serde_json::from_value(Value::Object(map)).map_err(|e| e.to_string())?;
        Ok(Self { init, config })
    }

    fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(&self.config).expect("solver config serializes");
        v.as_object_mut()
            .expect("solver config is a struct")
            .insert("init".into(), serde_json::to_value(self.init).unwrap());
        v
    }
}

pub type MinimizeSolver = Seeded<MinimizerConfig>;
pub type MountainPassSolver = Seeded<MountainPassConfig>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanSource {
    /// The analytic s = 0 bubble.
    Bubble,
    /// A discrete minimizer at gamma = 0, s = 0 (mean gauge), centered.
    Extremal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TranslateScanSolver {
    pub source: ScanSource,
    /// Spacing of the automatic shift list, in cells.
    pub step_cells: usize,
    /// Explicit shifts; null scans every representable multiple of the step.
    pub deltas: Option<Vec<f64>>,
}

impl Default for TranslateScanSolver {
    fn default() -> Self {
        Self { source: ScanSource::Extremal, step_cells: 4, deltas: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtensionSolver {
    pub profile: ProfileKind,
    pub levels: usize,
    /// Null picks the recommended height for the grid.
    pub height: Option<f64>,
    pub write_profiles: bool,
}

impl Default for ExtensionSolver {
    fn default() -> Self {
        Self { profile: ProfileKind::RandomSmooth, levels: 128, height: None, write_profiles: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSolver {
    pub command: Command,
    /// Config path ("problem.alpha", "grid.N", "seed", "solver.step", ...) to values.
    pub axes: Map<String, Value>,
    pub jobs: usize,
    /// Solver section handed to every entry.
    pub solver: Map<String, Value>,
}

impl Default for SweepSolver {
    fn default() -> Self {
        Self { command: Command::Quotient, axes: Map::new(), jobs: 1, solver: Map::new() }
    }
}

pub fn solver_defaults(cmd: Command) -> Value {
    let to = |v: Result<Value, serde_json::Error>| v.expect("defaults serialize");
    match cmd {
        Command::HardyConstant => to(serde_json::to_value(HardyConstantSolver::default())),
        Command::Quotient => to(serde_json::to_value(QuotientSolver::default())),
        Command::Minimize => Seeded { init: ProfileKind::RandomSmooth, config: MinimizerConfig::default() }.to_value(),
        Command::TranslateScan => to(serde_json::to_value(TranslateScanSolver::default())),
        Command::MountainPass => Seeded { init: ProfileKind::Bubble, config: MountainPassConfig::default() }.to_value(),
        Command::ExtensionCheck => to(serde_json::to_value(ExtensionSolver::default())),
        Command::Sweep => to(serde_json::to_value(SweepSolver::default())),
    }
}

/// Parses a complete solver section for `cmd` without semantic checks.
fn parse_solver(cmd: Command, v: Value) -> Result<(), String> {
    fn typed<T: DeserializeOwned>(v: Value) -> Result<(), String> {
        serde_json::from_value::<T>(v).map(|_| ()).map_err(|e| e.to_string())
    }
    match cmd {
        Command::HardyConstant => typed::<HardyConstantSolver>(v),
        Command::Quotient => typed::<QuotientSolver>(v),
        Command::Minimize => MinimizeSolver::from_value(v).map(|_| ()),
        Command::TranslateScan => typed::<TranslateScanSolver>(v),
        Command::MountainPass => MountainPassSolver::from_value(v).map(|_| ()),
        Command::ExtensionCheck => typed::<ExtensionSolver>(v),
        Command::Sweep => typed::<SweepSolver>(v),
    }
}

pub fn parse_minimize(cfg: &RunConfig) -> Result<MinimizeSolver, CliError> {
    MinimizeSolver::from_value(cfg.solver.clone()).map_err(|e| CliError::Validation(format!("solver: {e}")))
}

pub fn parse_mountain_pass(cfg: &RunConfig) -> Result<MountainPassSolver, CliError> {
    MountainPassSolver::from_value(cfg.solver.clone()).map_err(|e| CliError::Validation(format!("solver: {e}")))
}

pub fn defaults(cmd: Command) -> Value {
    serde_json::json!({
        "problem": {"n": 1, "alpha": 0.5, "s": 0.0, "gamma": 0.0},
        "grid": {"N": 1024, "L": 50.0},
        "solver": solver_defaults(cmd),
        "output": "out",
        "seed": 0
    })
}

/// Checks each key of `section` by overriding it alone in `base`.
fn check_keys(
    path: &str,
    base: &Value,
    section: &Value,
    parse: &dyn Fn(Value) -> Result<(), String>,
    errors: &mut Vec<String>,
) {
    let (Some(base), Some(section)) = (base.as_object(), section.as_object()) else {
        errors.push(format!("{path}: expected an object"));
        return;
    };
    for (key, value) in section {
        if !base.contains_key(key) {
            errors.push(format!("{path}.{key}: unknown key"));
            continue;
        }
        let mut probe = base.clone();
        probe.insert(key.clone(), value.clone());
        if let Err(e) = parse(Value::Object(probe)) {
            errors.push(format!("{path}.{key}: {e}"));
        }
    }
}

fn typed_check<T: DeserializeOwned>(v: Value) -> Result<(), String> {
    serde_json::from_value::<T>(v).map(|_| ()).map_err(|e| e.to_string())
}

/// Collects every offending key of a user layer (file or flags).
pub fn check_layer(cmd: Command, layer: &Value, errors: &mut Vec<String>, origin: &str) {
    let base = defaults(cmd);
    let Some(layer) = layer.as_object() else {
        errors.push(format!("{origin}: top level must be an object"));
        return;
    };
    let mut local = Vec::new();
    for (key, value) in layer {
        match key.as_str() {
            "problem" => check_keys("problem", &base["problem"], value, &typed_check::<ProblemSection>, &mut local),
            "grid" => check_keys("grid", &base["grid"], value, &typed_check::<GridSection>, &mut local),
            "solver" => check_keys("solver", &base["solver"], value, &|v| parse_solver(cmd, v), &mut local),
            "output" => {
                if let Err(e) = typed_check::<PathBuf>(value.clone()) {
                    local.push(format!("output: {e}"));
                }
            }
            "seed" => {
                if let Err(e) = typed_check::<u64>(value.clone()) {
                    local.push(format!("seed: {e}"));
                }
            }
            other => local.push(format!("{other}: unknown key")),
        }
    }
    errors.extend(local.into_iter().map(|e| format!("{origin}: {e}")));
}

/// Overlays `top` on `base`: sections merge key by key, leaves are replaced.
pub fn overlay(base: &mut Value, top: &Value) {
    let (Some(b), Some(t)) = (base.as_object_mut(), top.as_object()) else {
        return;
    };
    for (key, value) in t {
        match (b.get_mut(key), value) {
            (Some(Value::Object(bs)), Value::Object(ts)) => {
                for (k, v) in ts {
                    bs.insert(k.clone(), v.clone());
                }
            }
            _ => {
                b.insert(key.clone(), value.clone());
            }
        }
    }
}

pub fn read_file(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("config {} is not valid JSON: {e}", path.display())))
}

/// Merges defaults with `layers` (lowest precedence first), then checks the
/// problem hypotheses, the grid and the solver section.
pub fn resolve(cmd: Command, layers: &[(&str, &Value)]) -> Result<RunConfig, CliError> {
    let mut errors = Vec::new();
    for (origin, layer) in layers {
        check_layer(cmd, layer, &mut errors, origin);
    }
    if !errors.is_empty() {
        return Err(CliError::Validation(format!(
            "invalid configuration ({} offending key{}):\n  {}",
            errors.len(),
            if errors.len() == 1 { "" } else { "s" },
            errors.join("\n  ")
        )));
    }
    let mut merged = defaults(cmd);
    for (_, layer) in layers {
        overlay(&mut merged, layer);
    }
    let cfg: RunConfig = serde_json::from_value(merged).map_err(|e| CliError::Validation(e.to_string()))?;
    validate(cmd, &cfg)?;
    Ok(cfg)
}

/// Semantic checks that need the whole config.
pub fn validate(cmd: Command, cfg: &RunConfig) -> Result<(), CliError> {
    match cmd {
        // per-alpha checks happen when the table is built; only n matters here
        Command::HardyConstant => {
            let s: HardyConstantSolver = cfg.solver()?;
            if s.minimize.is_some() {
                cfg.grid()?;
            }
            if !(1..=3).contains(&cfg.problem.n) {
                cfg.params()?;
            }
            return Ok(());
        }
        Command::Sweep => return Ok(()),
        _ => {}
    }
    cfg.params()?;
    cfg.grid()?;
    match cmd {
        Command::Minimize => parse_minimize(cfg)?.config.validate()?,
        Command::MountainPass => parse_mountain_pass(cfg)?.config.validate()?,
        Command::TranslateScan => {
            let s: TranslateScanSolver = cfg.solver()?;
            if s.step_cells == 0 {
                return Err(CliError::Validation("solver.step_cells must be at least 1".into()));
            }
        }
        Command::ExtensionCheck => {
            let s: ExtensionSolver = cfg.solver()?;
            if s.levels < 2 {
                return Err(CliError::Validation("solver.levels must be at least 2".into()));
            }
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn every_offending_key_is_listed() {
        let file = json!({
            "problem": {"n": 1, "alpha": "wide", "beta": 2},
            "grid": {"N": 64, "M": 3},
            "solver": {"stepp": 0.1},
            "extra": true
        });
        let err = resolve(Command::Minimize, &[("config file", &file)]).unwrap_err().to_string();
        for key in ["problem.alpha", "problem.beta", "grid.M", "solver.stepp", "extra"] {
            assert!(err.contains(key), "{key} missing from {err}");
        }
        assert!(err.contains("5 offending keys"));
    }

    #[test]
    fn flags_override_the_file() {
        let file = json!({"problem": {"alpha": 0.8, "s": 0.1}, "grid": {"N": 64, "L": 5.0}});
        let flags = json!({"problem": {"alpha": 0.6}, "solver": {"step": 0.1}});
        let cfg = resolve(Command::Minimize, &[("config file", &file), ("flags", &flags)]).unwrap();
        assert_eq!(cfg.problem.alpha, 0.6);
        assert_eq!(cfg.problem.s, 0.1);
        assert_eq!(cfg.grid.npts, 64);
        assert_eq!(parse_minimize(&cfg).unwrap().config.step, 0.1);
    }

    #[test]
    fn hypothesis_is_named() {
        let flags = json!({"problem": {"alpha": 0.5, "s": 0.5}});
        let err = resolve(Command::Quotient, &[("flags", &flags)]).unwrap_err().to_string();
        assert!(err.contains("0 ≤ s < α"), "{err}");
    }

    #[test]
    fn nested_solver_values_replace_whole() {
        let flags = json!({"solver": {"gauge": {"kind": "shell", "inner": 0.75}}});
        let cfg = resolve(Command::Minimize, &[("flags", &flags)]).unwrap();
        assert_eq!(cfg.solver["gauge"], json!({"kind": "shell", "inner": 0.75}));
    }
}
