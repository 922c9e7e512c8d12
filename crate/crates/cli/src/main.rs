//! `frachs`: experiments on fractional Hardy-Sobolev quotients from the shell.
//!
//! Exit status: 0 success, 1 I/O or runtime failure, 2 invalid config or
//! hypotheses, 3 solver did not converge (reports are still written).

mod commands;
mod config;
mod error;
mod output;
mod schema;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use config::{Command, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "frachs", version, about = "Pseudospectral experiments for fractional Hardy-Sobolev quotients")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

/// Keys shared by every subcommand; each mirrors a config key.
#[derive(Args, Debug, Default)]
struct Common {
    /// JSON config file; flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// problem.n
    #[arg(long)]
    n: Option<usize>,
    /// problem.alpha
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// problem.s
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    /// problem.gamma
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// grid.N
    #[arg(long = "N", id = "grid_n")]
    npts: Option<usize>,
    /// grid.L
    #[arg(long = "L", id = "grid_l")]
    half_length: Option<f64>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Any config key as PATH=VALUE with a JSON (or bare string) value;
    /// a PATH without a section means solver.PATH.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    set: Vec<String>,
}

/// Descent controls shared by minimize and mountain-pass.
#[derive(Args, Debug, Default)]
struct Descent {
    /// Seed profile: bubble, gaussian or random-smooth.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Table of the sharp Hardy constant over alpha.
    HardyConstant {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
    },
    /// Quotient and energy of a named profile.
    Quotient {
        #[command(flatten)]
        common: Common,
        /// bubble, gaussian or random-smooth.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Minimize the Hardy-Sobolev quotient.
    Minimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        descent: Descent,
    },
    /// Quotient of a translated bubble or extremal (s = 0).
    TranslateScan {
        #[command(flatten)]
        common: Common,
        /// bubble or extremal.
        #[arg(long)]
        source: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        deltas: Option<Vec<f64>>,
    },
    /// Mountain pass for the doubly critical energy.
    MountainPass {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        descent: Descent,
    },
    /// Compare extension energy with the seminorm of the trace.
    ExtensionCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        profile: Option<String>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        height: Option<f64>,
    },
    /// Run a command over the Cartesian product of parameter axes.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Command to sweep.
        #[arg(long, value_enum)]
        over: Option<Command>,
        /// PATH=V1,V2,... (repeatable), e.g. problem.alpha=0.5,0.75
        #[arg(long = "axis", value_name = "PATH=VALUES")]
        axes: Vec<String>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the CSV column documentation (SCHEMA.md).
    Schema {
        /// Write to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn json_or_string(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

struct Layers {
    file: Option<Value>,
    flags: Map<String, Value>,
}

impl Layers {
    fn section(&mut self, name: &str) -> &mut Map<String, Value> {
        let slot = self.flags.entry(name.to_string()).or_insert_with(|| Value::Object(Map::new()));
        if !slot.is_object() {
            *slot = Value::Object(Map::new());
        }
        slot.as_object_mut().expect("just made an object")
    }

    fn put<T: Into<Value>>(&mut self, section: &str, key: &str, v: Option<T>) {
        if let Some(v) = v {
            self.section(section).insert(key.to_string(), v.into());
        }
    }

    fn from_common(c: &Common) -> Result<Self, CliError> {
        let file = c.config.as_deref().map(config::read_file).transpose()?;
        let mut layers = Layers { file, flags: Map::new() };
        layers.put("problem", "n", c.n);
        layers.put("problem", "alpha", c.alpha);
        layers.put("problem", "s", c.s);
        layers.put("problem", "gamma", c.gamma);
        layers.put("grid", "N", c.npts);
        layers.put("grid", "L", c.half_length);
        if let Some(o) = &c.output {
            layers.flags.insert("output".into(), json!(o));
        }
        if let Some(seed) = c.seed {
            layers.flags.insert("seed".into(), json!(seed));
        }
        for item in &c.set {
            let (path, raw) = item
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("--set {item}: expected PATH=VALUE")))?;
            let value = json_or_string(raw);
            match path.split_once('.') {
                Some((section, key)) => {
                    layers.section(section).insert(key.to_string(), value);
                }
                None if matches!(path, "output" | "seed") => {
                    layers.flags.insert(path.to_string(), value);
                }
                None => {
                    layers.section("solver").insert(path.to_string(), value);
                }
            }
        }
        Ok(layers)
    }

    fn descent(&mut self, d: &Descent) {
        self.put("solver", "init", d.init.clone());
        self.put("solver", "step", d.step);
        self.put("solver", "max_iters", d.max_iters);
        self.put("solver", "tol", d.tol);
    }

    fn resolve(&self, cmd: Command) -> Result<RunConfig, CliError> {
        let flags = Value::Object(self.flags.clone());
        match &self.file {
            Some(f) => config::resolve(cmd, &[("config file", f), ("flags", &flags)]),
            None => config::resolve(cmd, &[("flags", &flags)]),
        }
    }
}

/// Exit code, report.csv row and message of one finished run.
pub struct Finished {
    pub code: u8,
    pub summary: Option<Vec<String>>,
    pub message: Option<String>,
}

/// Runs one command and writes its artifacts.
pub fn run_single(cmd: Command, cfg: &RunConfig) -> Finished {
    let done = commands::run(cmd, cfg).and_then(|out| {
        output::emit(cmd, cfg, &out)?;
        Ok(out)
    });
    match done {
        Ok(out) => Finished {
            code: if out.converged { 0 } else { 3 },
            summary: Some(out.summary),
            message: out.note,
        },
        Err(e) => Finished { code: e.exit_code(), summary: None, message: Some(e.to_string()) },
    }
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let (cmd, layers) = match &cli.command {
        Sub::Schema { output } => {
            let text = schema::render();
            match output {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            return Ok(0);
        }
        Sub::HardyConstant { common, alphas } => {
            let mut l = Layers::from_common(common)?;
            l.put("solver", "alphas", alphas.clone());
            (Command::HardyConstant, l)
        }
        Sub::Quotient { common, profile } => {
            let mut l = Layers::from_common(common)?;
            l.put("solver", "profile", profile.clone());
            (Command::Quotient, l)
        }
        Sub::Minimize { common, descent } => {
            let mut l = Layers::from_common(common)?;
            l.descent(descent);
            (Command::Minimize, l)
        }
        Sub::TranslateScan { common, source, deltas } => {
            let mut l = Layers::from_common(common)?;
            l.put("solver", "source", source.clone());
            l.put("solver", "deltas", deltas.clone());
            (Command::TranslateScan, l)
        }
        Sub::MountainPass { common, descent } => {
            let mut l = Layers::from_common(common)?;
            l.descent(descent);
            (Command::MountainPass, l)
        }
        Sub::ExtensionCheck { common, profile, levels, height } => {
            let mut l = Layers::from_common(common)?;
            l.put("solver", "profile", profile.clone());
            l.put("solver", "levels", *levels);
            l.put("solver", "height", *height);
            (Command::ExtensionCheck, l)
        }
        Sub::Sweep { common, over, axes, jobs } => {
            let mut l = Layers::from_common(common)?;
            l.put("solver", "command", over.map(|c| c.name()));
            l.put("solver", "jobs", *jobs);
            if !axes.is_empty() {
                let mut map = Map::new();
                for item in axes {
                    let (path, raw) = item.split_once('=').ok_or_else(|| {
                        CliError::Validation(format!("--axis {item}: expected PATH=V1,V2,..."))
                    })?;
                    let values: Vec<Value> = raw.split(',').map(json_or_string).collect();
                    map.insert(path.to_string(), Value::Array(values));
                }
                l.section("solver").insert("axes".into(), Value::Object(map));
            }
            (Command::Sweep, l)
        }
    };
    let cfg = layers.resolve(cmd)?;
    if cmd == Command::Sweep {
        let code = sweep::run(&cfg)?;
        eprintln!("sweep finished with exit code {code}; see {}", cfg.output.join("sweep.csv").display());
        return Ok(code);
    }
    let done = run_single(cmd, &cfg);
    match done.code {
        0 | 3 => {
            output::write_atomic(&cfg.output, "SCHEMA.md", schema::render().as_bytes())?;
            if let Some(m) = &done.message {
                eprintln!("not converged: {m}");
            }
            eprintln!("wrote {}", cfg.output.join("report.json").display());
        }
        _ => eprintln!("error: {}", done.message.as_deref().unwrap_or("unknown failure")),
    }
    Ok(done.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
