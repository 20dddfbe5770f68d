//! Command-line runner: resolves a JSON run configuration, dispatches one
//! command, and writes its data files plus a manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

pub use commands::Command;
pub use config::RunConfig;
pub use error::CliError;
pub use presets::{catalog, Preset};

/// Environment variable that replaces the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "HSC_OUTPUT_DIR";

pub struct Outcome {
    pub manifest: PathBuf,
    pub summary: Value,
    pub flags: Vec<String>,
}

impl Outcome {
    /// 0 for a clean result, 4 when data were written but flagged.
    pub fn exit_code(&self) -> i32 {
        if self.flags.is_empty() {
            0
        } else {
            4
        }
    }
}

/// Overlay `top` onto `base`, merging objects key by key.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Build the run configuration from an optional preset, an optional config
/// document laid over it, dotted overrides, and the output-directory
/// overrides (flag first, then environment).
pub fn resolve_config(
    preset: Option<&str>,
    document: Option<Value>,
    overrides: &[String],
    out_dir: Option<&Path>,
) -> Result<RunConfig, CliError> {
    let mut doc = match preset {
        Some(name) => {
            let p = presets::find(name).ok_or_else(|| CliError::config("preset", format!("unknown preset `{name}`")))?;
            serde_json::to_value(&p.config).map_err(|e| CliError::Output(e.to_string()))?
        }
        None if document.is_some() => Value::Object(Default::default()),
        None => serde_json::to_value(RunConfig::default()).map_err(|e| CliError::Output(e.to_string()))?,
    };
    if let Some(d) = document {
        if !d.is_object() {
            return Err(CliError::config("", "config document must be a JSON object"));
        }
        merge(&mut doc, d);
    }
    for o in overrides {
        config::apply_override(&mut doc, o)?;
    }
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    if let Some(dir) = out_dir.map(Path::to_path_buf).or(env_dir) {
        let text = dir.to_str().ok_or_else(|| CliError::config("output.dir", "output directory is not valid UTF-8"))?;
        doc["output"]["dir"] = json!(text);
    }
    config::from_value(doc)
}

/// Run one command and write its outputs.
pub fn run(command: Command, preset: Option<&str>, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let p = cfg.model()?;
    let prefix = cfg
        .output
        .prefix
        .clone()
        .unwrap_or_else(|| preset.unwrap_or(command.as_str()).to_string());
    let mut out = output::Outputs::create(&cfg.output.dir, &prefix, cfg.output.plots)?;
    let report = commands::execute(command, cfg, &p, &mut out)?;
    let summary = json!({
        "command": command,
        "params": p,
        "result": report.summary,
        "flags": report.flags,
    });
    out.json("summary", &summary)?;
    let manifest = json!({
        "command": command,
        "preset": preset,
        "versions": {"hsc-cli": env!("CARGO_PKG_VERSION"), "hsc-core": hsc_core::VERSION},
        "config": cfg,
        "params": p,
        "status": if report.flags.is_empty() { "ok" } else { "unconverged" },
        "flags": report.flags,
        "files": out.files(),
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    let name = out.json("manifest", &manifest)?;
    Ok(Outcome {
        manifest: out.path_of(&name),
        summary,
        flags: report.flags,
    })
}
