//! Per-run output directory: data files named `<prefix>_<kind>.<ext>`,
//! optional gnuplot scripts, and the manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub struct Outputs {
    dir: PathBuf,
    prefix: String,
    plots: bool,
    files: Vec<String>,
}

impl Outputs {
    pub fn create(dir: &Path, prefix: &str, plots: bool) -> Result<Self, CliError> {
        if prefix.is_empty() || prefix.contains(['/', '\\']) {
            return Err(CliError::config("output.prefix", format!("`{prefix}` is not a usable file name prefix")));
        }
        fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            prefix: prefix.to_string(),
            plots,
            files: Vec::new(),
        })
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn path_of(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn open(&mut self, name: String) -> Result<BufWriter<File>, CliError> {
        let path = self.dir.join(&name);
        let f = File::create(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.files.push(name);
        Ok(BufWriter::new(f))
    }

    /// Write `<prefix>_<kind>.csv` with `write`, plus a plot script when enabled.
    pub fn csv<F>(&mut self, kind: &str, write: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    {
        let name = format!("{}_{kind}.csv", self.prefix);
        let mut w = self.open(name.clone())?;
        write(&mut w)?;
        w.flush()?;
        if self.plots {
            let script = plot_script(kind, &name);
            let mut g = self.open(format!("{}_{kind}.gp", self.prefix))?;
            g.write_all(script.as_bytes())?;
            g.flush()?;
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, kind: &str, value: &T) -> Result<String, CliError> {
        let name = format!("{}_{kind}.json", self.prefix);
        let mut w = self.open(name.clone())?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Output(e.to_string()))?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(name)
    }
}

/// Columns and style for each data kind.
fn plot_spec(kind: &str) -> (&'static str, &'static str) {
    match kind {
        "trajectory" => ("1:2", "lines"),
        "events" => ("1:3", "points pt 7 ps 0.4"),
        "orbit_diagram" => ("1:4", "dots"),
        "poincare" | "embedding" | "c0" | "locus" => ("2:3", "lines"),
        "roots" => ("1:2", "points pt 7"),
        "lyapunov" => ("1:2", "lines"),
        "slow_manifold" => ("1:4", "lines"),
        "nullcline" => ("1:2", "points pt 7 ps 0.4"),
        _ => ("1:2", "linespoints"),
    }
}

fn plot_script(kind: &str, data: &str) -> String {
    let (using, style) = plot_spec(kind);
    let plot = if kind == "lyapunov" {
        format!("plot for [i=2:*] '{data}' using 1:i with lines title columnhead(i)\n")
    } else {
        format!("plot '{data}' using {using} with {style}\n")
    };
    format!("set datafile separator ','\nset key autotitle columnhead\nset title '{kind}'\n{plot}")
}
