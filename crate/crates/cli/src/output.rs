// SPDX-License-Identifier: Apache-2.0

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rydgate::config::RunConfig;
use rydgate::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub const SUMMARY_SCHEMA: &str = "rydgate-summary v1";
pub const LOG_SCHEMA: &str = "rydgate-optlog v1";

/// Artifact sink rooted at the output directory.
pub struct Output {
    dir: PathBuf,
    quiet: bool,
}

impl Output {
    pub fn new(cfg: &RunConfig, quiet: bool) -> Result<Self> {
        let dir = cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, quiet })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn create(&self, name: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.path(name))?))
    }

    /// Human-readable line on stdout.
    pub fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            // a closed pipe (e.g. `| head`) is not an error for the run
            let _ = writeln!(std::io::stdout(), "{}", line.as_ref());
        }
    }

    /// Writes `<stem>-summary.json` with the resolved configuration and the
    /// result; feeding the file back through `--config` repeats the run.
    pub fn summary(&self, stem: &str, cfg: &RunConfig, result: impl Serialize) -> Result<PathBuf> {
        let doc = json!({
            "schema": SUMMARY_SCHEMA,
            "version": env!("CARGO_PKG_VERSION"),
            "config": cfg,
            "result": to_value(result)?,
        });
        let path = self.path(&format!("{stem}-summary.json"));
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, &doc).map_err(json_err)?;
        writeln!(w)?;
        w.flush()?;
        self.say(format!("summary: {}", path.display()));
        Ok(path)
    }

    pub fn json(&self, name: &str, value: impl Serialize) -> Result<PathBuf> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, &value).map_err(json_err)?;
        writeln!(w)?;
        w.flush()?;
        Ok(path)
    }
}

pub fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(json_err)
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Appends one JSON record per line.
pub fn append_ndjson(path: &Path, record: &Value) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    let line = serde_json::to_string(record).map_err(json_err)?;
    writeln!(f, "{line}")?;
    Ok(())
}

pub fn percent(f: f64) -> String {
    format!("{:.4} %", 100.0 * f)
}
