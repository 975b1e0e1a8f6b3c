//! Output files plus a manifest naming the config hash and a digest of every file.

use std::path::PathBuf;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub struct Output {
    dir: PathBuf,
    config: RunConfig,
    files: Vec<(String, String)>,
    pub quiet: bool,
}

impl Output {
    pub fn new(dir: PathBuf, config: RunConfig, quiet: bool) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir)?;
        Ok(Output {
            dir,
            config,
            files: Vec::new(),
            quiet,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.files.push((name.to_string(), sha256_hex(bytes)));
        Ok(())
    }

    /// Pretty JSON with a trailing newline, echoed to stdout unless quiet.
    pub fn json(&mut self, name: &str, v: &Value) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Data(e.to_string()))?;
        s.push('\n');
        if !self.quiet {
            print!("{s}");
        }
        self.write(name, s.as_bytes())
    }

    pub fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Data(e.to_string());
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
        if !self.quiet {
            println!(
                "wrote {} ({} rows)",
                self.dir.join(name).display(),
                rows.len()
            );
        }
        self.write(name, &bytes)
    }

    pub fn finish(self) -> Result<(), CliError> {
        let manifest = json!({
            "command": self.config.command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config.values,
            "config_hash": sha256_hex(self.config.canonical().as_bytes()),
            "outputs": self.files.iter().map(|(f, h)| json!({ "file": f, "sha256": h })).collect::<Vec<_>>(),
        });
        let mut s =
            serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Data(e.to_string()))?;
        s.push('\n');
        // named after the primary output so runs of one command with different modes coexist
        let stem = self
            .files
            .first()
            .and_then(|(f, _)| f.split('.').next())
            .unwrap_or(&self.config.command)
            .to_string();
        std::fs::write(self.dir.join(format!("{stem}.manifest.json")), s)?;
        Ok(())
    }
}

/// Shortest round-trip formatting, stable across runs.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
