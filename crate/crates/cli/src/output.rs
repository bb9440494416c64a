//! Artifact directory: CSV and JSON files stamped with the config hash.

use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::CliError;

/// Version of the manifest and report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// An output directory that records every file written into it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    hash: String,
    written: Vec<String>,
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    schema_version: u32,
    config_hash: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Rust's shortest round-trip formatting; `inf`/`NaN` spelled out.
pub fn num(x: f64) -> String {
    format!("{x}")
}

impl OutputDir {
    pub fn create(root: &Path, hash: &str) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), hash: hash.to_string(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Files written so far, relative to the root, in order.
    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// A child directory with its own record; merge it back with [`OutputDir::adopt`].
    pub fn child(&self, rel: &str) -> Result<Self, CliError> {
        Self::create(&self.root.join(rel), &self.hash)
    }

    pub fn adopt(&mut self, prefix: &str, child: OutputDir) {
        self.written.extend(child.written.into_iter().map(|p| format!("{prefix}/{p}")));
    }

    fn open(&mut self, rel: &str) -> Result<fs::File, CliError> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        self.written.push(rel.to_string());
        Ok(fs::File::create(path)?)
    }

    /// CSV with a `# config <hash>` first line, then the header.
    pub fn csv(&mut self, rel: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
        let mut file = self.open(rel)?;
        writeln!(file, "# config {}", self.hash)?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Numeric CSV.
    pub fn table(&mut self, rel: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<(), CliError> {
        self.csv(rel, header, rows.into_iter().map(|r| r.into_iter().map(num).collect()))
    }

    /// Pretty JSON object carrying `schema_version` and `config_hash` next to the body's fields.
    pub fn json<T: Serialize>(&mut self, rel: &str, body: &T) -> Result<(), CliError> {
        let mut file = self.open(rel)?;
        let stamped = Stamped { schema_version: SCHEMA_VERSION, config_hash: &self.hash, body };
        serde_json::to_writer_pretty(&mut file, &stamped)?;
        writeln!(file)?;
        Ok(())
    }

    /// Plain text, prefixed by `comment` and the hash.
    pub fn text(&mut self, rel: &str, comment: &str, body: &str) -> Result<(), CliError> {
        let mut file = self.open(rel)?;
        writeln!(file, "{comment} config {}", self.hash)?;
        file.write_all(body.as_bytes())?;
        Ok(())
    }
}

/// Wall-clock phases, kept out of the reports so those stay reproducible.
#[derive(Debug, Default, Serialize)]
pub struct Timings {
    pub phases: Vec<(String, f64)>,
}

impl Timings {
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.phases.push((name.to_string(), start.elapsed().as_secs_f64()));
        out
    }

    pub fn merge(&mut self, prefix: &str, other: Timings) {
        self.phases.extend(other.phases.into_iter().map(|(n, s)| (format!("{prefix}/{n}"), s)));
    }
}
