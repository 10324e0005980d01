use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::config::RunConfig;
use crate::failure::{Failure, Outcome};

/// Output directory of a run. Each file is written to a temporary file in
/// the same directory and renamed into place.
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Outcome<Self> {
        std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Outcome<()> {
        let target = self.dir.join(name);
        let mut tmp = NamedTempFile::new_in(&self.dir).map_err(|e| io_failure(&self.dir, e))?;
        tmp.write_all(bytes).map_err(|e| io_failure(&target, e))?;
        tmp.persist(&target)
            .map_err(|e| io_failure(&target, e.error))?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(())
    }

    /// Collects the output of a `write_csv`-style writer and stores it.
    pub fn write_with<F>(&mut self, name: &str, fill: F) -> Outcome<()>
    where
        F: FnOnce(&mut Vec<u8>) -> fraclab::Result<()>,
    {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        self.write(name, &buf)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Outcome<()> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Failure::Validation(format!("cannot serialise {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes the resolved config and the provenance record. The timestamp
    /// lives only in `provenance.json`.
    pub fn finish(
        mut self,
        command: &str,
        config: &RunConfig,
        threads: usize,
    ) -> Outcome<Vec<String>> {
        self.write("config.resolved.toml", config.to_toml()?.as_bytes())?;
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut files = self.written.clone();
        let record = Provenance {
            command,
            timestamp_unix: timestamp,
            seed: config.seed,
            depth: config.depth,
            threads,
            fraclab_version: env!("CARGO_PKG_VERSION"),
            alpha_hint: config.spec.alpha_hint(config.depth)?,
            spec: &config.spec,
            files: &files,
        };
        self.write_json("provenance.json", &record)?;
        files.push("provenance.json".into());
        Ok(files)
    }
}

#[derive(Serialize)]
struct Provenance<'a> {
    command: &'a str,
    timestamp_unix: u64,
    seed: u64,
    depth: usize,
    threads: usize,
    fraclab_version: &'a str,
    alpha_hint: f64,
    spec: &'a fraclab::geom::FractalSpec,
    files: &'a [String],
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}
