//! Deterministic output writing: delimited text tables plus one JSON
//! manifest per output directory referencing every emitted file with its
//! SHA-256 content hash. No timestamps, no map iteration order, no float
//! formatting that depends on locale — reruns are byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Shortest round-trip decimal representation; stable across runs.
pub fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Serialize)]
struct FileEntry {
    name: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    command: String,
    seed: u64,
    /// Verbatim text of the supplied config file.
    config_text: String,
    /// Applied `GC_*` environment overrides, sorted.
    overrides: Vec<String>,
    /// The effective configuration after file, environment, and flags.
    effective: RunConfig,
    /// Scalar results, keyed deterministically.
    results: BTreeMap<String, f64>,
    /// Every emitted file with its content hash.
    files: Vec<FileEntry>,
}

/// Collects files and scalars for one command run, then writes `manifest.json`.
pub struct OutputDir {
    dir: PathBuf,
    manifest: Manifest,
}

impl OutputDir {
    pub fn create(
        dir: &Path,
        command: &str,
        seed: u64,
        config_text: &str,
        overrides: &[String],
        effective: &RunConfig,
    ) -> io::Result<OutputDir> {
        fs::create_dir_all(dir)?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            manifest: Manifest {
                command: command.to_string(),
                seed,
                config_text: config_text.to_string(),
                overrides: overrides.to_vec(),
                effective: effective.clone(),
                results: BTreeMap::new(),
                files: Vec::new(),
            },
        })
    }

    pub fn record_scalar(&mut self, key: &str, value: f64) {
        self.manifest.results.insert(key.to_string(), value);
    }

    pub fn write_file(&mut self, name: &str, contents: &str) -> io::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents.as_bytes())?;
        let mut hasher = Sha256::new();
        hasher.update(contents.as_bytes());
        self.manifest.files.push(FileEntry {
            name: name.to_string(),
            sha256: hex::encode(hasher.finalize()),
        });
        Ok(())
    }

    /// Writes the manifest; call last.
    pub fn finish(self) -> io::Result<()> {
        let json = serde_json::to_string_pretty(&self.manifest)
            .expect("manifest serialization cannot fail");
        fs::write(self.dir.join("manifest.json"), json + "\n")
    }
}

/// A surface table: header row of type coordinates, first column the time.
pub fn surface_csv(times: &[f64], coords: &[f64], values: &ndarray::Array2<f64>) -> String {
    let mut out = String::from("t");
    for c in coords {
        out.push(',');
        out.push_str(&fmt(*c));
    }
    out.push('\n');
    for (j, t) in times.iter().enumerate() {
        out.push_str(&fmt(*t));
        for i in 0..coords.len() {
            out.push(',');
            out.push_str(&fmt(values[[j, i]]));
        }
        out.push('\n');
    }
    out
}

/// A plain table with a header and row-major cells.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
