//! Deterministic output files. Everything is staged in a temporary directory
//! under the output directory and renamed into place only after all files
//! and the manifest have been written.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// 17 significant digits, round-trip exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)
    }
}

/// One-line header "rows cols l_min j_min", then one line per row.
pub fn grid_bytes(values: &[Vec<f64>], l_min: i64, j_min: i64) -> Vec<u8> {
    let rows = values.len();
    let cols = values.first().map_or(0, |r| r.len());
    let mut s = format!("{rows} {cols} {l_min} {j_min}\n");
    for row in values {
        let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s.into_bytes()
}

#[derive(Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Serialize)]
pub struct Manifest {
    pub artifact: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub config: serde_json::Value,
    pub results: serde_json::Value,
    pub files: Vec<FileEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Collected outputs of one run.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn entries(&self) -> Vec<FileEntry> {
        self.files
            .iter()
            .map(|(name, b)| FileEntry { name: name.clone(), sha256: hex::encode(Sha256::digest(b)), bytes: b.len() })
            .collect()
    }

    /// Writes every file plus the manifest, then moves them into `out`.
    pub fn commit(self, out: &Path, manifest: &Manifest) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        let stage = tempfile::Builder::new().prefix(".oamsim-").tempdir_in(out)?;
        let mut json = serde_json::to_vec_pretty(manifest)?;
        json.push(b'\n');
        let mut all = self.files;
        all.push((MANIFEST_NAME.to_string(), json));
        for (name, bytes) in &all {
            fs::write(stage.path().join(name), bytes).with_context(|| format!("writing {name}"))?;
        }
        let mut written = Vec::new();
        for (name, _) in &all {
            let dest = out.join(name);
            fs::rename(stage.path().join(name), &dest).with_context(|| format!("moving {name} into place"))?;
            written.push(dest);
        }
        Ok(written)
    }
}
