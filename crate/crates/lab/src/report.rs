//! Report files: CSV with headers and JSON, written in a fixed order so
//! that equal inputs give byte-identical bundles.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub struct BundleWriter {
    dir: PathBuf,
    files: Vec<String>,
}

/// Shortest round-trip decimal, in exponent form outside `[10⁻⁴, 10¹⁶)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// As [`num`], empty for a missing value.

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl BundleWriter {
    pub fn create(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(BundleWriter { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json<S: Serialize + ?Sized>(&mut self, name: &str, value: &S) -> anyhow::Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        fs::write(self.dir.join(name), s)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }
}
