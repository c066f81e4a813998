//! Deterministic CSV and metadata emission.
//!
//! All output is UTF-8 with `\n` line endings and `.` decimal points.
//! Floats render through Rust's shortest round-trip formatting, switching
//! to scientific notation outside a readable magnitude window, so a value
//! re-emitted from the same bits is byte-identical on every platform.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;

/// Shortest-round-trip float formatting with a readable magnitude window.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let mag = v.abs();
    if (1e-4..1e15).contains(&mag) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// SHA-256 hex digest of the canonical configuration text.
pub fn config_hash(canonical_toml: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(canonical_toml.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A CSV document: commented `# key=value` lines, a header row, data rows.
#[derive(Debug, Clone, Default)]
pub struct CsvDoc {
    meta: Vec<(String, String)>,
    header: String,
    rows: Vec<String>,
}

impl CsvDoc {
    pub fn new(header: &str) -> CsvDoc {
        CsvDoc { meta: Vec::new(), header: header.to_string(), rows: Vec::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> CsvDoc {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn push_row(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.header);
        out.push('\n');
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

/// Writes the JSON sidecar with sorted keys next to an experiment output.
pub fn write_meta_sidecar(csv_path: &Path, pairs: &[(&str, String)]) -> Result<PathBuf> {
    let mut map = serde_json::Map::new();
    for (k, v) in pairs {
        map.insert(k.to_string(), serde_json::Value::String(v.clone()));
    }
    // serde_json's default map is ordered by key, so the sidecar is stable.
    let text = serde_json::to_string_pretty(&serde_json::Value::Object(map))
        .expect("string map serialization cannot fail");
    let path = csv_path.with_extension("meta.json");
    std::fs::write(&path, text + "\n")?;
    Ok(path)
}
