//! CSV and manifest rendering.
//!
//! Numbers are written with Rust's shortest round-trip formatting so that
//! identical values produce identical bytes across runs; undefined scores
//! render as empty fields, never as 0 or NaN.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use propmeter::ExtReal;

/// One CSV document under construction. Field values must not contain
/// commas or newlines; instance ids are sanitized at load time.
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Csv {
            buf: String::new(),
            columns: header.len(),
        };
        csv.push_raw(header.iter().map(|s| s.to_string()));
        csv
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(
            fields.len(),
            self.columns,
            "row width must match the header"
        );
        self.push_raw(fields.iter().cloned());
    }

    fn push_raw(&mut self, fields: impl Iterator<Item = String>) {
        let mut first = true;
        for field in fields {
            debug_assert!(
                !field.contains(',') && !field.contains('\n'),
                "unescapable field"
            );
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(&field);
            first = false;
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub fn num<T: std::fmt::Display>(value: T) -> String {
    value.to_string()
}

/// Optional score: empty field when undefined.
pub fn opt_num(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Extended value: `-inf`/`inf` for the infinities, shortest round-trip
/// decimal otherwise.
pub fn ext(value: ExtReal) -> String {
    value.to_string()
}

/// Writes `content` to `dir/name`, creating `dir` as needed.
pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

/// Plain-text key=value run summary for reproducibility.
pub fn write_manifest(dir: &Path, entries: &[(&str, String)]) -> Result<PathBuf> {
    let mut out = String::new();
    for (key, value) in entries {
        debug_assert!(!key.contains('=') && !value.contains('\n'));
        let _ = writeln!(out, "{key}={value}");
    }
    write_file(dir, "manifest.txt", &out)
}
