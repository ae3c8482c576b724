//! Instance discovery and parsing for the command-line tools.
//!
//! Patterns are resolved through the filesystem first (a literal path
//! wins), then as globs. Files ending in `.mps` go through the MPS
//! reader; everything else is treated as the canonical text format.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use propmeter::{mps, text, ProblemInstance};

/// A parsed instance with the identifier used in every report.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub id: String,
    pub path: PathBuf,
    pub instance: ProblemInstance,
    /// Reader diagnostics (MPS only), already formatted for display.
    pub warnings: Vec<String>,
}

/// A file that matched the patterns but could not be used.
#[derive(Debug, Clone)]
pub struct LoadFailure {
    pub path: PathBuf,
    pub message: String,
}

/// Expands `patterns` to a sorted, deduplicated list of paths. A pattern
/// that names an existing file is taken literally; otherwise it is
/// treated as a glob. Returns an error when nothing matches at all,
/// which is a configuration mistake rather than a per-instance failure.
pub fn collect_paths(patterns: &[String]) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for pattern in patterns {
        let literal = Path::new(pattern);
        if literal.is_file() {
            paths.push(literal.to_path_buf());
            continue;
        }
        let matches =
            glob::glob(pattern).with_context(|| format!("invalid glob pattern {pattern:?}"))?;
        let mut any = false;
        for entry in matches {
            let path = entry.with_context(|| format!("while expanding {pattern:?}"))?;
            if path.is_file() {
                paths.push(path);
                any = true;
            }
        }
        if !any {
            bail!("pattern {pattern:?} matched no files");
        }
    }
    paths.sort();
    paths.dedup();
    if paths.is_empty() {
        bail!("no instance files given");
    }
    Ok(paths)
}

fn parse_file(path: &Path) -> Result<(ProblemInstance, Vec<String>)> {
    let content =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let is_mps = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mps"));
    if is_mps {
        let parsed = mps::parse_mps(&content)?;
        let warnings = parsed
            .diagnostics
            .warnings
            .iter()
            .map(|w| w.to_string())
            .collect();
        Ok((parsed.instance, warnings))
    } else {
        Ok((text::parse_instance(&content)?, Vec::new()))
    }
}

/// Loads every path, assigning stable ids from file stems (duplicates are
/// disambiguated with a numeric suffix). Results come back sorted by id;
/// unparseable files are reported separately so callers can decide how
/// hard to fail.
pub fn load_instances(paths: &[PathBuf]) -> (Vec<LoadedInstance>, Vec<LoadFailure>) {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut loaded = Vec::new();
    let mut failed = Vec::new();
    for path in paths {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "instance".to_string());
        let sanitized: String = stem
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || "._-".contains(c) {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        let count = seen.entry(sanitized.clone()).or_insert(0);
        *count += 1;
        let id = if *count == 1 {
            sanitized
        } else {
            format!("{sanitized}-{count}")
        };
        match parse_file(path) {
            Ok((instance, warnings)) => loaded.push(LoadedInstance {
                id,
                path: path.clone(),
                instance,
                warnings,
            }),
            Err(err) => failed.push(LoadFailure {
                path: path.clone(),
                message: format!("{err:#}"),
            }),
        }
    }
    loaded.sort_by(|a, b| a.id.cmp(&b.id));
    (loaded, failed)
}
