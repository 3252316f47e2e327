//! Atomic file output and the shared CSV conventions.
//!
//! Every CSV starts with `#`-prefixed comment lines carrying the run manifest
//! as JSON, followed by a fixed header row. Reals are written in their
//! shortest round-trip decimal form, so a rerun with the same manifest gives
//! byte-identical bodies.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

/// Token written where a sample complexity is not reached.
pub const NOT_REACHED: &str = "NOT_REACHED";
/// Token written where a relative efficiency is undefined.
pub const UNDEFINED: &str = "UNDEFINED";

/// Writes `contents` to `path` through a temporary file in the same
/// directory, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::write(path, e))?;
    tmp.write_all(contents).map_err(|e| CliError::write(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::write(path, e))?;
    tmp.persist(path).map_err(|e| CliError::write(path, e.error))?;
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    body.push(b'\n');
    write_atomic(path, &body)
}

/// `# key: value` comment lines, one JSON document per line.
pub fn comment_block(entries: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (key, value) in entries {
        for line in value.lines() {
            out.push_str("# ");
            out.push_str(key);
            out.push_str(": ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

/// Renders a CSV body (header plus rows) with the csv crate.
pub fn csv_body(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
}

/// Writes a CSV file with a manifest comment block in front of the body.
pub fn write_csv(path: &Path, manifest_json: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = comment_block(&[("manifest", manifest_json.to_string())]);
    text.push_str(&csv_body(header, rows)?);
    write_atomic(path, text.as_bytes())
}

/// The part of a file after its leading `#` comment lines.
pub fn body_of(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with('#') {
        rest = match rest.find('\n') {
            Some(i) => &rest[i + 1..],
            None => "",
        };
    }
    rest
}

pub fn real(x: f64) -> String {
    x.to_string()
}

pub fn optional_real(x: Option<f64>, missing: &str) -> String {
    x.map_or_else(|| missing.to_string(), real)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_skips_comments() {
        assert_eq!(body_of("# a\n# b\nx,y\n1,2\n"), "x,y\n1,2\n");
        assert_eq!(body_of("x,y\n"), "x,y\n");
        assert_eq!(body_of("# only"), "");
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456789.12345679, -2.5e17] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(optional_real(None, NOT_REACHED), "NOT_REACHED");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn multi_line_comments_are_prefixed() {
        let block = comment_block(&[("manifest", "{\n  \"a\": 1\n}".into())]);
        assert!(block.lines().all(|l| l.starts_with("# manifest: ")));
    }
}
