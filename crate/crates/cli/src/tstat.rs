//! Reading and writing t-statistic files.
//!
//! ```text
//! # format: varqual-tstats/1
//! # manifest: {...}
//! experiment_id,t
//! aa-0,0.7342...
//! ```

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::manifest::TSTAT_FORMAT;
use crate::output::{comment_block, csv_body, real, write_atomic};

pub const HEADER: [&str; 2] = ["experiment_id", "t"];

#[derive(Debug, Clone, PartialEq)]
pub struct TStatRow {
    pub experiment_id: String,
    pub t: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TStatFile {
    /// `(key, value)` pairs from the leading comment block.
    pub comments: Vec<(String, String)>,
    pub rows: Vec<TStatRow>,
}

#[derive(Deserialize)]
struct RawRow {
    experiment_id: String,
    t: String,
}

impl TStatFile {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn comment(&self, key: &str) -> Option<&str> {
        self.comments.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Dependency(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let comments = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .filter_map(|l| {
                let (k, v) = l.trim_start_matches('#').split_once(':')?;
                Some((k.trim().to_string(), v.trim().to_string()))
            })
            .collect();

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| CliError::Parse(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != HEADER {
            return Err(CliError::Parse(format!(
                "expected header \"experiment_id,t\", found \"{}\"",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }

        let mut rows = Vec::new();
        for record in reader.deserialize::<RawRow>() {
            let raw = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                CliError::Parse(format!("line {line}: {e}"))
            })?;
            let line = rows.len() + 1;
            if raw.experiment_id.is_empty() {
                return Err(CliError::Validation(format!("row {line}: empty experiment_id")));
            }
            let t: f64 = raw.t.parse().map_err(|_| {
                CliError::Parse(format!("row {line} ({}): cannot parse t value {:?}", raw.experiment_id, raw.t))
            })?;
            if !t.is_finite() {
                return Err(CliError::Validation(format!(
                    "row {line} ({}): t value {} is not finite",
                    raw.experiment_id, raw.t
                )));
            }
            rows.push(TStatRow {
                experiment_id: raw.experiment_id,
                t,
            });
        }
        Ok(Self { comments, rows })
    }

    /// Serializes with the format tag and `manifest` as header comments.
    pub fn render(&self, manifest_json: &str) -> Result<String> {
        let mut text = comment_block(&[("format", TSTAT_FORMAT.into()), ("manifest", manifest_json.into())]);
        let rows: Vec<Vec<String>> = self.rows.iter().map(|r| vec![r.experiment_id.clone(), real(r.t)]).collect();
        text.push_str(&csv_body(&HEADER, &rows)?);
        Ok(text)
    }

    pub fn write(&self, path: &Path, manifest_json: &str) -> Result<()> {
        write_atomic(path, self.render(manifest_json)?.as_bytes())
    }
}
