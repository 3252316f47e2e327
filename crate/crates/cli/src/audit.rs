use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use varqual_core::metrics::{self, MetricKind, MetricReport, MetricSettings, TStatBatch};

use crate::error::{CliError, Result};
use crate::tstat::TStatFile;

/// One metric's row in an audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub metric: MetricKind,
    /// Point estimate, when the batch is large enough to form one.
    pub estimate: Option<f64>,
    pub report: Option<MetricReport>,
    /// Why `report` is missing.
    pub unavailable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub n: usize,
    pub experiments: usize,
    pub settings: MetricSettings,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn entry(&self, metric: MetricKind) -> &AuditEntry {
        self.entries.iter().find(|e| e.metric == metric).expect("all metrics audited")
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("n = {} t-statistics from {} experiments\n", self.n, self.experiments);
        let _ = writeln!(
            out,
            "{:<9} {:>12} {:>8} {:>12} {:>9} {:>9}  reject",
            "metric", "estimate", "null", "std_error", "z", "p"
        );
        for e in &self.entries {
            let est = e.estimate.map_or("-".to_string(), |v| format!("{v:.6}"));
            match (&e.report, &e.unavailable) {
                (Some(r), _) => {
                    let _ = writeln!(
                        out,
                        "{:<9} {:>12} {:>8} {:>12.6} {:>9.3} {:>9.4}  {}",
                        e.metric.as_str(),
                        est,
                        r.null_value,
                        r.std_error,
                        r.z_score,
                        r.p_value,
                        if r.reject { "yes" } else { "no" }
                    );
                }
                (None, reason) => {
                    let _ = writeln!(
                        out,
                        "{:<9} {:>12}  unavailable: {}",
                        e.metric.as_str(),
                        est,
                        reason.as_deref().unwrap_or("unknown")
                    );
                }
            }
        }
        out
    }
}

/// Runs all three metrics on a batch. Metrics whose test cannot be formed
/// get an explicit unavailable marker instead of failing the audit.
pub fn audit_values(values: Vec<f64>, experiments: usize, settings: &MetricSettings) -> Result<AuditReport> {
    settings.validate()?;
    if values.is_empty() {
        return Err(CliError::Validation("input has no t-statistics".into()));
    }
    let batch = TStatBatch::new(values)?;
    let entries = MetricKind::ALL
        .into_iter()
        .map(|metric| {
            let estimate = metrics::estimate(metric, &batch, settings.ci_level).ok();
            match metrics::evaluate(metric, &batch, settings) {
                Ok(report) => AuditEntry {
                    metric,
                    estimate,
                    report: Some(report),
                    unavailable: None,
                },
                Err(e) => AuditEntry {
                    metric,
                    estimate,
                    report: None,
                    unavailable: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(AuditReport {
        n: batch.len(),
        experiments,
        settings: *settings,
        entries,
    })
}

pub fn audit_file(path: &Path, settings: &MetricSettings) -> Result<AuditReport> {
    let file = TStatFile::read(path)?;
    let mut ids: Vec<&str> = file.rows.iter().map(|r| r.experiment_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    let experiments = ids.len();
    audit_values(file.values(), experiments, settings)
}
