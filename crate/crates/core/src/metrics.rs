//! Variance-quality metrics computed from a batch of A/A t-statistics, and
//! the z-tests that compare each metric with its value under a correctly
//! calibrated standard-normal null.
//!
//! | metric     | estimate                       | null | standard error              |
//! |------------|--------------------------------|------|-----------------------------|
//! | `Fpr`      | share of `|t| ≥ Φ⁻¹(1 − r/2)`  | `r`  | `√(FPR(1 − FPR)/n)`         |
//! | `AvgT2`    | mean of `t²`                   | 1    | `sd(t²)/√n`                 |
//! | `Kurtosis` | unbiased excess kurtosis `g₂`  | 0    | normal-approximation SD     |
//!
//! Here `r = 1 − ci_level` is the nominal false-positive rate of the
//! confidence intervals being audited (0.1 for 90% intervals).
//!
//! Central moments use the `1/n` convention, `M_k = Σ(t − t̄)^k / n`, under
//! which `g₂ = (n−1)/((n−2)(n−3)) · ((n+1)·M₄/M₂² − 3(n−1))` is the usual
//! unbiased excess-kurtosis estimator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{normal_cdf, normal_quantile};
use crate::summation;

/// Ordered t-statistics t₁…tₙ from n hypothesis tests.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TStatBatch {
    values: Vec<f64>,
}

impl TStatBatch {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    fn require(&self, what: &'static str, required: usize) -> Result<()> {
        if self.len() < required {
            return Err(Error::InsufficientData {
                what,
                required,
                actual: self.len(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for TStatBatch {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MetricKind {
    Fpr,
    AvgT2,
    Kurtosis,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Fpr, MetricKind::AvgT2, MetricKind::Kurtosis];

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricKind::Fpr => "FPR",
            MetricKind::AvgT2 => "AVG_T2",
            MetricKind::Kurtosis => "KURTOSIS",
        }
    }

    /// Smallest batch for which the metric's z-test can be formed.
    pub fn min_batch(&self) -> usize {
        match self {
            MetricKind::Fpr => 1,
            MetricKind::AvgT2 => 2,
            MetricKind::Kurtosis => 4,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "FPR" => Ok(MetricKind::Fpr),
            "AVG_T2" => Ok(MetricKind::AvgT2),
            "KURTOSIS" => Ok(MetricKind::Kurtosis),
            _ => Err(Error::InvalidConfig(format!("unknown metric {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Sidedness {
    #[default]
    TwoSided,
    OneSidedGreater,
}

impl Sidedness {
    pub fn p_value(&self, z: f64) -> f64 {
        match self {
            Sidedness::TwoSided => (2.0 * normal_cdf(-z.abs())).min(1.0),
            Sidedness::OneSidedGreater => normal_cdf(-z),
        }
    }
}

/// Sidedness of each metric's test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SidednessConfig {
    pub fpr: Sidedness,
    pub avg_t2: Sidedness,
    pub kurtosis: Sidedness,
}

impl SidednessConfig {
    pub fn uniform(sidedness: Sidedness) -> Self {
        Self {
            fpr: sidedness,
            avg_t2: sidedness,
            kurtosis: sidedness,
        }
    }

    pub fn for_metric(&self, kind: MetricKind) -> Sidedness {
        match kind {
            MetricKind::Fpr => self.fpr,
            MetricKind::AvgT2 => self.avg_t2,
            MetricKind::Kurtosis => self.kurtosis,
        }
    }
}

/// Everything needed to turn a batch into accept/reject decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSettings {
    /// Significance level of the metric z-tests.
    pub alpha: f64,
    /// Confidence level of the intervals being audited; sets the FPR threshold.
    pub ci_level: f64,
    pub sidedness: SidednessConfig,
}

impl Default for MetricSettings {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            ci_level: 0.9,
            sidedness: SidednessConfig::default(),
        }
    }
}

impl MetricSettings {
    pub fn validate(&self) -> Result<()> {
        check_open_unit("alpha", self.alpha)?;
        check_open_unit("ci_level", self.ci_level)
    }
}

/// Outcome of one metric's z-test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric_kind: MetricKind,
    pub estimate: f64,
    pub null_value: f64,
    pub std_error: f64,
    pub z_score: f64,
    pub p_value: f64,
    pub reject: bool,
    pub sidedness: Sidedness,
    pub alpha: f64,
}

impl MetricReport {
    pub fn new(
        metric_kind: MetricKind,
        estimate: f64,
        null_value: f64,
        std_error: f64,
        alpha: f64,
        sidedness: Sidedness,
    ) -> Result<Self> {
        check_open_unit("alpha", alpha)?;
        if !(std_error > 0.0 && std_error.is_finite()) {
            return Err(Error::ZeroStandardError(metric_kind.as_str()));
        }
        let z_score = (estimate - null_value) / std_error;
        let p_value = sidedness.p_value(z_score);
        Ok(Self {
            metric_kind,
            estimate,
            null_value,
            std_error,
            z_score,
            p_value,
            reject: p_value < alpha,
            sidedness,
            alpha,
        })
    }
}

fn check_open_unit(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must lie in (0, 1), got {value}")))
    }
}

/// Nominal false-positive rate `1 − ci_level`, snapped to 12 decimals so that
/// a 0.90 level gives exactly 0.1 rather than 0.09999999999999998.
pub fn nominal_fpr(ci_level: f64) -> Result<f64> {
    check_open_unit("ci_level", ci_level)?;
    Ok(((1.0 - ci_level) * 1e12).round() / 1e12)
}

/// Two-sided critical value |t| must reach to count as a detection.
pub fn fpr_threshold(ci_level: f64) -> Result<f64> {
    normal_quantile(1.0 - nominal_fpr(ci_level)? / 2.0)
}

/// Fraction of tests with `|t| ≥ Φ⁻¹(1 − (1 − ci_level)/2)`.
pub fn fpr(batch: &TStatBatch, ci_level: f64) -> Result<f64> {
    batch.require("FPR", 1)?;
    let threshold = fpr_threshold(ci_level)?;
    let hits = batch.values().iter().filter(|t| t.abs() >= threshold).count();
    Ok(hits as f64 / batch.len() as f64)
}

pub fn fpr_report(
    batch: &TStatBatch,
    ci_level: f64,
    alpha: f64,
    sidedness: Sidedness,
) -> Result<MetricReport> {
    let estimate = fpr(batch, ci_level)?;
    let std_error = (estimate * (1.0 - estimate) / batch.len() as f64).sqrt();
    MetricReport::new(
        MetricKind::Fpr,
        estimate,
        nominal_fpr(ci_level)?,
        std_error,
        alpha,
        sidedness,
    )
}

/// Mean of squared t-statistics.
pub fn avg_t2(batch: &TStatBatch) -> Result<f64> {
    batch.require("average t²", 1)?;
    Ok(summation::sum(batch.values().iter().map(|t| t * t)) / batch.len() as f64)
}

pub fn avg_t2_report(batch: &TStatBatch, alpha: f64, sidedness: Sidedness) -> Result<MetricReport> {
    batch.require("average t² test", 2)?;
    let squares: Vec<f64> = batch.values().iter().map(|t| t * t).collect();
    let (estimate, variance) = summation::sample_variance(&squares);
    let std_error = if all_equal(&squares) {
        0.0
    } else {
        (variance / batch.len() as f64).sqrt()
    };
    MetricReport::new(MetricKind::AvgT2, estimate, 1.0, std_error, alpha, sidedness)
}

/// Unbiased excess-kurtosis estimator g₂.
pub fn kurtosis_g2(batch: &TStatBatch) -> Result<f64> {
    batch.require("kurtosis", 4)?;
    let values = batch.values();
    if all_equal(values) {
        return Err(Error::DegenerateDispersion("kurtosis"));
    }
    let n = values.len() as f64;
    let mean = summation::mean(values);
    let mut m2 = summation::CompensatedSum::default();
    let mut m4 = summation::CompensatedSum::default();
    for &t in values {
        let d2 = (t - mean) * (t - mean);
        m2.add(d2);
        m4.add(d2 * d2);
    }
    let m2 = m2.total() / n;
    let m4 = m4.total() / n;
    if m2 <= 0.0 {
        return Err(Error::DegenerateDispersion("kurtosis"));
    }
    Ok((n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * m4 / (m2 * m2) - 3.0 * (n - 1.0)))
}

/// Normal-approximation standard deviation of g₂ for a batch of `n` values.
pub fn kurtosis_se(n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::InsufficientData {
            what: "kurtosis standard error",
            required: 4,
            actual: n,
        });
    }
    let n = n as f64;
    Ok((24.0 * n * (n - 1.0) * (n - 1.0) / ((n - 3.0) * (n - 2.0) * (n + 3.0) * (n + 5.0))).sqrt())
}

pub fn kurtosis_report(batch: &TStatBatch, alpha: f64, sidedness: Sidedness) -> Result<MetricReport> {
    let estimate = kurtosis_g2(batch)?;
    MetricReport::new(
        MetricKind::Kurtosis,
        estimate,
        0.0,
        kurtosis_se(batch.len())?,
        alpha,
        sidedness,
    )
}

/// Point estimate of one metric.
pub fn estimate(kind: MetricKind, batch: &TStatBatch, ci_level: f64) -> Result<f64> {
    match kind {
        MetricKind::Fpr => fpr(batch, ci_level),
        MetricKind::AvgT2 => avg_t2(batch),
        MetricKind::Kurtosis => kurtosis_g2(batch),
    }
}

/// Runs one metric's z-test under `settings`.
pub fn evaluate(kind: MetricKind, batch: &TStatBatch, settings: &MetricSettings) -> Result<MetricReport> {
    let sidedness = settings.sidedness.for_metric(kind);
    match kind {
        MetricKind::Fpr => fpr_report(batch, settings.ci_level, settings.alpha, sidedness),
        MetricKind::AvgT2 => avg_t2_report(batch, settings.alpha, sidedness),
        MetricKind::Kurtosis => kurtosis_report(batch, settings.alpha, sidedness),
    }
}

fn all_equal(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}
