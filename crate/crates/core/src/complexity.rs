//! Sample complexity and relative efficiency from power curves.
//!
//! `N(target)` is read off a power curve by linear interpolation in the
//! `(power, n)` plane: find the first grid segment whose power reaches the
//! target and interpolate `n` linearly along it. Relative efficiency of
//! metric 1 over metric 2 is `e₁₂ = N₂/N₁`, so `e₁₂ > 1` means metric 1 needs
//! fewer tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricKind;
use crate::power::PowerCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InterpolationMode {
    /// Interpolate within the first raw segment that crosses the target.
    #[default]
    FirstCrossing,
    /// Pool adjacent violators first, then take the first crossing.
    Isotonic,
}

impl std::str::FromStr for InterpolationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "first-crossing" => Ok(InterpolationMode::FirstCrossing),
            "isotonic" => Ok(InterpolationMode::Isotonic),
            _ => Err(Error::InvalidConfig(format!("unknown interpolation mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleComplexityResult {
    pub metric_kind: MetricKind,
    pub theta: f64,
    pub target_power: f64,
    /// `None` when no point of the curve reaches the target.
    pub n_required: Option<f64>,
    pub interpolated: bool,
    /// The smallest grid point already exceeds the target, so `n_required`
    /// is only an upper bound.
    pub at_grid_floor: bool,
}

/// Weighted pool-adjacent-violators fit: the closest nondecreasing sequence
/// in weighted least squares.
pub fn isotonic_fit(values: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), weights.len());
    // blocks of (mean, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            let w = w1 + w2;
            blocks.push(((m1 * w1 + m2 * w2) / w, w, l1 + l2));
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, _, len)| std::iter::repeat_n(m, len))
        .collect()
}

pub fn sample_complexity(
    curve: &PowerCurve,
    target_power: f64,
    mode: InterpolationMode,
) -> Result<SampleComplexityResult> {
    curve.validate()?;
    if !(target_power > 0.0 && target_power < 1.0) {
        return Err(Error::ContractViolation(format!(
            "target power must lie in (0, 1), got {target_power}"
        )));
    }
    let ns: Vec<f64> = curve.points.iter().map(|p| p.n_tests as f64).collect();
    let raw: Vec<f64> = curve.points.iter().map(|p| p.power).collect();
    let power = match mode {
        InterpolationMode::FirstCrossing => raw,
        InterpolationMode::Isotonic => {
            let weights: Vec<f64> = curve.points.iter().map(|p| p.trials as f64).collect();
            isotonic_fit(&raw, &weights)
        }
    };

    let mut result = SampleComplexityResult {
        metric_kind: curve.metric_kind,
        theta: curve.theta,
        target_power,
        n_required: None,
        interpolated: false,
        at_grid_floor: false,
    };
    let Some(k) = power.iter().position(|&p| p >= target_power) else {
        return Ok(result);
    };
    if power[k] == target_power {
        result.n_required = Some(ns[k]);
    } else if k == 0 {
        result.n_required = Some(ns[0]);
        result.at_grid_floor = true;
    } else {
        let slope = (ns[k] - ns[k - 1]) / (power[k] - power[k - 1]);
        result.n_required = Some(ns[k - 1] + (target_power - power[k - 1]) * slope);
        result.interpolated = true;
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyEntry {
    pub metric_1: MetricKind,
    pub metric_2: MetricKind,
    pub theta: f64,
    pub target_power: f64,
    /// `N₂/N₁`; `None` when either sample complexity is not reached.
    pub e12: Option<f64>,
}

pub fn efficiency_from(
    first: &SampleComplexityResult,
    second: &SampleComplexityResult,
) -> Result<EfficiencyEntry> {
    if first.theta != second.theta {
        return Err(Error::ContractViolation(format!(
            "efficiency compares curves at different noise levels ({} vs {})",
            first.theta, second.theta
        )));
    }
    if first.target_power != second.target_power {
        return Err(Error::ContractViolation("efficiency compares different target powers".into()));
    }
    Ok(EfficiencyEntry {
        metric_1: first.metric_kind,
        metric_2: second.metric_kind,
        theta: first.theta,
        target_power: first.target_power,
        e12: match (first.n_required, second.n_required) {
            (Some(n1), Some(n2)) => Some(n2 / n1),
            _ => None,
        },
    })
}

pub fn relative_efficiency(
    curve_1: &PowerCurve,
    curve_2: &PowerCurve,
    target_power: f64,
    mode: InterpolationMode,
) -> Result<EfficiencyEntry> {
    if curve_1.theta != curve_2.theta {
        return Err(Error::ContractViolation(format!(
            "efficiency compares curves at different noise levels ({} vs {})",
            curve_1.theta, curve_2.theta
        )));
    }
    efficiency_from(
        &sample_complexity(curve_1, target_power, mode)?,
        &sample_complexity(curve_2, target_power, mode)?,
    )
}

/// Metric pairs reported by default, oriented so that `e₁₂ > 1` favours the
/// alternative to FPR (and average t² over kurtosis).
pub const DEFAULT_PAIRS: [(MetricKind, MetricKind); 3] = [
    (MetricKind::AvgT2, MetricKind::Fpr),
    (MetricKind::Kurtosis, MetricKind::Fpr),
    (MetricKind::AvgT2, MetricKind::Kurtosis),
];
