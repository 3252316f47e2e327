//! Per-test lift estimates: the two-sample difference of means, its
//! variance, and the resulting t-statistic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation;

/// Control and test samples of one A/A (or A/B) comparison.
#[derive(Debug, Clone, Copy)]
pub struct SampleGroupPair<'a> {
    control: &'a [f64],
    test: &'a [f64],
}

impl<'a> SampleGroupPair<'a> {
    pub fn new(control: &'a [f64], test: &'a [f64]) -> Result<Self> {
        for group in [control, test] {
            if group.len() < 2 {
                return Err(Error::InsufficientData {
                    what: "a sample group",
                    required: 2,
                    actual: group.len(),
                });
            }
            if let Some((index, &value)) = group.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite { index, value });
            }
        }
        Ok(Self { control, test })
    }

    pub fn control(&self) -> &'a [f64] {
        self.control
    }

    pub fn test(&self) -> &'a [f64] {
        self.test
    }

    /// Difference of means (test − control) and the Welch variance of that
    /// difference, s²_test/S_test + s²_control/S_control.
    pub fn lift(&self) -> Result<LiftEstimate> {
        let (mean_c, var_c) = summation::sample_variance(self.control);
        let (mean_t, var_t) = summation::sample_variance(self.test);
        let var_of_mean_diff = var_t / self.test.len() as f64 + var_c / self.control.len() as f64;
        if var_of_mean_diff <= 0.0 {
            return Err(Error::DegenerateVariance);
        }
        Ok(LiftEstimate {
            mu: mean_t - mean_c,
            var_of_mean_diff,
        })
    }
}

/// Estimated difference of means and the estimated variance of that difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftEstimate {
    pub mu: f64,
    pub var_of_mean_diff: f64,
}

impl LiftEstimate {
    pub fn t_statistic(&self) -> f64 {
        self.mu / self.var_of_mean_diff.sqrt()
    }

    /// The same lift reported with its variance estimate scaled by `xi`.
    /// The mean estimate is untouched.
    pub fn with_variance_noise(&self, xi: f64) -> Result<Self> {
        check_noise(xi)?;
        Ok(Self {
            mu: self.mu,
            var_of_mean_diff: self.var_of_mean_diff * xi,
        })
    }
}

/// Welch two-sample t-statistic, (mean(test) − mean(control)) / SE.
pub fn welch_t(control: &[f64], test: &[f64]) -> Result<f64> {
    Ok(SampleGroupPair::new(control, test)?.lift()?.t_statistic())
}

/// A t-statistic recomputed as if its variance estimate had been multiplied by `xi`.
pub fn apply_variance_noise(t: f64, xi: f64) -> Result<f64> {
    check_noise(xi)?;
    Ok(t / xi.sqrt())
}

fn check_noise(xi: f64) -> Result<()> {
    if xi > 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("variance noise must be positive and finite, got {xi}")))
    }
}
