//! Variance-quality auditing for A/B-test confidence intervals.
//!
//! A/A tests (control and test arms drawn from the same distribution)
//! produce t-statistics that should be approximately standard normal when
//! variance estimates are right. This crate turns a batch of such
//! t-statistics into three variance-quality metrics, each with a z-test
//! against its calibrated value:
//!
//! * the false positive rate at a nominal confidence level,
//! * the average of `t²` (1 under the null),
//! * the unbiased excess kurtosis `g₂` (0 under the null).
//!
//! It also simulates A/A tests whose variance estimates carry unbiased
//! lognormal noise, estimates each metric's power to detect that noise,
//! and compares metrics by the number of tests they need to reach a given
//! power.
//!
//! ```
//! use varqual_core::metrics::{self, MetricKind, MetricSettings, TStatBatch};
//!
//! let batch = TStatBatch::new(vec![0.3, -1.2, 2.1, 0.8, -0.4, 1.7]).unwrap();
//! let report = metrics::evaluate(MetricKind::AvgT2, &batch, &MetricSettings::default()).unwrap();
//! assert_eq!(report.null_value, 1.0);
//! assert!(!report.reject);
//! ```

pub mod complexity;
pub mod error;
pub mod lift;
pub mod metrics;
pub mod normal;
pub mod power;
pub mod rng;
pub mod sim;
mod summation;

pub use complexity::{
    relative_efficiency, sample_complexity, EfficiencyEntry, InterpolationMode, SampleComplexityResult,
};
pub use error::{Error, Result};
pub use lift::{apply_variance_noise, welch_t, LiftEstimate, SampleGroupPair};
pub use metrics::{MetricKind, MetricReport, MetricSettings, Sidedness, SidednessConfig, TStatBatch};
pub use normal::{normal_cdf, normal_quantile};
pub use power::{estimate_power, run_sweep, PowerCurve, PowerPoint, SweepConfig, SweepResult};
pub use rng::{rng_substream, RngStream};
pub use sim::{ExperimentConfig, NoiseSpec, SimulationMode, SourceDistribution};
