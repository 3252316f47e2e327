//! A/A-test simulation with multiplicative lognormal noise on the variance
//! estimates.
//!
//! Two generation modes produce statistically equivalent batches:
//!
//! * [`SimulationMode::FullSample`] draws `S` control and `S` test samples
//!   per test from the source distribution and computes the Welch t.
//! * [`SimulationMode::FastPath`] draws each t directly as a standard normal,
//!   the large-`S` limit of the same statistic under the null.
//!
//! In both modes the variance estimate of test `j` is then scaled by an
//! independent `ξ_j ~ LogNormal(−θ²/2, θ)`, so `t_j ↦ t_j/√ξ_j`.
//!
//! Randomness is addressed, not consumed: in full mode test `j` reads lane
//! `j` of the batch stream, in fast mode tests are grouped in fixed chunks
//! of [`FAST_CHUNK`] per lane. The output is identical for any thread count.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lift::{apply_variance_noise, SampleGroupPair};
use crate::metrics::TStatBatch;
use crate::rng::RngStream;

/// Tests per random lane on the fast path.
pub const FAST_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SourceDistribution {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
}

impl Default for SourceDistribution {
    fn default() -> Self {
        SourceDistribution::Uniform { lo: 5.0, hi: 6.0 }
    }
}

impl SourceDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SourceDistribution::Uniform { lo, hi } if lo.is_finite() && hi.is_finite() && lo < hi => Ok(()),
            SourceDistribution::Normal { mean, sd } if mean.is_finite() && sd.is_finite() && sd > 0.0 => Ok(()),
            other => Err(Error::InvalidConfig(format!("invalid source distribution {other:?}"))),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            SourceDistribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            SourceDistribution::Normal { mean, sd } => mean + sd * rng.sample::<f64, _>(StandardNormal),
        }
    }
}

/// Lognormal noise `ξ = exp(−θ²/2 + θZ)`, which has mean exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub theta: f64,
}

impl NoiseSpec {
    pub fn new(theta: f64) -> Result<Self> {
        let spec = Self { theta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta >= 0.0 && self.theta.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "noise level theta must be finite and non-negative, got {}",
                self.theta
            )))
        }
    }

    /// One noise draw. Always consumes one normal variate; θ = 0 yields exactly 1.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        (self.theta * z - 0.5 * self.theta * self.theta).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SimulationMode {
    #[default]
    FullSample,
    FastPath,
}

/// One simulation cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Samples per group, `S`.
    pub group_size: usize,
    pub source: SourceDistribution,
    pub noise: NoiseSpec,
    /// A/A tests per batch.
    pub n_tests: usize,
    pub alpha: f64,
    pub mode: SimulationMode,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            group_size: 1000,
            source: SourceDistribution::default(),
            noise: NoiseSpec::default(),
            n_tests: 1000,
            alpha: 0.1,
            mode: SimulationMode::FullSample,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.group_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "group size must be at least 2, got {}",
                self.group_size
            )));
        }
        if self.n_tests < 1 {
            return Err(Error::InvalidConfig("n_tests must be at least 1".into()));
        }
        if u32::try_from(self.n_tests).is_err() {
            return Err(Error::InvalidConfig(format!("n_tests {} exceeds 2^32", self.n_tests)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        self.source.validate()?;
        self.noise.validate()
    }
}

/// `count` i.i.d. noise draws from `rng`.
pub fn sample_lognormal_noise<R: Rng + ?Sized>(noise: NoiseSpec, count: usize, rng: &mut R) -> Vec<f64> {
    (0..count).map(|_| noise.sample(rng)).collect()
}

/// Generates one batch in the mode named by `config.mode`.
pub fn simulate_batch(config: &ExperimentConfig, stream_id: u64) -> Result<TStatBatch> {
    match config.mode {
        SimulationMode::FullSample => run_aa_batch_full(config, stream_id),
        SimulationMode::FastPath => run_aa_batch_fast(config, stream_id),
    }
}

/// Per-sample simulation of `n_tests` A/A tests on stream `(config.seed, stream_id)`.
/// Ignores `config.mode`.
pub fn run_aa_batch_full(config: &ExperimentConfig, stream_id: u64) -> Result<TStatBatch> {
    config.validate()?;
    let s = config.group_size;
    let values = (0..config.n_tests as u32)
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(s), Vec::with_capacity(s)),
            |(control, test), j| {
                let mut rng = RngStream::new(config.seed, stream_id, j);
                control.clear();
                test.clear();
                control.extend((0..s).map(|_| config.source.sample(&mut rng)));
                test.extend((0..s).map(|_| config.source.sample(&mut rng)));
                let t = SampleGroupPair::new(control, test)?.lift()?.t_statistic();
                apply_variance_noise(t, config.noise.sample(&mut rng))
            },
        )
        .collect::<Result<Vec<f64>>>()?;
    TStatBatch::new(values)
}

/// Normal-approximation shortcut: `t_j = Z_j/√ξ_j`. Ignores `config.mode`
/// and `config.group_size`.
pub fn run_aa_batch_fast(config: &ExperimentConfig, stream_id: u64) -> Result<TStatBatch> {
    config.validate()?;
    let noise = config.noise;
    let mut values = vec![0.0; config.n_tests];
    values
        .par_chunks_mut(FAST_CHUNK)
        .enumerate()
        .for_each(|(chunk, out)| {
            let mut rng = RngStream::new(config.seed, stream_id, chunk as u32);
            for t in out.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *t = z / noise.sample(&mut rng).sqrt();
            }
        });
    TStatBatch::new(values)
}
