//! Monte Carlo power of the metric z-tests under variance noise.
//!
//! A sweep cell is one `(θ, n)` pair. Every trial of a cell simulates one
//! batch of `n` A/A tests and runs all requested metrics on that same batch,
//! so metric comparisons are paired. Trial `r` of cell `c` reads stream
//! `c << 32 | r`, and the cell index packs the grid coordinates, so results
//! do not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{self, MetricKind, MetricSettings, SidednessConfig};
use crate::sim::{simulate_batch, ExperimentConfig, NoiseSpec, SimulationMode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub theta: f64,
    pub n_tests: usize,
    /// Fraction of trials whose test rejected.
    pub power: f64,
    pub trials: usize,
    pub metric_kind: MetricKind,
    pub rejections: usize,
    /// Trials whose report could not be formed (zero standard error). They
    /// count as non-rejections.
    pub degenerate: usize,
}

impl PowerPoint {
    fn from_counts(theta: f64, n_tests: usize, trials: usize, metric_kind: MetricKind, rejections: usize, degenerate: usize) -> Self {
        Self {
            theta,
            n_tests,
            power: rejections as f64 / trials as f64,
            trials,
            metric_kind,
            rejections,
            degenerate,
        }
    }
}

/// Power as a function of `n` for one metric at one noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub theta: f64,
    pub metric_kind: MetricKind,
    pub points: Vec<PowerPoint>,
}

impl PowerCurve {
    pub fn new(theta: f64, metric_kind: MetricKind, points: Vec<PowerPoint>) -> Result<Self> {
        let curve = Self { theta, metric_kind, points };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .points
            .first()
            .ok_or_else(|| Error::ContractViolation("power curve has no points".into()))?;
        for p in &self.points {
            if p.theta != self.theta || p.metric_kind != self.metric_kind || p.trials != first.trials {
                return Err(Error::ContractViolation(format!(
                    "point {p:?} does not belong to the {} curve at theta={}",
                    self.metric_kind, self.theta
                )));
            }
            if !(0.0..=1.0).contains(&p.power) || p.trials == 0 {
                return Err(Error::ContractViolation(format!("invalid power point {p:?}")));
            }
        }
        if let Some(w) = self.points.windows(2).find(|w| w[0].n_tests >= w[1].n_tests) {
            return Err(Error::ContractViolation(format!(
                "power curve n values must be strictly increasing, found {} then {}",
                w[0].n_tests, w[1].n_tests
            )));
        }
        Ok(())
    }

    pub fn trials(&self) -> usize {
        self.points[0].trials
    }
}

/// Packs sweep grid coordinates into a cell index.
pub fn cell_index(theta_index: usize, n_index: usize) -> Result<u32> {
    match (u16::try_from(theta_index), u16::try_from(n_index)) {
        (Ok(t), Ok(n)) => Ok(u32::from(t) << 16 | u32::from(n)),
        _ => Err(Error::InvalidConfig(format!(
            "grid coordinates ({theta_index}, {n_index}) exceed 65535"
        ))),
    }
}

pub fn trial_stream_id(cell: u32, trial: u32) -> u64 {
    u64::from(cell) << 32 | u64::from(trial)
}

fn check_trials(trials: usize) -> Result<u32> {
    match u32::try_from(trials) {
        Ok(t) if t > 0 => Ok(t),
        _ => Err(Error::InvalidConfig(format!("trials must lie in [1, 2^32), got {trials}"))),
    }
}

fn check_metric_batch(kind: MetricKind, n_tests: usize) -> Result<()> {
    if n_tests < kind.min_batch() {
        return Err(Error::InsufficientData {
            what: kind.as_str(),
            required: kind.min_batch(),
            actual: n_tests,
        });
    }
    Ok(())
}

/// Power of each metric in `metrics` at one `(θ, n)` cell, all evaluated on
/// the same `trials` batches. Points come back in the order of `metrics`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_power_paired(
    base: &ExperimentConfig,
    theta: f64,
    n_tests: usize,
    trials: usize,
    metrics: &[MetricKind],
    ci_level: f64,
    sidedness: SidednessConfig,
    cell: u32,
) -> Result<Vec<PowerPoint>> {
    let trial_count = check_trials(trials)?;
    let config = ExperimentConfig {
        noise: NoiseSpec::new(theta)?,
        n_tests,
        ..*base
    };
    config.validate()?;
    let settings = MetricSettings {
        alpha: base.alpha,
        ci_level,
        sidedness,
    };
    settings.validate()?;
    for &kind in metrics {
        check_metric_batch(kind, n_tests)?;
    }

    // per trial: (rejected, degenerate) for each metric
    let outcomes = (0..trial_count)
        .into_par_iter()
        .map(|r| {
            let batch = simulate_batch(&config, trial_stream_id(cell, r))?;
            metrics
                .iter()
                .map(|&kind| match metrics::evaluate(kind, &batch, &settings) {
                    Ok(report) => Ok((report.reject, false)),
                    Err(Error::ZeroStandardError(_)) => Ok((false, true)),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<(bool, bool)>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(metrics
        .iter()
        .enumerate()
        .map(|(m, &kind)| {
            let rejections = outcomes.iter().filter(|o| o[m].0).count();
            let degenerate = outcomes.iter().filter(|o| o[m].1).count();
            PowerPoint::from_counts(theta, n_tests, trials, kind, rejections, degenerate)
        })
        .collect())
}

/// Power of a single metric; identical to the matching entry of
/// [`estimate_power_paired`] for the same cell.
#[allow(clippy::too_many_arguments)]
pub fn estimate_power(
    base: &ExperimentConfig,
    theta: f64,
    n_tests: usize,
    trials: usize,
    metric: MetricKind,
    ci_level: f64,
    sidedness: SidednessConfig,
    cell: u32,
) -> Result<PowerPoint> {
    let mut points = estimate_power_paired(base, theta, n_tests, trials, &[metric], ci_level, sidedness, cell)?;
    Ok(points.remove(0))
}

/// `count` values spaced uniformly in log space from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
        return Err(Error::InvalidConfig(format!(
            "log grid needs 0 < lo <= hi and count >= 1, got lo={lo}, hi={hi}, count={count}"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    let step = (b - a) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i + 1 == count { hi } else { 10f64.powf(a + step * i as f64) })
        .collect())
}

/// Log-spaced grid of test counts, rounded to integers. Fails if rounding
/// would merge neighbouring points.
pub fn log_spaced_counts(lo: usize, hi: usize, count: usize) -> Result<Vec<usize>> {
    let grid: Vec<usize> = log_spaced(lo as f64, hi as f64, count)?
        .into_iter()
        .map(|x| x.round() as usize)
        .collect();
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(format!(
            "{count} log-spaced counts between {lo} and {hi} are not distinct after rounding"
        )));
    }
    Ok(grid)
}

/// Full description of a power sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub thetas: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub metrics: Vec<MetricKind>,
    /// Group size, source, α, mode and seed. `noise` and `n_tests` are set per cell.
    pub base: ExperimentConfig,
    pub ci_level: f64,
    pub sidedness: SidednessConfig,
}

impl SweepConfig {
    /// θ ∈ {0.1, 0.2, 0.3, 0.4}, 30 log-spaced n in [100, 10⁴], 500 trials,
    /// S = 1000 Uniform[5, 6] samples, α = 0.1, two-sided tests.
    pub fn standard() -> Self {
        Self {
            thetas: vec![0.1, 0.2, 0.3, 0.4],
            n_grid: log_spaced_counts(100, 10_000, 30).expect("default grid is valid"),
            trials: 500,
            metrics: MetricKind::ALL.to_vec(),
            base: ExperimentConfig::default(),
            ci_level: 0.9,
            sidedness: SidednessConfig::default(),
        }
    }

    pub fn with_mode(mut self, mode: SimulationMode) -> Self {
        self.base.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.thetas.is_empty() || self.n_grid.is_empty() || self.metrics.is_empty() {
            return Err(Error::InvalidConfig("sweep grids and metric list must be non-empty".into()));
        }
        for (i, a) in self.thetas.iter().enumerate() {
            NoiseSpec::new(*a)?;
            if self.thetas[..i].contains(a) {
                return Err(Error::InvalidConfig(format!("duplicate theta {a}")));
            }
        }
        for (i, n) in self.n_grid.iter().enumerate() {
            if self.n_grid[..i].contains(n) {
                return Err(Error::InvalidConfig(format!("duplicate n {n}")));
            }
        }
        for (i, m) in self.metrics.iter().enumerate() {
            if self.metrics[..i].contains(m) {
                return Err(Error::InvalidConfig(format!("duplicate metric {m}")));
            }
        }
        cell_index(self.thetas.len() - 1, self.n_grid.len() - 1)?;
        check_trials(self.trials)?;
        MetricSettings {
            alpha: self.base.alpha,
            ci_level: self.ci_level,
            sidedness: self.sidedness,
        }
        .validate()?;
        ExperimentConfig { n_tests: 1, ..self.base }.validate()
    }
}

/// Power curves of a sweep, one per `(θ, metric)` in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub curves: Vec<PowerCurve>,
}

impl SweepResult {
    pub fn curve(&self, theta: f64, metric: MetricKind) -> Option<&PowerCurve> {
        self.curves.iter().find(|c| c.theta == theta && c.metric_kind == metric)
    }

    pub fn degenerate_batches(&self) -> usize {
        self.curves.iter().flat_map(|c| &c.points).map(|p| p.degenerate).sum()
    }
}

/// Runs every `(θ, n)` cell and assembles the curves. Points within a curve
/// are sorted by `n` whatever the order of `n_grid`.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let cells: Vec<(usize, usize)> = (0..config.thetas.len())
        .flat_map(|i| (0..config.n_grid.len()).map(move |j| (i, j)))
        .collect();

    let cell_points = cells
        .par_iter()
        .map(|&(i, j)| {
            let (theta, n) = (config.thetas[i], config.n_grid[j]);
            estimate_power_paired(
                &config.base,
                theta,
                n,
                config.trials,
                &config.metrics,
                config.ci_level,
                config.sidedness,
                cell_index(i, j)?,
            )
            .map_err(|e| Error::Cell {
                theta,
                n_tests: n,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut curves = Vec::with_capacity(config.thetas.len() * config.metrics.len());
    for (i, &theta) in config.thetas.iter().enumerate() {
        for (m, &kind) in config.metrics.iter().enumerate() {
            let mut points: Vec<PowerPoint> = cells
                .iter()
                .zip(&cell_points)
                .filter(|((ci, _), _)| *ci == i)
                .map(|(_, pts)| pts[m])
                .collect();
            points.sort_by_key(|p| p.n_tests);
            curves.push(PowerCurve::new(theta, kind, points)?);
        }
    }
    Ok(SweepResult { curves })
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::InvalidConfig(format!("cannot start {n} workers: {e}"))),
    }
}
