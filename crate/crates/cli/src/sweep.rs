//! Power sweep orchestration and its output files.
//!
//! | file             | columns                                           |
//! |------------------|---------------------------------------------------|
//! | `power.csv`      | `theta,metric,n,power,trials`                     |
//! | `complexity.csv` | `metric,theta,target_power,n_required`            |
//! | `efficiency.csv` | `metric_1,metric_2,theta,target_power,e12`        |
//! | `results.json`   | manifest plus all three tables, nulls for tokens  |
//! | `manifest.json`  | the run manifest alone                            |

use std::path::Path;

use serde::{Deserialize, Serialize};
use varqual_core::complexity::{efficiency_from, sample_complexity, DEFAULT_PAIRS};
use varqual_core::power::{run_sweep, with_workers, SweepResult};
use varqual_core::MetricKind;

use crate::error::{CliError, Result};
use crate::manifest::{now, RunManifest, SweepSpec};
use crate::output::{ensure_dir, optional_real, real, write_csv, write_json, NOT_REACHED, UNDEFINED};

pub const POWER_CSV: &str = "power.csv";
pub const COMPLEXITY_CSV: &str = "complexity.csv";
pub const EFFICIENCY_CSV: &str = "efficiency.csv";
pub const RESULTS_JSON: &str = "results.json";
pub const MANIFEST_JSON: &str = "manifest.json";

pub const POWER_HEADER: [&str; 5] = ["theta", "metric", "n", "power", "trials"];
pub const COMPLEXITY_HEADER: [&str; 4] = ["metric", "theta", "target_power", "n_required"];
pub const EFFICIENCY_HEADER: [&str; 5] = ["metric_1", "metric_2", "theta", "target_power", "e12"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub theta: f64,
    pub metric: MetricKind,
    pub n: usize,
    pub power: f64,
    pub trials: usize,
    pub degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub metric: MetricKind,
    pub theta: f64,
    pub target_power: f64,
    pub n_required: Option<f64>,
    pub interpolated: bool,
    pub at_grid_floor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub metric_1: MetricKind,
    pub metric_2: MetricKind,
    pub theta: f64,
    pub target_power: f64,
    pub e12: Option<f64>,
}

/// The JSON mirror of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub manifest: RunManifest,
    pub power: Vec<PowerRow>,
    pub complexity: Vec<ComplexityRow>,
    pub efficiency: Vec<EfficiencyRow>,
}

/// Turns raw power curves into the three result tables.
pub fn tabulate(spec: &SweepSpec, result: &SweepResult) -> Result<(Vec<PowerRow>, Vec<ComplexityRow>, Vec<EfficiencyRow>)> {
    let mut power = Vec::new();
    let mut complexity = Vec::new();
    let mut efficiency = Vec::new();
    for &theta in &spec.sweep.thetas {
        let mut by_metric = Vec::new();
        for &metric in &spec.sweep.metrics {
            let curve = result
                .curve(theta, metric)
                .ok_or_else(|| CliError::Runtime(format!("sweep produced no curve for theta={theta}, {metric}")))?;
            power.extend(curve.points.iter().map(|p| PowerRow {
                theta,
                metric,
                n: p.n_tests,
                power: p.power,
                trials: p.trials,
                degenerate: p.degenerate,
            }));
            let results = spec
                .target_powers
                .iter()
                .map(|&target| sample_complexity(curve, target, spec.interpolation))
                .collect::<varqual_core::Result<Vec<_>>>()?;
            complexity.extend(results.iter().map(|r| ComplexityRow {
                metric,
                theta,
                target_power: r.target_power,
                n_required: r.n_required,
                interpolated: r.interpolated,
                at_grid_floor: r.at_grid_floor,
            }));
            by_metric.push((metric, results));
        }
        let find = |m: MetricKind| by_metric.iter().find(|(k, _)| *k == m).map(|(_, r)| r);
        for (m1, m2) in DEFAULT_PAIRS {
            let (Some(first), Some(second)) = (find(m1), find(m2)) else {
                continue;
            };
            for (a, b) in first.iter().zip(second) {
                let e = efficiency_from(a, b)?;
                efficiency.push(EfficiencyRow {
                    metric_1: e.metric_1,
                    metric_2: e.metric_2,
                    theta: e.theta,
                    target_power: e.target_power,
                    e12: e.e12,
                });
            }
        }
    }
    Ok((power, complexity, efficiency))
}

/// Runs the sweep described by `spec` and assembles its outputs.
pub fn execute(spec: SweepSpec, workers: Option<usize>) -> Result<SweepOutput> {
    spec.validate()?;
    let mut manifest = RunManifest::new(spec);
    manifest.started = Some(now());
    let sweep_config = manifest.spec.sweep.clone();
    let result = with_workers(workers, || run_sweep(&sweep_config))??;
    let (power, complexity, efficiency) = tabulate(&manifest.spec, &result)?;
    manifest.finished = Some(now());
    manifest.diagnostics.degenerate_batches = result.degenerate_batches();
    manifest.diagnostics.not_reached = complexity.iter().filter(|c| c.n_required.is_none()).count();
    manifest.diagnostics.undefined_efficiencies = efficiency.iter().filter(|e| e.e12.is_none()).count();
    Ok(SweepOutput {
        manifest,
        power,
        complexity,
        efficiency,
    })
}

pub fn write_outputs(out: &SweepOutput, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    let manifest = out.manifest.to_json_line();

    let rows: Vec<Vec<String>> = out
        .power
        .iter()
        .map(|r| vec![real(r.theta), r.metric.to_string(), r.n.to_string(), real(r.power), r.trials.to_string()])
        .collect();
    write_csv(&dir.join(POWER_CSV), &manifest, &POWER_HEADER, &rows)?;

    let rows: Vec<Vec<String>> = out
        .complexity
        .iter()
        .map(|r| {
            vec![
                r.metric.to_string(),
                real(r.theta),
                real(r.target_power),
                optional_real(r.n_required, NOT_REACHED),
            ]
        })
        .collect();
    write_csv(&dir.join(COMPLEXITY_CSV), &manifest, &COMPLEXITY_HEADER, &rows)?;

    let rows: Vec<Vec<String>> = out
        .efficiency
        .iter()
        .map(|r| {
            vec![
                r.metric_1.to_string(),
                r.metric_2.to_string(),
                real(r.theta),
                real(r.target_power),
                optional_real(r.e12, UNDEFINED),
            ]
        })
        .collect();
    write_csv(&dir.join(EFFICIENCY_CSV), &manifest, &EFFICIENCY_HEADER, &rows)?;

    write_json(&dir.join(MANIFEST_JSON), &out.manifest)?;
    // results.json last: its presence marks a complete output directory
    write_json(&dir.join(RESULTS_JSON), out)
}
