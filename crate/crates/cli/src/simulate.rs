use std::path::Path;

use serde::{Deserialize, Serialize};
use varqual_core::sim::simulate_batch;
use varqual_core::ExperimentConfig;

use crate::error::{CliError, Result};
use crate::manifest::{now, ARTIFACT_VERSION};
use crate::tstat::{TStatFile, TStatRow};

/// Header record of a simulated t-statistic file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationManifest {
    pub artifact_version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub created: String,
}

pub fn simulate(config: &ExperimentConfig) -> Result<TStatFile> {
    if config.n_tests == 0 {
        return Err(CliError::Validation("--n must be at least 1".into()));
    }
    config.validate()?;
    let batch = simulate_batch(config, 0)?;
    let rows = batch
        .into_values()
        .into_iter()
        .enumerate()
        .map(|(j, t)| TStatRow {
            experiment_id: format!("aa-{j}"),
            t,
        })
        .collect();
    Ok(TStatFile { comments: vec![], rows })
}

pub fn run(config: &ExperimentConfig, path: &Path) -> Result<TStatFile> {
    let file = simulate(config)?;
    let manifest = SimulationManifest {
        artifact_version: ARTIFACT_VERSION.into(),
        seed: config.seed,
        config: *config,
        created: now(),
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        crate::output::ensure_dir(dir)?;
    }
    file.write(path, &serde_json::to_string(&manifest).expect("manifest serializes"))?;
    Ok(file)
}
