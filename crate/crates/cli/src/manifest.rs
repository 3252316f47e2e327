use serde::{Deserialize, Serialize};
use varqual_core::power::SweepConfig;
use varqual_core::InterpolationMode;

use crate::error::{CliError, Result};

pub const ARTIFACT_VERSION: &str = concat!("varqual/", env!("CARGO_PKG_VERSION"));

/// Format tag written at the top of every t-statistic file.
pub const TSTAT_FORMAT: &str = "varqual-tstats/1";

/// Everything needed to reproduce a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub sweep: SweepConfig,
    #[serde(default)]
    pub interpolation: InterpolationMode,
    #[serde(default = "default_targets")]
    pub target_powers: Vec<f64>,
}

pub fn default_targets() -> Vec<f64> {
    vec![0.5, 0.6, 0.7, 0.8, 0.9]
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.sweep.validate()?;
        if self.target_powers.is_empty() {
            return Err(CliError::Validation("at least one target power is required".into()));
        }
        for &p in &self.target_powers {
            if !(p > 0.0 && p < 1.0) {
                return Err(CliError::Validation(format!("target power must lie in (0, 1), got {p}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Trials whose report could not be formed, summed over all cells.
    pub degenerate_batches: usize,
    pub not_reached: usize,
    pub undefined_efficiencies: usize,
}

/// Provenance record embedded in every sweep output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub seed: u64,
    pub spec: SweepSpec,
    #[serde(default)]
    pub started: Option<String>,
    #[serde(default)]
    pub finished: Option<String>,
    #[serde(default)]
    pub diagnostics: Diagnostics,
}

impl RunManifest {
    pub fn new(spec: SweepSpec) -> Self {
        Self {
            artifact_version: ARTIFACT_VERSION.to_string(),
            seed: spec.sweep.base.seed,
            spec,
            started: None,
            finished: None,
            diagnostics: Diagnostics::default(),
        }
    }

    /// Reads either a full manifest from an earlier run or a bare spec.
    pub fn parse_spec(text: &str) -> Result<SweepSpec> {
        if let Ok(manifest) = serde_json::from_str::<RunManifest>(text) {
            if manifest.seed != manifest.spec.sweep.base.seed {
                return Err(CliError::Validation(format!(
                    "manifest seed {} disagrees with config seed {}",
                    manifest.seed, manifest.spec.sweep.base.seed
                )));
            }
            return Ok(manifest.spec);
        }
        serde_json::from_str::<SweepSpec>(text).map_err(|e| CliError::Parse(format!("manifest: {e}")))
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
