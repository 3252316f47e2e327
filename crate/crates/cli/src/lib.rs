//! Command-line front end: audits of t-statistic files, power sweeps,
//! plot data and simulated fixtures.
//!
//! Exit codes: 0 success, 1 runtime or I/O failure, 2 parse error,
//! 3 validation error, 4 missing or incomplete input.

pub mod args;
pub mod audit;
pub mod error;
pub mod manifest;
pub mod output;
pub mod plotdata;
pub mod simulate;
pub mod sweep;
pub mod tstat;

use std::fs;

use varqual_core::metrics::MetricSettings;
use varqual_core::power::{log_spaced_counts, SweepConfig};
use varqual_core::{ExperimentConfig, NoiseSpec};

use args::{AuditArgs, Cli, Command, PlotdataArgs, SimulateArgs, SweepArgs};
use error::{CliError, Result};
use manifest::{default_targets, RunManifest, SweepSpec};

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Audit(a) => cmd_audit(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Plotdata(a) => cmd_plotdata(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    }
}

fn cmd_audit(a: &AuditArgs) -> Result<()> {
    let defaults = MetricSettings::default();
    let settings = MetricSettings {
        alpha: a.test.alpha.unwrap_or(defaults.alpha),
        ci_level: a.test.ci_level.unwrap_or(defaults.ci_level),
        sidedness: a.test.apply_sidedness(defaults.sidedness),
    };
    let report = audit::audit_file(&a.input, &settings)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{}", report.render_text());
    }
    if let Some(dir) = &a.out {
        output::ensure_dir(dir)?;
        output::write_json(&dir.join("audit.json"), &report)?;
    }
    Ok(())
}

/// Builds the sweep spec from an optional manifest plus flag overrides.
pub fn sweep_spec(a: &SweepArgs) -> Result<SweepSpec> {
    let mut spec = match &a.manifest {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Dependency(format!("cannot read manifest {}: {e}", path.display())))?;
            RunManifest::parse_spec(&text)?
        }
        None => SweepSpec {
            sweep: SweepConfig::standard(),
            interpolation: Default::default(),
            target_powers: default_targets(),
        },
    };
    let s = &mut spec.sweep;
    if let Some(seed) = a.sim.seed {
        s.base.seed = seed;
    }
    if let Some(mode) = a.sim.mode() {
        s.base.mode = mode;
    }
    if let Some(g) = a.sim.group_size {
        s.base.group_size = g;
    }
    if let Some(src) = a.sim.source {
        s.base.source = src;
    }
    if let Some(alpha) = a.test.alpha {
        s.base.alpha = alpha;
    }
    if let Some(ci) = a.test.ci_level {
        s.ci_level = ci;
    }
    s.sidedness = a.test.apply_sidedness(s.sidedness);
    if let Some(t) = &a.thetas {
        s.thetas = t.clone();
    }
    if let Some(grid) = &a.n_grid {
        s.n_grid = grid.clone();
    } else if a.n_min.is_some() || a.n_max.is_some() || a.n_count.is_some() {
        s.n_grid = log_spaced_counts(a.n_min.unwrap_or(100), a.n_max.unwrap_or(10_000), a.n_count.unwrap_or(30))?;
    }
    if let Some(t) = a.trials {
        s.trials = t;
    }
    if let Some(m) = &a.metrics {
        s.metrics = m.clone();
    }
    if let Some(i) = a.interp {
        spec.interpolation = i.into();
    }
    if let Some(t) = &a.target_powers {
        spec.target_powers = t.clone();
    }
    spec.validate()?;
    Ok(spec)
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let spec = sweep_spec(a)?;
    let cells = spec.sweep.thetas.len() * spec.sweep.n_grid.len();
    eprintln!(
        "sweep: {cells} cells x {} trials, {:?}, seed {}",
        spec.sweep.trials, spec.sweep.base.mode, spec.sweep.base.seed
    );
    let out = sweep::execute(spec, a.workers)?;
    sweep::write_outputs(&out, &a.out)?;
    let d = &out.manifest.diagnostics;
    eprintln!(
        "wrote {} ({} power rows; {} NOT_REACHED, {} UNDEFINED, {} degenerate batches)",
        a.out.display(),
        out.power.len(),
        d.not_reached,
        d.undefined_efficiencies,
        d.degenerate_batches
    );
    Ok(())
}

fn cmd_plotdata(a: &PlotdataArgs) -> Result<()> {
    let out = a.out.clone().unwrap_or_else(|| a.sweep_dir.join("plots"));
    let summary = plotdata::run(&a.sweep_dir, &out)?;
    eprintln!(
        "wrote {} figure-1 and {} figure-2 series files to {}; omitted {} UNDEFINED efficiency points",
        summary.figure1_files.len(),
        summary.figure2_files.len(),
        out.display(),
        summary.omitted_undefined
    );
    Ok(())
}

pub fn simulate_config(a: &SimulateArgs) -> Result<ExperimentConfig> {
    let defaults = ExperimentConfig::default();
    let config = ExperimentConfig {
        group_size: a.sim.group_size.unwrap_or(defaults.group_size),
        source: a.sim.source.unwrap_or(defaults.source),
        noise: NoiseSpec::new(a.theta)?,
        n_tests: a.n,
        alpha: a.alpha.unwrap_or(defaults.alpha),
        mode: a.sim.mode().unwrap_or(defaults.mode),
        seed: a.sim.seed.unwrap_or(defaults.seed),
    };
    if config.n_tests == 0 {
        return Err(CliError::Validation("--n must be at least 1".into()));
    }
    config.validate()?;
    Ok(config)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let config = simulate_config(a)?;
    let path = a.out.join(&a.name);
    let file = simulate::run(&config, &path)?;
    eprintln!("wrote {} t-statistics to {}", file.rows.len(), path.display());
    Ok(())
}

