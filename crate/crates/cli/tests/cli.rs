use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use clap::Parser;
use varqual_cli::args::{Cli, Command as Sub};
use varqual_cli::audit::AuditReport;
use varqual_cli::manifest::RunManifest;
use varqual_cli::output::body_of;
use varqual_cli::plotdata::{FIGURE1_HEADER, FIGURE2_HEADER};
use varqual_cli::sweep::{SweepOutput, COMPLEXITY_HEADER, EFFICIENCY_HEADER, POWER_HEADER};
use varqual_core::metrics::{self, MetricKind, MetricSettings};
use varqual_core::sim::simulate_batch;
use varqual_core::{ExperimentConfig, NoiseSpec, SimulationMode};

fn varqual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varqual")).args(args).output().expect("binary runs")
}

fn ok(out: Output) -> Output {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn audit_json(path: &Path) -> AuditReport {
    let out = ok(varqual(&["audit", s(path), "--json"]));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Parses a CSV written by the CLI and checks its header and manifest block.
fn read_csv(path: &Path, header: &[&str]) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let comments: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    let manifest = comments
        .iter()
        .find_map(|l| l.strip_prefix("# manifest: "))
        .unwrap_or_else(|| panic!("{} has no manifest comment", path.display()));
    serde_json::from_str::<serde_json::Value>(manifest).unwrap();
    let mut reader = csv::Reader::from_reader(body_of(&text).as_bytes());
    let found: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(found, header, "{}", path.display());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn simulate_then_audit_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    ok(varqual(&[
        "simulate", "--theta", "0.3", "--n", "3000", "--seed", "5", "--fast", "--out", s(dir.path()),
    ]));
    let report = audit_json(&dir.path().join("tstats.csv"));

    let config = ExperimentConfig {
        noise: NoiseSpec::new(0.3).unwrap(),
        n_tests: 3000,
        mode: SimulationMode::FastPath,
        seed: 5,
        ..ExperimentConfig::default()
    };
    let batch = simulate_batch(&config, 0).unwrap();
    let settings = MetricSettings::default();
    assert_eq!(report.n, 3000);
    for m in MetricKind::ALL {
        assert_eq!(report.entry(m).report, Some(metrics::evaluate(m, &batch, &settings).unwrap()), "{m}");
    }
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        ok(varqual(&[
            "simulate", "--theta", "0", "--n", "100", "--seed", "1", "--out", s(dir.path()), "--name", name,
        ]));
        fs::read_to_string(dir.path().join(name)).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(body_of(&a), body_of(&b));
    assert_eq!(read_csv(&dir.path().join("a.csv"), &["experiment_id", "t"]).len(), 100);
    assert!(a.starts_with("# format: varqual-tstats/1\n"));
}

#[test]
fn simulated_noise_matches_analytic_mean() {
    let dir = tempfile::tempdir().unwrap();
    ok(varqual(&[
        "simulate", "--theta", "0.4", "--n", "100000", "--mode", "fast", "--seed", "7", "--out", s(dir.path()),
    ]));
    let report = audit_json(&dir.path().join("tstats.csv"));
    let r = report.entry(MetricKind::AvgT2).report.unwrap();
    let want = 0.16f64.exp();
    assert!((r.estimate - want).abs() <= 4.0 * r.std_error, "{} vs {want}", r.estimate);
}

#[test]
fn simulate_flag_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(varqual(&["simulate", "--n", "0", "--out", s(dir.path())]).status.code(), Some(3));
    assert_eq!(varqual(&["simulate", "--n", "10", "--theta=-1"]).status.code(), Some(3));
    assert_eq!(varqual(&["simulate", "--n", "10", "--source", "uniform:6,5"]).status.code(), Some(2));
    assert_eq!(varqual(&["simulate", "--n", "ten"]).status.code(), Some(2));
    assert_eq!(varqual(&["simulate", "--n", "10", "--mode", "slow"]).status.code(), Some(2));
}

#[test]
fn audit_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    fs::write(&path, "experiment_id,t\nexp1, 0.0\n").unwrap();
    let report = audit_json(&path);
    assert_eq!(report.n, 1);
    assert_eq!(report.entry(MetricKind::Fpr).estimate, Some(0.0));
    assert_eq!(report.entry(MetricKind::AvgT2).estimate, Some(0.0));
    let k = report.entry(MetricKind::Kurtosis);
    assert!(k.estimate.is_none() && k.report.is_none() && k.unavailable.is_some());

    let text = String::from_utf8(ok(varqual(&["audit", s(&path)])).stdout).unwrap();
    assert!(text.contains("KURTOSIS") && text.contains("unavailable"));
}

#[test]
fn audit_errors_carry_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    };

    let nan = varqual(&["audit", s(&write("nan.csv", "experiment_id,t\nexp0,1.0\nexp1, NaN\n"))]);
    assert_eq!(nan.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&nan.stderr);
    assert!(msg.contains("row 2") && msg.contains("exp1"), "{msg}");

    let bad = varqual(&["audit", s(&write("bad.csv", "experiment_id,t\na,1\nb,2,3\n"))]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));

    let empty = varqual(&["audit", s(&write("empty.csv", "# nothing\nexperiment_id,t\n"))]);
    assert_eq!(empty.status.code(), Some(3));

    assert_eq!(varqual(&["audit", s(&dir.path().join("missing.csv"))]).status.code(), Some(4));
}

#[test]
fn null_fixture_audit_is_frozen() {
    let report = audit_json(&fixture("null_tstats.csv"));
    let frozen: AuditReport =
        serde_json::from_str(&fs::read_to_string(fixture("null_audit.json")).unwrap()).unwrap();
    assert_eq!(report, frozen);
    assert_eq!(report.n, 10_000);
    for e in &report.entries {
        assert!(!e.report.unwrap().reject, "{}", e.metric);
    }
}

#[test]
fn audit_writes_json_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    ok(varqual(&["audit", s(&fixture("null_tstats.csv")), "--out", s(dir.path()), "--sidedness", "greater"]));
    let report: AuditReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("audit.json")).unwrap()).unwrap();
    assert!(report
        .entries
        .iter()
        .all(|e| e.report.unwrap().sidedness == varqual_core::Sidedness::OneSidedGreater));
}

const SMOKE: [&str; 9] = ["--thetas", "0,0.4", "--n-grid", "100,1000", "--trials", "50", "--fast", "--seed", "11"];

fn smoke_sweep(out: &Path) -> Duration {
    let mut args = vec!["sweep"];
    args.extend(SMOKE);
    args.extend(["--out", s(out)]);
    let start = Instant::now();
    ok(varqual(&args));
    start.elapsed()
}

#[test]
fn smoke_sweep_outputs_and_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let elapsed = smoke_sweep(dir.path());
    assert!(elapsed < Duration::from_secs(10), "{elapsed:?}");

    let power = read_csv(&dir.path().join("power.csv"), &POWER_HEADER);
    assert_eq!(power.len(), 2 * 2 * 3);
    for row in &power {
        let p: f64 = row[3].parse().unwrap();
        assert_eq!(row[4], "50");
        assert!((0.0..=1.0).contains(&p));
        if row[0] == "0" {
            assert!(p <= 0.28, "null power {p} in {row:?}");
        }
        row[1].parse::<MetricKind>().unwrap();
        row[2].parse::<usize>().unwrap();
    }

    let complexity = read_csv(&dir.path().join("complexity.csv"), &COMPLEXITY_HEADER);
    assert_eq!(complexity.len(), 2 * 3 * 5);
    for row in &complexity {
        assert!(row[3] == "NOT_REACHED" || row[3].parse::<f64>().is_ok(), "{row:?}");
    }

    let efficiency = read_csv(&dir.path().join("efficiency.csv"), &EFFICIENCY_HEADER);
    assert_eq!(efficiency.len(), 2 * 3 * 5);
    for row in &efficiency {
        assert!(row[4] == "UNDEFINED" || row[4].parse::<f64>().unwrap() > 0.0, "{row:?}");
    }

    let results: SweepOutput =
        serde_json::from_str(&fs::read_to_string(dir.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(results.power.len(), power.len());
    let nulls = results.complexity.iter().filter(|c| c.n_required.is_none()).count();
    assert_eq!(nulls, complexity.iter().filter(|r| r[3] == "NOT_REACHED").count());
    assert_eq!(results.manifest.diagnostics.not_reached, nulls);
    let undefined = efficiency.iter().filter(|r| r[4] == "UNDEFINED").count();
    assert_eq!(results.manifest.diagnostics.undefined_efficiencies, undefined);

    let manifest: RunManifest =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest, results.manifest);
    assert_eq!(manifest.seed, 11);
    assert!(manifest.started.is_some() && manifest.finished.is_some());
}

#[test]
fn sweep_bodies_are_byte_identical_across_reruns() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    smoke_sweep(a.path());
    smoke_sweep(b.path());
    ok(varqual(&[
        "sweep",
        "--manifest",
        s(&a.path().join("manifest.json")),
        "--workers",
        "3",
        "--out",
        s(c.path()),
    ]));
    for name in ["power.csv", "complexity.csv", "efficiency.csv"] {
        let first = fs::read_to_string(a.path().join(name)).unwrap();
        for other in [&b, &c] {
            let second = fs::read_to_string(other.path().join(name)).unwrap();
            assert_eq!(body_of(&first), body_of(&second), "{name}");
        }
    }
}

#[test]
fn default_sweep_is_the_standard_configuration() {
    let cli = Cli::try_parse_from(["varqual", "sweep"]).unwrap();
    let Sub::Sweep(args) = cli.command else { panic!() };
    let spec = varqual_cli::sweep_spec(&args).unwrap();
    assert_eq!(spec.sweep.thetas, vec![0.1, 0.2, 0.3, 0.4]);
    assert_eq!(spec.sweep.n_grid.len(), 30);
    assert_eq!((spec.sweep.n_grid[0], spec.sweep.n_grid[29]), (100, 10_000));
    assert_eq!(spec.sweep.trials, 500);
    assert_eq!(spec.sweep.base.mode, SimulationMode::FullSample);
    assert_eq!(spec.sweep.base.group_size, 1000);
    assert_eq!(spec.target_powers, vec![0.5, 0.6, 0.7, 0.8, 0.9]);

    let cli = Cli::try_parse_from(["varqual", "sweep", "--fast", "--interp", "isotonic", "--sidedness-fpr", "greater"]).unwrap();
    let Sub::Sweep(args) = cli.command else { panic!() };
    let spec = varqual_cli::sweep_spec(&args).unwrap();
    assert_eq!(spec.sweep.base.mode, SimulationMode::FastPath);
    assert_eq!(spec.interpolation, varqual_core::InterpolationMode::Isotonic);
    assert_eq!(spec.sweep.sidedness.fpr, varqual_core::Sidedness::OneSidedGreater);
    assert_eq!(spec.sweep.sidedness.avg_t2, varqual_core::Sidedness::TwoSided);
}

#[test]
fn standard_grid_gives_360_power_rows_and_plot_series() {
    let dir = tempfile::tempdir().unwrap();
    // standard grid at a token trial count; the row count depends only on the grid
    ok(varqual(&["sweep", "--fast", "--trials", "2", "--out", s(dir.path())]));
    assert_eq!(read_csv(&dir.path().join("power.csv"), &POWER_HEADER).len(), 360);

    let plots = dir.path().join("plots");
    ok(varqual(&["plotdata", s(dir.path())]));
    let mut figure1 = 0;
    for theta in ["0.1", "0.2", "0.3", "0.4"] {
        let rows = read_csv(&plots.join(format!("figure1_theta_{theta}.csv")), &FIGURE1_HEADER);
        let mut metrics: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
        metrics.dedup();
        assert_eq!(metrics, ["FPR", "AVG_T2", "KURTOSIS"]);
        assert_eq!(rows.len(), 90);
        assert!(plots.join(format!("figure1_theta_{theta}.svg")).is_file());
        figure1 += 1;
    }
    assert_eq!(figure1, 4);

    let efficiency = read_csv(&dir.path().join("efficiency.csv"), &EFFICIENCY_HEADER);
    let undefined = efficiency.iter().filter(|r| r[4] == "UNDEFINED").count();
    let mut plotted = 0;
    for theta in ["0.1", "0.2", "0.3", "0.4"] {
        let rows = read_csv(&plots.join(format!("figure2_theta_{theta}.csv")), &FIGURE2_HEADER);
        assert!(rows.iter().all(|r| r[3].parse::<f64>().is_ok()));
        plotted += rows.len();
    }
    assert_eq!(plotted + undefined, efficiency.len());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(plots.join("plotdata.json")).unwrap()).unwrap();
    assert_eq!(summary["omitted_undefined"], undefined);
}

#[test]
fn plotdata_dependency_errors() {
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(varqual(&["plotdata", s(empty.path())]).status.code(), Some(4));

    let partial = tempfile::tempdir().unwrap();
    smoke_sweep(partial.path());
    fs::remove_file(partial.path().join("efficiency.csv")).unwrap();
    let out = varqual(&["plotdata", s(partial.path())]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("efficiency.csv"));

    let truncated = tempfile::tempdir().unwrap();
    smoke_sweep(truncated.path());
    fs::write(truncated.path().join("results.json"), "{\"manifest\":").unwrap();
    assert_eq!(varqual(&["plotdata", s(truncated.path())]).status.code(), Some(4));
}

#[test]
fn sweep_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let mut args = vec!["sweep"];
    args.extend(SMOKE);
    let bad_out = blocker.join("sub");
    args.extend(["--out", s(&bad_out)]);
    assert_eq!(varqual(&args).status.code(), Some(1));

    assert_eq!(varqual(&["sweep", "--fast", "--n-grid", "100,100"]).status.code(), Some(3));
    assert_eq!(varqual(&["sweep", "--fast", "--trials", "0"]).status.code(), Some(3));
    assert_eq!(varqual(&["sweep", "--manifest", s(&dir.path().join("none.json"))]).status.code(), Some(4));
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "not json").unwrap();
    assert_eq!(varqual(&["sweep", "--manifest", s(&garbage)]).status.code(), Some(2));
}
