//! Plot-ready series from a finished sweep directory.
//!
//! For every θ this writes `figure1_theta_<θ>.csv` (`metric,power,n`, one
//! series per metric) and `figure2_theta_<θ>.csv`
//! (`metric_1,metric_2,target_power,e12`, one series per metric pair), plus a
//! rough SVG rendering of each.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::output::{ensure_dir, real, write_atomic, write_csv, write_json};
use crate::sweep::{SweepOutput, COMPLEXITY_CSV, EFFICIENCY_CSV, MANIFEST_JSON, POWER_CSV, RESULTS_JSON};

pub const FIGURE1_HEADER: [&str; 3] = ["metric", "power", "n"];
pub const FIGURE2_HEADER: [&str; 4] = ["metric_1", "metric_2", "target_power", "e12"];
pub const SUMMARY_JSON: &str = "plotdata.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSummary {
    pub figure1_files: Vec<PathBuf>,
    pub figure2_files: Vec<PathBuf>,
    /// Efficiency points left out because `e12` is undefined.
    pub omitted_undefined: usize,
}

/// Loads a sweep directory, failing with a dependency error if any output is
/// missing or unreadable.
pub fn load_sweep(dir: &Path) -> Result<SweepOutput> {
    if !dir.is_dir() {
        return Err(CliError::Dependency(format!("sweep directory {} does not exist", dir.display())));
    }
    let missing: Vec<&str> = [POWER_CSV, COMPLEXITY_CSV, EFFICIENCY_CSV, MANIFEST_JSON, RESULTS_JSON]
        .into_iter()
        .filter(|f| !dir.join(f).is_file())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Dependency(format!(
            "{} is missing sweep outputs: {}",
            dir.display(),
            missing.join(", ")
        )));
    }
    let text = fs::read_to_string(dir.join(RESULTS_JSON))
        .map_err(|e| CliError::Dependency(format!("cannot read {RESULTS_JSON}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Dependency(format!("{RESULTS_JSON} is incomplete: {e}")))
}

pub fn theta_tag(theta: f64) -> String {
    real(theta)
}

pub fn run(sweep_dir: &Path, out_dir: &Path) -> Result<PlotSummary> {
    let sweep = load_sweep(sweep_dir)?;
    ensure_dir(out_dir)?;
    let manifest = sweep.manifest.to_json_line();
    let mut summary = PlotSummary {
        figure1_files: vec![],
        figure2_files: vec![],
        omitted_undefined: 0,
    };

    for &theta in &sweep.manifest.spec.sweep.thetas {
        let tag = theta_tag(theta);

        let mut series: Vec<Series> = Vec::new();
        let mut rows = Vec::new();
        for &metric in &sweep.manifest.spec.sweep.metrics {
            let points: Vec<(f64, f64)> = sweep
                .power
                .iter()
                .filter(|r| r.theta == theta && r.metric == metric)
                .map(|r| (r.power, r.n as f64))
                .collect();
            rows.extend(points.iter().map(|(p, n)| vec![metric.to_string(), real(*p), real(*n)]));
            series.push(Series {
                label: metric.to_string(),
                points,
            });
        }
        let path = out_dir.join(format!("figure1_theta_{tag}.csv"));
        write_csv(&path, &manifest, &FIGURE1_HEADER, &rows)?;
        let svg = render_svg(&format!("Tests needed vs power, θ = {tag}"), "power", "n (A/A tests)", &series);
        write_atomic(&path.with_extension("svg"), svg.as_bytes())?;
        summary.figure1_files.push(path);

        let mut series: Vec<Series> = Vec::new();
        let mut rows = Vec::new();
        for e in sweep.efficiency.iter().filter(|e| e.theta == theta) {
            let Some(e12) = e.e12 else {
                summary.omitted_undefined += 1;
                continue;
            };
            rows.push(vec![e.metric_1.to_string(), e.metric_2.to_string(), real(e.target_power), real(e12)]);
            let label = format!("{} vs {}", e.metric_1, e.metric_2);
            match series.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push((e.target_power, e12)),
                None => series.push(Series {
                    label,
                    points: vec![(e.target_power, e12)],
                }),
            }
        }
        let path = out_dir.join(format!("figure2_theta_{tag}.csv"));
        write_csv(&path, &manifest, &FIGURE2_HEADER, &rows)?;
        let svg = render_svg(&format!("Relative efficiency, θ = {tag}"), "power", "e12", &series);
        write_atomic(&path.with_extension("svg"), svg.as_bytes())?;
        summary.figure2_files.push(path);
    }
    write_json(&out_dir.join(SUMMARY_JSON), &summary)?;
    Ok(summary)
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (70.0, 160.0, 40.0, 50.0);
    let all = series.iter().flat_map(|s| &s.points);
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 1.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for &(_, y) in all {
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    x0 -= 0.02;
    x1 += 0.02;
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, (w - right + left) / 2.0, escape(title));
    let (ax0, ax1, ay0, ay1) = (px(x0), px(x1), py(y0), py(y1));
    let _ = writeln!(svg, r#"<line x1="{ax0}" y1="{ay0}" x2="{ax1}" y2="{ay0}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{ax0}" y1="{ay0}" x2="{ax0}" y2="{ay1}" stroke="black"/>"#);
    for k in 0..=5 {
        let xv = k as f64 / 5.0;
        let yv = y0 + (y1 - y0) * k as f64 / 5.0;
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{xv:.1}</text>"#, px(xv), ay0 + 16.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, ax0 - 6.0, py(yv) + 4.0, tick(yv));
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (ax0 + ax1) / 2.0, h - 12.0, escape(x_label));
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (ay0 + ay1) / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = top + 20.0 * i as f64;
        let lx = w - right + 12.0;
        let _ = writeln!(svg, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.label));
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
