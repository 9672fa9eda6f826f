//! CSV, SVG and JSON writers. Everything is formatted from values alone so
//! identical inputs give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::dynamics::TrajectoryRecord;
use crate::error::{Error, Result};

pub const TRAJECTORY_HEADER: &str =
    "step,time_fs,R_angstrom,v_angstrom_per_fs,force_ha_per_angstrom,energy_ha,preparations";

/// Histogram range and bin width, in Angstrom.
pub const HISTOGRAM_RANGE: (f64, f64) = (0.6, 1.2);
pub const HISTOGRAM_BIN: f64 = 0.002;

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn trajectory_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.step, r.time_fs, r.r, r.v, r.force, r.energy, r.preparations
        );
    }
    out
}

/// Bin counts over [`HISTOGRAM_RANGE`]; values outside are dropped.
pub fn histogram(values: impl IntoIterator<Item = f64>) -> Vec<u64> {
    let (lo, hi) = HISTOGRAM_RANGE;
    let bins = ((hi - lo) / HISTOGRAM_BIN).round() as usize;
    let mut counts = vec![0; bins];
    for v in values {
        if v >= lo && v < hi {
            let i = (((v - lo) / HISTOGRAM_BIN) as usize).min(bins - 1);
            counts[i] += 1;
        }
    }
    counts
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn svg_frame(out: &mut String, title: &str, x_label: &str, x_range: (f64, f64), y_label: &str, y_range: (f64, f64)) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN / 2.0, MARGIN / 2.0 + 10.0);
    let _ = writeln!(out, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
    for (value, x) in [(x_range.0, x0), (x_range.1, x1)] {
        let _ = writeln!(out, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, y0 + 15.0, tick(value));
    }
    for (value, y) in [(y_range.0, y0), (y_range.1, y1)] {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, x0 - 4.0, y + 4.0, tick(value));
    }
}

fn tick(v: f64) -> String {
    format!("{}", (v * 1e4).round() / 1e4)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn plot_x(x: f64, range: (f64, f64)) -> f64 {
    MARGIN + (x - range.0) / (range.1 - range.0) * (WIDTH - 1.5 * MARGIN)
}

fn plot_y(y: f64, range: (f64, f64)) -> f64 {
    let top = MARGIN / 2.0 + 10.0;
    let bottom = HEIGHT - MARGIN;
    bottom - (y - range.0) / (range.1 - range.0) * (bottom - top)
}

/// Bar chart of bond-length counts.
pub fn histogram_svg(title: &str, counts: &[u64]) -> String {
    let max = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let x_range = HISTOGRAM_RANGE;
    let mut out = String::new();
    svg_frame(&mut out, title, "R (Angstrom)", x_range, "count", (0.0, max));
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let left = x_range.0 + i as f64 * HISTOGRAM_BIN;
        let (xa, xb) = (plot_x(left, x_range), plot_x(left + HISTOGRAM_BIN, x_range));
        let (ya, yb) = (plot_y(c as f64, (0.0, max)), plot_y(0.0, (0.0, max)));
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            xa,
            ya,
            xb - xa,
            yb - ya,
            COLORS[0]
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Bond length against time, one polyline per series.
pub fn trajectories_svg(title: &str, series: &[&[TrajectoryRecord]]) -> String {
    let t_max = series
        .iter()
        .filter_map(|s| s.last())
        .map(|r| r.time_fs)
        .fold(0.0, f64::max)
        .max(1e-9);
    let (mut lo, mut hi) = series
        .iter()
        .flat_map(|s| s.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.r), hi.max(r.r)));
    if !(lo < hi) {
        lo -= 0.05;
        hi += 0.05;
    }
    let x_range = (0.0, t_max);
    let y_range = (lo, hi);
    let mut out = String::new();
    svg_frame(&mut out, title, "time (fs)", x_range, "R (Angstrom)", y_range);
    for (k, s) in series.iter().enumerate() {
        // Thin to about a thousand vertices per line.
        let stride = (s.len() / 1000).max(1);
        let mut points = String::new();
        for r in s.iter().step_by(stride) {
            let _ = write!(points, "{:.2},{:.2} ", plot_x(r.time_fs, x_range), plot_y(r.r, y_range));
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1"/>"#,
            points.trim_end(),
            COLORS[k % COLORS.len()]
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("cannot serialize summary: {e}")))?;
    s.push('\n');
    Ok(s)
}
