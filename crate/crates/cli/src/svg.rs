//! Minimal hand-rolled SVG line plots. Decay plots use a log scale on the
//! vertical (ratio) axis and a linear scale on k; geometry plots (numerical
//! ranges, contours, strips) are linear in both axes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn axis_frame(svg: &mut String, title: &str) {
    let _ = write!(
        svg,
        "<rect x='{MARGIN}' y='{MARGIN}' width='{}' height='{}' fill='none' stroke='black'/>\
         <text x='{}' y='30' text-anchor='middle' font-size='16'>{title}</text>",
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN,
        W / 2.0
    );
}

fn polyline(svg: &mut String, pts: &[(f64, f64)], color: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = write!(
        svg,
        "<polyline points='{}' fill='none' stroke='{color}' stroke-width='1.5'/>",
        coords.join(" ")
    );
}

fn legend(svg: &mut String, series: &[Series]) {
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN + 18.0 * (i as f64 + 1.0);
        let color = PALETTE[i % PALETTE.len()];
        let _ = write!(
            svg,
            "<line x1='{}' y1='{y}' x2='{}' y2='{y}' stroke='{color}' stroke-width='2'/>\
             <text x='{}' y='{}' font-size='12'>{}</text>",
            W - MARGIN - 120.0,
            W - MARGIN - 100.0,
            W - MARGIN - 95.0,
            y + 4.0,
            s.label
        );
    }
}

fn write_svg(path: &Path, body: String) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let doc = format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{W}' height='{H}' \
         viewBox='0 0 {W} {H}'>{body}</svg>\n"
    );
    fs::write(path, doc).with_context(|| format!("writing {}", path.display()))
}

/// Decay plot: x linear, y = log10 of the values (clamped below at 1e-18).
pub fn decay_plot(path: &Path, title: &str, series: &[Series]) -> Result<()> {
    let floor = 1e-18f64;
    let mut x_max = 1.0f64;
    let mut y_min = 0.0f64;
    for s in series {
        for &(x, y) in &s.points {
            x_max = x_max.max(x);
            y_min = y_min.min(y.max(floor).log10());
        }
    }
    let y_max = 0.0f64;
    let y_min = y_min.min(-1.0);
    let sx = |x: f64| MARGIN + (x / x_max) * (W - 2.0 * MARGIN);
    let sy = |y: f64| {
        let ly = y.max(floor).log10();
        MARGIN + (y_max - ly) / (y_max - y_min) * (H - 2.0 * MARGIN)
    };

    let mut svg = String::new();
    axis_frame(&mut svg, title);
    let _ = write!(
        svg,
        "<text x='{}' y='{}' text-anchor='middle' font-size='12'>k</text>\
         <text x='15' y='{}' font-size='12' transform='rotate(-90 15 {})'>log10 ratio</text>",
        W / 2.0,
        H - 15.0,
        H / 2.0,
        H / 2.0
    );
    for decade in (y_min.floor() as i64)..=0 {
        let y = MARGIN + (y_max - decade as f64) / (y_max - y_min) * (H - 2.0 * MARGIN);
        let _ = write!(
            svg,
            "<line x1='{MARGIN}' y1='{y:.2}' x2='{}' y2='{y:.2}' stroke='#ddd'/>\
             <text x='{}' y='{:.2}' text-anchor='end' font-size='10'>1e{decade}</text>",
            W - MARGIN,
            MARGIN - 5.0,
            y + 3.0
        );
    }
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = s.points.iter().map(|&(x, y)| (sx(x), sy(y))).collect();
        polyline(&mut svg, &pts, PALETTE[i % PALETTE.len()]);
    }
    legend(&mut svg, series);
    write_svg(path, svg)
}

/// Plane plot: closed or open curves in the complex plane, equal linear
/// scales on both axes.
pub fn plane_plot(path: &Path, title: &str, series: &[Series]) -> Result<()> {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    let span = (x_max - x_min).max(y_max - y_min).max(1e-12);
    let cx = 0.5 * (x_min + x_max);
    let cy = 0.5 * (y_min + y_max);
    let scale = (W.min(H) - 2.0 * MARGIN) / (span * 1.1);
    let sx = |x: f64| W / 2.0 + (x - cx) * scale;
    let sy = |y: f64| H / 2.0 - (y - cy) * scale;

    let mut svg = String::new();
    axis_frame(&mut svg, title);
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = s.points.iter().map(|&(x, y)| (sx(x), sy(y))).collect();
        polyline(&mut svg, &pts, PALETTE[i % PALETTE.len()]);
    }
    legend(&mut svg, series);
    write_svg(path, svg)
}
