//! CSV and SVG artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

/// A rectangular table of numbers with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub label: String,
    /// `(x, z)` in model coordinates, `+z` up.
    pub points: Vec<(f64, f64)>,
}

/// 17 significant digits, enough to round-trip any `f64`. NaN becomes an
/// empty cell.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

pub fn csv_string(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes `table` to `path`. An empty table is an error and leaves no file.
pub fn export_csv(table: &Table, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(CliError::EmptyOutput(format!("no samples for {}", path.display())));
    }
    fs::write(path, csv_string(table)).map_err(|e| CliError::io(path, e))
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub fn svg_string(lines: &[Polyline]) -> Result<String> {
    if lines.is_empty() || lines.iter().any(|l| l.points.is_empty()) {
        return Err(CliError::EmptyOutput("no curve samples to draw".into()));
    }
    // Drawing coordinates are (x, -z) so that +z renders upward.
    let pts = lines.iter().flat_map(|l| l.points.iter()).map(|&(x, z)| (x, 0.0 - z));
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return Err(CliError::EmptyOutput("no finite curve samples to draw".into()));
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-9);
    let (vx, vy, vw, vh) = (x0 - pad, y0 - pad, x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx} {vy} {vw} {vh}" width="800" height="{}">"#,
        (800.0 * vh / vw).round().max(1.0)
    )
    .unwrap();
    for (i, line) in lines.iter().enumerate() {
        let points: Vec<String> = line
            .points
            .iter()
            .filter(|(x, z)| x.is_finite() && z.is_finite())
            .map(|&(x, z)| format!("{x},{}", 0.0 - z))
            .collect();
        writeln!(
            out,
            r#"  <polyline data-label="{}" fill="none" stroke="{}" stroke-width="1" vector-effect="non-scaling-stroke" points="{}"/>"#,
            escape(&line.label),
            PALETTE[i % PALETTE.len()],
            points.join(" ")
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes one polyline per curve. Nothing is written if there is nothing to draw.
pub fn export_svg(lines: &[Polyline], path: &Path) -> Result<()> {
    let svg = svg_string(lines)?;
    fs::write(path, svg).map_err(|e| CliError::io(path, e))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('"', "&quot;").replace('<', "&lt;").replace('>', "&gt;")
}
