use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Errors below this are treated as exact and give no EOC.
pub const EOC_FLOOR: f64 = 1e-14;

/// Levels entering the least-squares slope (the finest ones).
pub const SLOPE_LEVELS: usize = 4;

/// Pairwise orders of a halving sequence and the fitted slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eoc {
    /// `log₂(e_k / e_{k+1})`, one shorter than the input.
    pub pairwise: Vec<Option<f64>>,
    /// Slope of `-log₂ e` against the level over the last [`SLOPE_LEVELS`]
    /// levels with usable errors.
    pub slope: Option<f64>,
}

fn usable(e: Option<f64>) -> Option<f64> {
    e.filter(|e| e.is_finite() && *e > EOC_FLOOR)
}

/// Orders for errors on levels `Δx, Δx/2, Δx/4, ...`; missing or non-positive
/// entries yield `None`.
pub fn eoc(errors: &[Option<f64>]) -> Eoc {
    let pairwise = errors
        .windows(2)
        .map(|w| match (usable(w[0]), usable(w[1])) {
            (Some(a), Some(b)) => Some((a / b).log2()),
            _ => None,
        })
        .collect();
    let points: Vec<(f64, f64)> = errors
        .iter()
        .enumerate()
        .filter_map(|(k, e)| usable(*e).map(|e| (k as f64, -e.log2())))
        .collect();
    let tail = &points[points.len().saturating_sub(SLOPE_LEVELS)..];
    Eoc { pairwise, slope: least_squares_slope(tail) }
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// One refinement level at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EocRow {
    pub k: u32,
    pub dx: f64,
    /// One entry per metric column; `None` when unavailable.
    pub errors: Vec<Option<f64>>,
    /// Order between this level and the next one.
    pub eoc: Vec<Option<f64>>,
    /// Reason the level failed, if it did.
    pub failure: Option<String>,
    pub events: usize,
    pub fronts: usize,
}

/// Errors and observed orders of a refinement study at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EocTable {
    pub time: f64,
    /// Column names, e.g. `l1, w1, wp_2, winf`.
    pub metrics: Vec<String>,
    pub rows: Vec<EocRow>,
    pub slopes: Vec<Option<f64>>,
    pub notes: Vec<String>,
}

impl EocTable {
    pub fn new(time: f64, metrics: Vec<String>) -> Self {
        let slopes = vec![None; metrics.len()];
        Self { time, metrics, rows: Vec::new(), slopes, notes: Vec::new() }
    }

    pub fn column(&self, metric: &str) -> Option<usize> {
        self.metrics.iter().position(|m| m == metric)
    }

    /// Errors of one metric by level.
    pub fn errors(&self, metric: &str) -> Option<Vec<Option<f64>>> {
        let c = self.column(metric)?;
        Some(self.rows.iter().map(|r| r.errors[c]).collect())
    }

    pub fn slope(&self, metric: &str) -> Option<f64> {
        self.slopes[self.column(metric)?]
    }

    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.failure.is_some())
    }

    /// Sorts rows by level and recomputes every EOC column.
    pub fn finalize(&mut self) {
        self.rows.sort_by_key(|r| r.k);
        for c in 0..self.metrics.len() {
            let errs: Vec<Option<f64>> = self.rows.iter().map(|r| r.errors[c]).collect();
            let e = eoc(&errs);
            for (i, row) in self.rows.iter_mut().enumerate() {
                row.eoc.resize(self.metrics.len(), None);
                row.eoc[c] = e.pairwise.get(i).copied().flatten();
            }
            self.slopes[c] = e.slope;
        }
    }

    pub fn header(&self) -> String {
        let mut cols = vec!["k".to_string(), "dx".to_string()];
        cols.extend(self.metrics.iter().cloned());
        cols.extend(self.metrics.iter().map(|m| format!("eoc_{m}")));
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        if self.rows.is_empty() {
            return out;
        }
        for row in &self.rows {
            let mut cells = vec![row.k.to_string(), fmt_float(row.dx)];
            if row.failure.is_some() {
                cells.extend(std::iter::repeat_n("failed".to_string(), self.metrics.len()));
            } else {
                cells.extend(row.errors.iter().map(|e| fmt_opt(*e)));
            }
            cells.extend(row.eoc.iter().map(|e| fmt_opt(*e)));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        let mut cells = vec!["slope".to_string(), String::new()];
        cells.extend(std::iter::repeat_n(String::new(), self.metrics.len()));
        cells.extend(self.slopes.iter().map(|s| fmt_opt(*s)));
        out.push_str(&cells.join(","));
        out.push('\n');
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        out
    }
}

/// Seventeen significant digits: parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), fmt_float)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// File name for the table at time `t` when a study writes several times:
/// `out.csv` becomes `out_t0.5.csv`.
pub fn path_for_time(path: &Path, t: f64) -> std::path::PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_t{t}.{}", ext.to_string_lossy()),
        None => format!("{stem}_t{t}"),
    };
    path.with_file_name(name)
}

/// Renders one table.
pub fn render(table: &EocTable, format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(table)? + "\n",
    })
}

/// Writes one table to `path`.
pub fn emit(table: &EocTable, format: Format, path: &Path) -> Result<()> {
    let text = render(table, format)?;
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.into(), source })
}
