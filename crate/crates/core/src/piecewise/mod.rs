//! Exact piecewise representations on the real line.
//!
//! [`PiecewiseConstantFn`] is the state of a front tracking solution,
//! [`PiecewiseLinearFn`] carries primitives, fluxes and conjugates, and
//! [`QuantileFn`] is the right-continuous pseudo-inverse of a nondecreasing
//! primitive.

mod constant;
mod linear;
mod project;
mod quantile;

pub use constant::PiecewiseConstantFn;
pub use linear::PiecewiseLinearFn;
pub use project::{project_to_grid, project_to_grid_offset, CellIntegrable};
pub use quantile::{QuantileFn, QuantileJump, QuantileSegment};

use serde::{Deserialize, Serialize};

/// Relative tolerance used when two breakpoints are considered equal.
pub(crate) const BREAKPOINT_RTOL: f64 = 1e-12;

pub(crate) fn breakpoint_tol(lo: f64, hi: f64) -> f64 {
    BREAKPOINT_RTOL * (hi - lo).abs()
}

/// Sorted union of two increasing sequences, merging points closer than `tol`.
pub(crate) fn merge_sorted(a: &[f64], b: &[f64], tol: f64) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for x in all {
        match out.last() {
            Some(&last) if x - last <= tol => {}
            _ => out.push(x),
        }
    }
    out
}

/// JSON wire form shared by both function types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FunctionRecord {
    #[serde(rename = "pc")]
    Constant { breakpoints: Vec<f64>, values: Vec<f64> },
    #[serde(rename = "pl")]
    Linear {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "is_zero")]
        left_slope: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        right_slope: f64,
    },
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}
