use serde::{Deserialize, Serialize};

use super::{breakpoint_tol, merge_sorted, FunctionRecord};
use crate::{Error, Result};

/// Continuous broken line: affine between strictly increasing nodes, affine
/// with `left_slope` / `right_slope` beyond the first / last node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionRecord", into = "FunctionRecord")]
pub struct PiecewiseLinearFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    left_slope: f64,
    right_slope: f64,
}

impl PiecewiseLinearFn {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, left_slope: f64, right_slope: f64) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints for {} node values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(values.iter()).chain([&left_slope, &right_slope]).any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("non-finite entry".into()));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidFunction(format!(
                "breakpoints not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        Ok(Self { breakpoints, values, left_slope, right_slope })
    }

    pub(crate) fn from_parts(breakpoints: Vec<f64>, values: Vec<f64>, left_slope: f64, right_slope: f64) -> Self {
        debug_assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(breakpoints.len(), values.len());
        Self { breakpoints, values, left_slope, right_slope }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_parts(vec![0.0], vec![c], 0.0, 0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn left_slope(&self) -> f64 {
        self.left_slope
    }

    pub fn right_slope(&self) -> f64 {
        self.right_slope
    }

    pub fn first_node(&self) -> (f64, f64) {
        (self.breakpoints[0], self.values[0])
    }

    pub fn last_node(&self) -> (f64, f64) {
        let n = self.breakpoints.len() - 1;
        (self.breakpoints[n], self.values[n])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.breakpoints.len();
        let (x0, v0) = self.first_node();
        if x <= x0 {
            return v0 + self.left_slope * (x - x0);
        }
        let (xn, vn) = self.last_node();
        if x >= xn {
            return vn + self.right_slope * (x - xn);
        }
        let j = self.breakpoints.partition_point(|&p| p <= x).min(n - 1);
        let (a, b) = (self.breakpoints[j - 1], self.breakpoints[j]);
        let (fa, fb) = (self.values[j - 1], self.values[j]);
        let s = (x - a) / (b - a);
        fa + s * (fb - fa)
    }

    /// Slopes of the interior segments, in order.
    pub fn slopes(&self) -> Vec<f64> {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]))
            .collect()
    }

    /// Interior segments as `(x_a, x_b, f_a, f_b)`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (x[0], x[1], v[0], v[1]))
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.left_slope >= 0.0 && self.right_slope >= 0.0 && self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// Largest positive slope (0 if the function never increases).
    pub fn lip_plus(&self) -> f64 {
        self.slopes()
            .into_iter()
            .chain([self.left_slope, self.right_slope])
            .fold(0.0, f64::max)
    }

    /// Whether slopes (extensions included) are nondecreasing up to `tol`.
    pub fn is_convex(&self, tol: f64) -> bool {
        let mut all = vec![self.left_slope];
        all.extend(self.slopes());
        all.push(self.right_slope);
        all.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    /// Pointwise combination on the merged node set; extension slopes combine
    /// through the same operation applied to the slopes.
    pub fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let lo = self.breakpoints[0].min(other.breakpoints[0]);
        let hi = self.last_node().0.max(other.last_node().0);
        let bps = merge_sorted(&self.breakpoints, &other.breakpoints, breakpoint_tol(lo, hi));
        let values = bps.iter().map(|&x| op(self.eval(x), other.eval(x))).collect();
        // extension slopes: op is affine in both arguments for every caller here
        let left = op(self.left_slope, other.left_slope) - op(0.0, 0.0);
        let right = op(self.right_slope, other.right_slope) - op(0.0, 0.0);
        Self::from_parts(bps, values, left, right)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `sup |g|`, infinite when an extension slope is nonzero.
    pub fn sup_abs(&self) -> f64 {
        if self.left_slope != 0.0 || self.right_slope != 0.0 {
            return f64::INFINITY;
        }
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Exact `∫|g|` over the line; infinite unless `g` vanishes beyond both ends.
    pub fn integral_abs(&self) -> f64 {
        let (_, v0) = self.first_node();
        let (_, vn) = self.last_node();
        if self.left_slope != 0.0 || self.right_slope != 0.0 || v0 != 0.0 || vn != 0.0 {
            return f64::INFINITY;
        }
        self.integral_abs_interior()
    }

    /// `∫|g|` over the interior nodes only, ignoring the tails.
    pub fn integral_abs_interior(&self) -> f64 {
        self.segments().map(|(a, b, fa, fb)| integral_abs_affine(b - a, fa, fb)).sum()
    }
}

/// `∫_0^len |fa + (fb - fa) s / len| ds`, split at the zero crossing.
pub(crate) fn integral_abs_affine(len: f64, fa: f64, fb: f64) -> f64 {
    if fa * fb >= 0.0 {
        0.5 * len * (fa.abs() + fb.abs())
    } else {
        let (a, b) = (fa.abs(), fb.abs());
        0.5 * len * (a * a + b * b) / (a + b)
    }
}

impl TryFrom<FunctionRecord> for PiecewiseLinearFn {
    type Error = Error;

    fn try_from(record: FunctionRecord) -> Result<Self> {
        match record {
            FunctionRecord::Linear { breakpoints, values, left_slope, right_slope } => {
                Self::new(breakpoints, values, left_slope, right_slope)
            }
            FunctionRecord::Constant { .. } => {
                Err(Error::InvalidFunction("expected kind \"pl\", found \"pc\"".into()))
            }
        }
    }
}

impl From<PiecewiseLinearFn> for FunctionRecord {
    fn from(f: PiecewiseLinearFn) -> Self {
        FunctionRecord::Linear {
            breakpoints: f.breakpoints,
            values: f.values,
            left_slope: f.left_slope,
            right_slope: f.right_slope,
        }
    }
}
