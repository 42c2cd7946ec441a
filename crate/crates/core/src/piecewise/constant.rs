use serde::{Deserialize, Serialize};

use super::{breakpoint_tol, merge_sorted, FunctionRecord, PiecewiseLinearFn, QuantileFn};
use crate::{Error, Result};

/// Compactly supported step function.
///
/// Value `values[i]` on `[breakpoints[i], breakpoints[i + 1])`, zero outside
/// `[breakpoints[0], breakpoints[n])`. Always kept in canonical form: cells of
/// (numerically) zero width are dropped, equal neighbours are merged and zero
/// cells at either end are trimmed. The zero function has no breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionRecord", into = "FunctionRecord")]
pub struct PiecewiseConstantFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstantFn {
    pub fn zero() -> Self {
        Self { breakpoints: Vec::new(), values: Vec::new() }
    }

    /// Builds a step function from `n + 1` strictly increasing breakpoints and
    /// `n` values, then canonicalizes it.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() && values.is_empty() {
            return Ok(Self::zero());
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("non-finite entry".into()));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidFunction(format!(
                "breakpoints not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        Ok(Self::canonical(breakpoints, values))
    }

    /// Uniform cells of width `dx` starting at `x0`.
    pub fn from_cells(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        if dx <= 0.0 {
            return Err(Error::NonPositiveSpacing(dx));
        }
        let breakpoints = (0..=values.len()).map(|i| x0 + i as f64 * dx).collect();
        Self::new(breakpoints, values)
    }

    /// Indicator of `[a, b)` scaled by `height`.
    pub fn indicator(a: f64, b: f64, height: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![height])
    }

    /// Canonical form from breakpoints that are nondecreasing (ties allowed).
    pub(crate) fn canonical(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(breakpoints.len(), values.len() + 1);
        if values.is_empty() {
            return Self::zero();
        }
        let tol = breakpoint_tol(breakpoints[0], *breakpoints.last().unwrap());
        let mut bps: Vec<f64> = vec![breakpoints[0]];
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            let right = breakpoints[i + 1];
            if right - *bps.last().unwrap() <= tol {
                continue;
            }
            if vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = right;
            } else {
                vals.push(v);
                bps.push(right);
            }
        }
        // drop zero cells at both ends
        let first = vals.iter().position(|&v| v != 0.0);
        let Some(first) = first else {
            return Self::zero();
        };
        let last = vals.iter().rposition(|&v| v != 0.0).unwrap();
        Self {
            breakpoints: bps[first..=last + 1].to_vec(),
            values: vals[first..=last].to_vec(),
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of cells in canonical form.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Convex hull of the support, `None` for the zero function.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    pub fn support_width(&self) -> f64 {
        self.support().map_or(0.0, |(a, b)| b - a)
    }

    /// Right-continuous evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        match self.cell_of(x) {
            Some(i) => self.values[i],
            None => 0.0,
        }
    }

    fn cell_of(&self, x: f64) -> Option<usize> {
        let (a, b) = self.support()?;
        if x < a || x >= b {
            return None;
        }
        let j = self.breakpoints.partition_point(|&p| p <= x);
        Some(j - 1)
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.breakpoints[i], self.breakpoints[i + 1], v))
    }

    pub fn mass(&self) -> f64 {
        self.cells().map(|(a, b, v)| v * (b - a)).sum()
    }

    /// `∫|u|`.
    pub fn l1_norm(&self) -> f64 {
        self.cells().map(|(a, b, v)| v.abs() * (b - a)).sum()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, &v| m.min(v))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, &v| m.max(v))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Sum of all jumps, including the two jumps to zero at the ends.
    pub fn total_variation(&self) -> f64 {
        let mut tv = 0.0;
        let mut prev = 0.0;
        for &v in self.values.iter().chain(std::iter::once(&0.0)) {
            tv += (v - prev).abs();
            prev = v;
        }
        tv
    }

    /// One-sided Lipschitz constant: `+∞` if any jump goes up, else 0.
    pub fn lip_plus(&self) -> f64 {
        let mut prev = 0.0;
        for &v in self.values.iter().chain(std::iter::once(&0.0)) {
            if v > prev {
                return f64::INFINITY;
            }
            prev = v;
        }
        0.0
    }

    /// One-sided Lipschitz constant of `u` restricted to `[a, b]`: jumps at
    /// breakpoints strictly inside the window count, the window edges do not.
    pub fn lip_plus_on(&self, a: f64, b: f64) -> f64 {
        let mut prev: Option<f64> = None;
        let mut xs: Vec<f64> = self.breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
        xs.insert(0, a);
        for x in xs {
            let v = self.eval(x);
            if let Some(p) = prev {
                if v > p {
                    return f64::INFINITY;
                }
            }
            prev = Some(v);
        }
        0.0
    }

    /// `U(x) = ∫_{-∞}^x u`.
    pub fn primitive(&self) -> PiecewiseLinearFn {
        if self.is_zero() {
            return PiecewiseLinearFn::constant(0.0);
        }
        let mut nodes = Vec::with_capacity(self.breakpoints.len());
        let mut acc = 0.0;
        nodes.push(0.0);
        for (a, b, v) in self.cells() {
            acc += v * (b - a);
            nodes.push(acc);
        }
        PiecewiseLinearFn::from_parts(self.breakpoints.clone(), nodes, 0.0, 0.0)
    }

    /// Quantile function of a nonnegative density.
    pub fn quantile(&self) -> Result<QuantileFn> {
        if let Some(i) = self.values.iter().position(|&v| v < 0.0) {
            return Err(Error::NegativeDensity { at: self.breakpoints[i], value: self.values[i] });
        }
        QuantileFn::pseudo_inverse(&self.primitive())
    }

    /// Applies `op` cellwise on the merged breakpoint set.
    pub fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let (lo, hi) = match (self.support(), other.support()) {
            (None, None) => return Self::zero(),
            (Some(s), None) | (None, Some(s)) => s,
            (Some(a), Some(b)) => (a.0.min(b.0), a.1.max(b.1)),
        };
        let bps = merge_sorted(&self.breakpoints, &other.breakpoints, breakpoint_tol(lo, hi));
        let values = bps
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                op(self.eval(mid), other.eval(mid))
            })
            .collect();
        Self::canonical(bps, values)
    }

    pub fn sum(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self::canonical(self.breakpoints.clone(), self.values.iter().map(|v| v * alpha).collect())
    }

    pub fn shift(&self, h: f64) -> Self {
        Self::canonical(self.breakpoints.iter().map(|x| x + h).collect(), self.values.clone())
    }

    /// Restriction to `[a, b)`, zero elsewhere.
    pub fn restrict(&self, a: f64, b: f64) -> Self {
        if b <= a || self.is_zero() {
            return Self::zero();
        }
        let window = Self { breakpoints: vec![a, b], values: vec![1.0] };
        self.zip_with(&window, |u, w| if w != 0.0 { u } else { 0.0 })
    }

    /// Exact `∫|u - v|`.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.difference(other).l1_norm()
    }
}

impl Default for PiecewiseConstantFn {
    fn default() -> Self {
        Self::zero()
    }
}

impl TryFrom<FunctionRecord> for PiecewiseConstantFn {
    type Error = Error;

    fn try_from(record: FunctionRecord) -> Result<Self> {
        match record {
            FunctionRecord::Constant { breakpoints, values } => Self::new(breakpoints, values),
            FunctionRecord::Linear { .. } => {
                Err(Error::InvalidFunction("expected kind \"pc\", found \"pl\"".into()))
            }
        }
    }
}

impl From<PiecewiseConstantFn> for FunctionRecord {
    fn from(f: PiecewiseConstantFn) -> Self {
        FunctionRecord::Constant { breakpoints: f.breakpoints, values: f.values }
    }
}
