use super::PiecewiseLinearFn;
use crate::{Error, Result};

/// Affine piece of a quantile function on `[xi_start, xi_end]`, open at the
/// right end when a jump follows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileSegment {
    pub xi_start: f64,
    pub xi_end: f64,
    pub x_start: f64,
    pub x_end: f64,
}

/// Discontinuity at `xi`: the left limit is `below`, the value is `above`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileJump {
    pub xi: f64,
    pub below: f64,
    pub above: f64,
}

/// `ξ ↦ inf{x : U(x) > ξ}` on `[0, m]` for a nondecreasing broken line `U`.
///
/// Stored as knots `ξ_0 = 0 < … < ξ_n = m` carrying the left limit and the
/// value at each knot; between knots the function is affine. At `ξ = m` the
/// value is taken equal to the left limit.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFn {
    xi: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl QuantileFn {
    pub fn pseudo_inverse(cdf: &PiecewiseLinearFn) -> Result<Self> {
        let (x0, u0) = cdf.first_node();
        if cdf.left_slope() != 0.0 || u0 != 0.0 {
            return Err(Error::InvalidFunction(format!(
                "distribution function must vanish on the left (U({x0}) = {u0}, slope {})",
                cdf.left_slope()
            )));
        }
        if cdf.right_slope() != 0.0 {
            return Err(Error::InvalidFunction("distribution function must be bounded".into()));
        }
        let mut xi = Vec::new();
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (xa, xb, ua, ub) in cdf.segments() {
            if ub < ua {
                return Err(Error::NotMonotone { at: xa, slope: (ub - ua) / (xb - xa) });
            }
            if ub > ua {
                if xi.is_empty() {
                    xi.push(ua);
                    left.push(xa);
                    right.push(xa);
                }
                xi.push(ub);
                left.push(xb);
                right.push(xb);
            } else if let Some(r) = right.last_mut() {
                // flat piece inside the support: the quantile jumps over it
                *r = xb;
            }
        }
        if xi.is_empty() {
            return Ok(Self { xi: vec![0.0], left: vec![x0], right: vec![x0] });
        }
        // a flat tail at total mass is not a jump
        let n = xi.len() - 1;
        right[n] = left[n];
        Ok(Self { xi, left, right })
    }

    pub fn mass(&self) -> f64 {
        *self.xi.last().unwrap()
    }

    /// Knots as `(ξ, left limit, value)`.
    pub fn knots(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.xi
            .iter()
            .zip(self.left.iter().zip(self.right.iter()))
            .map(|(&xi, (&l, &r))| (xi, l, r))
    }

    pub fn knot_positions(&self) -> &[f64] {
        &self.xi
    }

    pub fn segments(&self) -> impl Iterator<Item = QuantileSegment> + '_ {
        (1..self.xi.len()).map(move |i| QuantileSegment {
            xi_start: self.xi[i - 1],
            xi_end: self.xi[i],
            x_start: self.right[i - 1],
            x_end: self.left[i],
        })
    }

    pub fn jumps(&self) -> impl Iterator<Item = QuantileJump> + '_ {
        self.knots()
            .filter(|&(_, l, r)| l != r)
            .map(|(xi, below, above)| QuantileJump { xi, below, above })
    }

    /// Right-continuous value; clamps `ξ` to `[0, m]`.
    pub fn eval(&self, xi: f64) -> f64 {
        let n = self.xi.len() - 1;
        if xi >= self.xi[n] {
            return self.left[n];
        }
        if xi <= 0.0 {
            return self.right[0];
        }
        let i = self.xi.partition_point(|&k| k <= xi);
        self.interp(i, xi)
    }

    /// Left limit; clamps `ξ` to `[0, m]`.
    pub fn eval_left(&self, xi: f64) -> f64 {
        let n = self.xi.len() - 1;
        if xi >= self.xi[n] {
            return self.left[n];
        }
        if xi <= 0.0 {
            return self.right[0];
        }
        let i = self.xi.partition_point(|&k| k < xi);
        if self.xi[i] == xi {
            return self.left[i];
        }
        self.interp(i, xi)
    }

    fn interp(&self, i: usize, xi: f64) -> f64 {
        let (a, b) = (self.xi[i - 1], self.xi[i]);
        let (qa, qb) = (self.right[i - 1], self.left[i]);
        qa + (qb - qa) * ((xi - a) / (b - a))
    }

    /// Support `[Q(0), Q(m)]` of the underlying density.
    pub fn range(&self) -> (f64, f64) {
        (self.right[0], *self.left.last().unwrap())
    }
}
