use super::{Flux, PlFlux};
use crate::piecewise::PiecewiseLinearFn;
use crate::{Error, Result};

/// Legendre conjugate `f*(p) = sup_u {pu - f(u)}` together with the inverse
/// `f̃` of `f*` restricted to `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatePair {
    repr: Repr,
    min_at_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// `f*(p) = |p|^q / q` with `q = n / (n - 1)`, conjugate of `|u|^n / n`.
    Power { exponent: f64 },
    /// Breakpoints at the chord slopes; `+∞` outside `[σ_min, σ_max]`.
    Pl { conjugate: PiecewiseLinearFn },
}

impl ConjugatePair {
    pub fn of(flux: &Flux) -> Result<Self> {
        match flux {
            Flux::Burgers => Ok(Self { repr: Repr::Power { exponent: 2.0 }, min_at_zero: true }),
            Flux::Power { exponent } => {
                if !(*exponent > 1.0) {
                    return Err(Error::InvalidExponent(*exponent));
                }
                Ok(Self { repr: Repr::Power { exponent: *exponent }, min_at_zero: true })
            }
            Flux::PiecewiseLinear(pl) => Ok(Self::of_pl(pl)),
        }
    }

    fn of_pl(pl: &PlFlux) -> Self {
        // at p = σ_k both neighbouring kinks attain the sup; use the right one
        let (u, f, s) = pl.reduced();
        let values = s.iter().enumerate().map(|(k, &p)| u[k + 1] * p - f[k + 1]).collect();
        let conjugate = PiecewiseLinearFn::from_parts(s, values, 0.0, 0.0);
        Self { repr: Repr::Pl { conjugate }, min_at_zero: pl.has_min_at_zero() }
    }

    /// `f*(p)`, possibly `+∞`.
    pub fn eval(&self, p: f64) -> f64 {
        match &self.repr {
            Repr::Power { exponent } => {
                let q = exponent / (exponent - 1.0);
                p.abs().powf(q) / q
            }
            Repr::Pl { conjugate } => {
                let (lo, hi) = self.slope_domain();
                let tol = 1e-14 * (1.0 + lo.abs().max(hi.abs()));
                if p < lo - tol || p > hi + tol {
                    f64::INFINITY
                } else {
                    conjugate.eval(p.clamp(lo, hi))
                }
            }
        }
    }

    /// Closed interval where `f*` is finite.
    pub fn slope_domain(&self) -> (f64, f64) {
        match &self.repr {
            Repr::Power { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Repr::Pl { conjugate } => (conjugate.first_node().0, conjugate.last_node().0),
        }
    }

    /// Kinks of `f*` (the chord slopes of a piecewise-linear flux).
    pub fn breakpoints(&self) -> &[f64] {
        match &self.repr {
            Repr::Power { .. } => &[],
            Repr::Pl { conjugate } => conjugate.breakpoints(),
        }
    }

    /// Piecewise-linear representation, if the conjugate has one.
    pub fn as_pl(&self) -> Option<&PiecewiseLinearFn> {
        match &self.repr {
            Repr::Pl { conjugate } => Some(conjugate),
            Repr::Power { .. } => None,
        }
    }

    pub fn min_at_zero(&self) -> bool {
        self.min_at_zero
    }

    /// `f̃(q) = sup{p ≥ 0 : f*(p) ≤ q}`, clamped to `σ_max`.
    pub fn restricted_inverse(&self, q: f64) -> Result<f64> {
        if !(q >= 0.0) {
            return Err(Error::NegativeArgument(q));
        }
        if !self.min_at_zero {
            return Err(Error::Unsupported("restricted inverse needs a flux with minimum f(0) = 0"));
        }
        Ok(match &self.repr {
            Repr::Power { exponent } => {
                let r = exponent / (exponent - 1.0);
                (r * q).powf(1.0 / r)
            }
            Repr::Pl { conjugate } => {
                let bps = conjugate.breakpoints();
                let vals = conjugate.values();
                let n = bps.len();
                if q >= vals[n - 1] {
                    return Ok(bps[n - 1]);
                }
                // first breakpoint with p ≥ 0 and f* > q; f* is nondecreasing on p ≥ 0
                let start = bps.partition_point(|&p| p < 0.0);
                let j = start + vals[start..].partition_point(|&v| v <= q);
                if j == start {
                    // q < f*(first nonnegative kink): on [0, σ_start] f* is affine
                    // through f*(0) = 0
                    let (p1, v1) = (bps[j], vals[j]);
                    let p0 = if j > 0 { 0.0f64.max(bps[j - 1]) } else { 0.0 };
                    let v0 = conjugate.eval(p0);
                    return Ok(p0 + (q - v0) * (p1 - p0) / (v1 - v0));
                }
                let (p0, v0, p1, v1) = (bps[j - 1], vals[j - 1], bps[j], vals[j]);
                p0 + (q - v0) * (p1 - p0) / (v1 - v0)
            }
        })
    }

    /// Level above which `f̃` stays at `σ_max` (`∞` for a smooth flux). Below
    /// it `f̃` is a true inverse of `f*`.
    pub fn inverse_saturation(&self) -> f64 {
        match &self.repr {
            Repr::Power { .. } => f64::INFINITY,
            Repr::Pl { conjugate } => conjugate.last_node().1,
        }
    }

    /// Values `q` where `f̃` has a kink or a jump (finite set, ascending).
    pub fn inverse_breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Power { .. } => vec![0.0],
            Repr::Pl { conjugate } => {
                let mut out: Vec<f64> = conjugate
                    .breakpoints()
                    .iter()
                    .zip(conjugate.values())
                    .filter(|(&p, _)| p >= 0.0)
                    .map(|(_, &v)| v.max(0.0))
                    .collect();
                out.insert(0, 0.0);
                out.dedup();
                out
            }
        }
    }
}
