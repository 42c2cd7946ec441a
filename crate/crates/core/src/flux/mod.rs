//! Convex fluxes and their Legendre conjugates.
//!
//! Front tracking runs on a [`PlFlux`], the piecewise-linear interpolant of a
//! smooth flux on the lattice `δℤ`. Its conjugate is again piecewise linear
//! with kinks at the chord slopes, finite only on `[σ_min, σ_max]`.

mod conjugate;
mod pl;

pub use conjugate::ConjugatePair;
pub use pl::PlFlux;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Flux {
    /// `u² / 2`.
    Burgers,
    /// `|u|^n / n`, `n > 1`.
    Power { exponent: f64 },
    PiecewiseLinear(PlFlux),
}

/// JSON form: `{"type":"burgers"}`, `{"type":"power","exponent":4}` or
/// `{"type":"pl","nodes":[[u,f],...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FluxDescriptor {
    Burgers,
    Power { exponent: f64 },
    Pl { nodes: Vec<[f64; 2]> },
}

impl TryFrom<FluxDescriptor> for Flux {
    type Error = Error;

    fn try_from(d: FluxDescriptor) -> Result<Self> {
        match d {
            FluxDescriptor::Burgers => Ok(Flux::Burgers),
            FluxDescriptor::Power { exponent } => {
                if !(exponent > 1.0) || !exponent.is_finite() {
                    return Err(Error::InvalidExponent(exponent));
                }
                Ok(Flux::Power { exponent })
            }
            FluxDescriptor::Pl { nodes } => {
                let (u, f) = nodes.into_iter().map(|[u, f]| (u, f)).unzip();
                Ok(Flux::PiecewiseLinear(PlFlux::new(u, f)?))
            }
        }
    }
}

impl From<&Flux> for FluxDescriptor {
    fn from(f: &Flux) -> Self {
        match f {
            Flux::Burgers => FluxDescriptor::Burgers,
            Flux::Power { exponent } => FluxDescriptor::Power { exponent: *exponent },
            Flux::PiecewiseLinear(pl) => FluxDescriptor::Pl {
                nodes: pl.nodes().iter().zip(pl.values()).map(|(&u, &f)| [u, f]).collect(),
            },
        }
    }
}

impl Flux {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Flux::Burgers => 0.5 * u * u,
            Flux::Power { exponent } => u.abs().powf(*exponent) / exponent,
            Flux::PiecewiseLinear(pl) => pl.eval(u),
        }
    }

    /// `f'(u)`; the right derivative for piecewise-linear fluxes.
    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            Flux::Burgers => u,
            Flux::Power { exponent } => u.signum() * u.abs().powf(exponent - 1.0),
            Flux::PiecewiseLinear(pl) => pl.derivative(u),
        }
    }

    /// Solves `f'(u) = s` for smooth fluxes.
    pub fn derivative_inverse(&self, s: f64) -> Option<f64> {
        match self {
            Flux::Burgers => Some(s),
            Flux::Power { exponent } => Some(s.signum() * s.abs().powf(1.0 / (exponent - 1.0))),
            Flux::PiecewiseLinear(_) => None,
        }
    }

    /// `max |f''|` on `[-m, m]` for smooth fluxes.
    pub fn max_second_derivative(&self, m: f64) -> Option<f64> {
        match self {
            Flux::Burgers => Some(1.0),
            Flux::Power { exponent } if *exponent >= 2.0 => Some((exponent - 1.0) * m.abs().powf(exponent - 2.0)),
            Flux::Power { .. } => Some(f64::INFINITY),
            Flux::PiecewiseLinear(_) => None,
        }
    }

    /// `max |f'|` on `[lo, hi]` (convexity makes `f'` monotone).
    pub fn lipschitz_on(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Flux::PiecewiseLinear(pl) => pl.lipschitz_on(lo, hi),
            _ => self.derivative(lo).abs().max(self.derivative(hi).abs()),
        }
    }

    pub fn as_pl(&self) -> Option<&PlFlux> {
        match self {
            Flux::PiecewiseLinear(pl) => Some(pl),
            _ => None,
        }
    }

    pub fn has_min_at_zero(&self) -> bool {
        match self {
            Flux::PiecewiseLinear(pl) => pl.has_min_at_zero(),
            _ => true,
        }
    }

    pub fn conjugate(&self) -> Result<ConjugatePair> {
        ConjugatePair::of(self)
    }
}

/// Interpolant of `f` on the nodes `jδ`, `|j| ≤ ⌈M/δ⌉ + 1`.
pub fn interpolate_flux(f: &Flux, delta: f64, m: f64) -> Result<Flux> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::NonPositiveSpacing(delta));
    }
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::Config(format!("flux range M = {m} must be finite and nonnegative")));
    }
    let j = (m / delta).ceil() as i64 + 1;
    let nodes: Vec<f64> = (-j..=j).map(|i| i as f64 * delta).collect();
    let values = nodes.iter().map(|&u| f.eval(u)).collect();
    Ok(Flux::PiecewiseLinear(PlFlux::new(nodes, values)?))
}

pub fn legendre_transform(f: &Flux) -> Result<ConjugatePair> {
    ConjugatePair::of(f)
}

pub fn restricted_inverse(cp: &ConjugatePair, q: f64) -> Result<f64> {
    cp.restricted_inverse(q)
}

/// `sup_{0 < v ≤ M} (f'(v)v - f(v)) / v²`.
///
/// On a linear piece `f(v) = f_k + σ_k (v - u_k)` the quotient is
/// `(σ_k u_k - f_k) / v²`, largest at the left end of the piece.
pub fn oleinik_a_sup(f: &Flux, m: f64) -> f64 {
    match f {
        Flux::Burgers => 0.5,
        Flux::Power { exponent } => {
            let n = *exponent;
            if n < 2.0 {
                f64::INFINITY
            } else {
                (1.0 - 1.0 / n) * m.powf(n - 2.0)
            }
        }
        Flux::PiecewiseLinear(pl) => {
            let (u, fv, s) = (pl.nodes(), pl.values(), pl.slopes());
            let scale = fv.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            let mut sup = 0.0f64;
            for k in 0..s.len() {
                // the extension pieces are unbounded to the left / right
                let lo = if k == 0 { f64::NEG_INFINITY } else { u[k] };
                let hi = if k + 1 == s.len() { f64::INFINITY } else { u[k + 1] };
                if hi <= 0.0 || lo >= m {
                    continue;
                }
                let c = s[k] * u[k] - fv[k];
                if c.abs() <= 1e-13 * scale {
                    continue;
                }
                sup = sup.max(if lo <= 0.0 { f64::INFINITY } else { c / (lo * lo) });
            }
            sup
        }
    }
}

/// `sup_{[-M, M]} |f - g|`.
///
/// Exact when either flux is piecewise linear: the difference is then affine
/// between nodes or, against a smooth flux, extremal where the smooth slope
/// matches the chord. Two smooth fluxes are sampled.
pub fn flux_gap(f: &Flux, g: &Flux, m: f64) -> f64 {
    const SAMPLES: usize = 1 << 12;
    let mut pts: Vec<f64> = (0..=SAMPLES).map(|i| -m + 2.0 * m * i as f64 / SAMPLES as f64).collect();
    for (a, b) in [(f, g), (g, f)] {
        if let Some(pl) = a.as_pl() {
            pts.extend(pl.nodes().iter().copied());
            pts.extend(pl.nodes().windows(2).map(|w| 0.5 * (w[0] + w[1])));
            pts.extend(pl.slopes().iter().filter_map(|&s| b.derivative_inverse(s)));
        }
    }
    pts.into_iter()
        .filter(|u| u.abs() <= m)
        .map(|u| (f.eval(u) - g.eval(u)).abs())
        .fold(0.0, f64::max)
}
