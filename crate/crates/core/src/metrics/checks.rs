use serde::{Deserialize, Serialize};

use super::profile::abs_sup;
use super::{w1_between, winf, winf_between};
use crate::flux::ConjugatePair;
use crate::solver::{Evolution, FrontTrackingRun};
use crate::{Error, Result};

/// Constants of the `W1` stability estimate
///
/// ```text
/// W1(u(t), v(t)) ≤ C(t) [ W1(u0, v0) + t K(t) sup|f - g| ],   C(t) = exp(‖f'‖_Lip C t)
/// ```
///
/// with `C` the one-sided Lipschitz bound of the data and
/// `K(t) = |supp u0| + 2Δx + Lip(f) t` a bound on the support width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConstants {
    /// `‖f'‖_Lip = max f''`.
    pub f_prime_lip: f64,
    /// `Lip⁺` of the initial data.
    pub lip_plus: f64,
    pub support_width: f64,
    pub dx: f64,
    /// Lipschitz constant of the flux on the range of the data.
    pub flux_lip: f64,
    /// `sup |f - g|` on the range of the data.
    pub flux_gap: f64,
}

impl StabilityConstants {
    pub fn growth(&self, t: f64) -> f64 {
        (self.f_prime_lip * self.lip_plus * t).exp()
    }

    pub fn support_bound(&self, t: f64) -> f64 {
        self.support_width + 2.0 * self.dx + self.flux_lip * t
    }

    pub fn bound(&self, w1_initial: f64, t: f64) -> f64 {
        if self.flux_gap == 0.0 {
            return self.growth(t) * w1_initial;
        }
        self.growth(t) * (w1_initial + t * self.support_bound(t) * self.flux_gap)
    }
}

/// `(W1(u(t), v(t)), C(t)[W1(u0, v0) + t K(t) sup|f - g|])`.
pub fn stability_bound_check(
    u: &dyn Evolution,
    v: &dyn Evolution,
    t: f64,
    consts: &StabilityConstants,
) -> Result<(f64, f64)> {
    let initial = w1_between(&*u.profile_at(0.0)?, &*v.profile_at(0.0)?)?;
    let lhs = w1_between(&*u.profile_at(t)?, &*v.profile_at(t)?)?;
    Ok((lhs, consts.bound(initial, t)))
}

/// `(W∞(u(t), v(t)), W∞(u0, v0))` for two runs under the same flux.
pub fn winf_contraction_check(u: &FrontTrackingRun, v: &FrontTrackingRun, t: f64) -> Result<(f64, f64)> {
    if u.flux() != v.flux() {
        return Err(Error::FluxMismatch);
    }
    let rhs = winf(u.initial(), v.initial())?;
    let lhs = winf(&u.snapshot(t)?, &v.snapshot(t)?)?;
    Ok((lhs, rhs))
}

const FLUX_SAMPLES: usize = 1 << 12;

/// `(W∞(u(t), v(t)), t sup_{0 ≤ γ ≤ m} |f̃ - g̃|(γ/t))` for the same data
/// evolved under two fluxes.
///
/// A piecewise-linear flux is only interpolated on a bounded range, so its
/// `f̃` saturates at `σ_max`. The supremum is taken over levels
/// `q ≤ f*(σ_max)` where both inverses are genuine, which covers every speed a
/// state in the interpolated range can produce. The levels are sampled at
/// `2^12` points together with all kinks of both inverses and refined between
/// them.
pub fn winf_flux_stability_check(
    u: &dyn Evolution,
    v: &dyn Evolution,
    f: &ConjugatePair,
    g: &ConjugatePair,
    t: f64,
) -> Result<(f64, f64)> {
    if t < 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let (u0, v0) = (u.profile_at(0.0)?, v.profile_at(0.0)?);
    let m = u0.mass();
    let gap0 = winf_between(&*u0, &*v0).map_err(|_| Error::InitialDataMismatch)?;
    let scale = u0.support().map_or(1.0, |(a, b)| 1.0 + a.abs().max(b.abs()));
    if gap0 > 1e-12 * scale {
        return Err(Error::InitialDataMismatch);
    }
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let lhs = winf_between(&*u.profile_at(t)?, &*v.profile_at(t)?)?;
    let q_max = (m / t).min(f.inverse_saturation()).min(g.inverse_saturation());
    let mut knots: Vec<f64> = (0..=FLUX_SAMPLES).map(|i| q_max * i as f64 / FLUX_SAMPLES as f64).collect();
    knots.extend(f.inverse_breakpoints().into_iter().chain(g.inverse_breakpoints()).filter(|&q| q < q_max));
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let diff = |q: f64| {
        let q = q.clamp(0.0, q_max);
        f.restricted_inverse(q).unwrap_or(f64::NAN) - g.restricted_inverse(q).unwrap_or(f64::NAN)
    };
    let sup = abs_sup(diff, diff, &knots);
    if sup.is_nan() {
        return Err(Error::Unsupported("flux stability needs fluxes with minimum f(0) = 0"));
    }
    Ok((lhs, t * sup))
}
