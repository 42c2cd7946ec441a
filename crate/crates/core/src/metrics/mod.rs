//! One-dimensional transport distances.
//!
//! For densities `u, v` of equal mass `m`,
//!
//! ```text
//! W1 = ∫ |U - V| dx,   Wp = ‖Q_u - Q_v‖_{Lp[0, m]},   W∞ = sup |Q_u - Q_v|
//! ```
//!
//! with `U, V` the primitives and `Q` the right-continuous quantiles. Between
//! step functions all three are computed exactly: `U - V` is piecewise linear
//! and `Q_u - Q_v` is piecewise affine with jumps. The quantile domain is
//! `[0, m]` without normalisation, so `Wp` scales like `m^{1/p}`.

mod checks;
mod profile;

pub use checks::{
    stability_bound_check, winf_contraction_check, winf_flux_stability_check, StabilityConstants,
};
pub use profile::{l1_between, w1_between, winf_between, wp_between, Profile, StepProfile};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::piecewise::{merge_sorted, PiecewiseConstantFn, QuantileFn};
use crate::{Error, Result};

/// Relative tolerance on equal masses.
pub const MASS_RTOL: f64 = 1e-10;

/// Quantile knots closer than this (relative to the mass) are merged.
const MERGE_RTOL: f64 = 1e-13;

pub(crate) fn check_masses(mu: f64, mv: f64, scale: f64) -> Result<()> {
    if (mu - mv).abs() > MASS_RTOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::MassMismatch { left: mu, right: mv });
    }
    Ok(())
}

fn check_pair(u: &PiecewiseConstantFn, v: &PiecewiseConstantFn) -> Result<()> {
    check_masses(u.mass(), v.mass(), u.l1_norm().max(v.l1_norm()))
}

/// `∫_0^len |g|^p` for `g` affine from `ga` to `gb`.
pub(crate) fn integral_abs_pow(len: f64, ga: f64, gb: f64, p: f64) -> f64 {
    if len <= 0.0 {
        return 0.0;
    }
    let (a, b) = (ga.abs(), gb.abs());
    if ga * gb < 0.0 {
        // the two sub-pieces each vanish at one end
        return len * (a.powf(p + 1.0) + b.powf(p + 1.0)) / ((a + b) * (p + 1.0));
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if hi == 0.0 {
        return 0.0;
    }
    let d = (hi - lo) / hi;
    // (1 - (1 - d)^{p+1}) / d, stable as d -> 0
    let ratio = if d == 0.0 { p + 1.0 } else { -((p + 1.0) * (-d).ln_1p()).exp_m1() / d };
    len * hi.powf(p) * ratio / (p + 1.0)
}

/// Exact `∫|U - V|`; needs equal masses but not nonnegativity.
pub fn w1(u: &PiecewiseConstantFn, v: &PiecewiseConstantFn) -> Result<f64> {
    check_pair(u, v)?;
    Ok(u.primitive().difference(&v.primitive()).integral_abs_interior())
}

fn validate_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

fn quantiles(u: &PiecewiseConstantFn, v: &PiecewiseConstantFn) -> Result<(QuantileFn, QuantileFn)> {
    check_pair(u, v)?;
    Ok((u.quantile()?, v.quantile()?))
}

/// `ξ` moved onto a knot of `q` lying within `tol`, if there is one.
fn own_knot(q: &QuantileFn, xi: f64, tol: f64) -> f64 {
    let ks = q.knot_positions();
    let i = ks.partition_point(|&k| k < xi);
    [i.checked_sub(1), Some(i)]
        .into_iter()
        .flatten()
        .filter_map(|j| ks.get(j).copied())
        .filter(|k| (k - xi).abs() <= tol)
        .min_by(|p, q| (p - xi).abs().total_cmp(&(q - xi).abs()))
        .unwrap_or(xi)
}

/// `(length, g(a+), g(b-))` for `g = Q_u - Q_v` on every merged piece.
///
/// Knots of the two functions that agree up to rounding are merged, so each
/// one-sided limit is taken at the function's own knot; otherwise a jump a
/// few ulps away would be read on the wrong side.
fn merged_pieces(qu: &QuantileFn, qv: &QuantileFn) -> Vec<(f64, f64, f64)> {
    let tol = MERGE_RTOL * qu.mass().max(qv.mass());
    let levels = merge_sorted(qu.knot_positions(), qv.knot_positions(), tol);
    levels
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let ga = qu.eval(own_knot(qu, a, tol)) - qv.eval(own_knot(qv, a, tol));
            let gb = qu.eval_left(own_knot(qu, b, tol)) - qv.eval_left(own_knot(qv, b, tol));
            (b - a, ga, gb)
        })
        .collect()
}

/// `‖Q_u - Q_v‖_{Lp}`, `1 ≤ p < ∞`, between exact quantile functions.
pub fn quantile_lp(qu: &QuantileFn, qv: &QuantileFn, p: f64) -> f64 {
    let total: f64 = merged_pieces(qu, qv).into_iter().map(|(len, ga, gb)| integral_abs_pow(len, ga, gb, p)).sum();
    total.powf(1.0 / p)
}

/// Essential `sup |Q_u - Q_v|`: both one-sided limits at every knot.
pub fn quantile_sup(qu: &QuantileFn, qv: &QuantileFn) -> f64 {
    merged_pieces(qu, qv).into_iter().map(|(_, ga, gb)| ga.abs().max(gb.abs())).fold(0.0, f64::max)
}

/// Exact `Wp`; `p = f64::INFINITY` gives `W∞`.
pub fn wp(u: &PiecewiseConstantFn, v: &PiecewiseConstantFn, p: f64) -> Result<f64> {
    validate_p(p)?;
    let (qu, qv) = quantiles(u, v)?;
    Ok(if p.is_infinite() { quantile_sup(&qu, &qv) } else { quantile_lp(&qu, &qv, p) })
}

pub fn winf(u: &PiecewiseConstantFn, v: &PiecewiseConstantFn) -> Result<f64> {
    let (qu, qv) = quantiles(u, v)?;
    Ok(quantile_sup(&qu, &qv))
}

pub fn l1(u: &PiecewiseConstantFn, v: &PiecewiseConstantFn) -> f64 {
    u.l1_distance(v)
}

/// `(Wp, W1^{1/p} W∞^{1 - 1/p})`; Hölder gives `first ≤ second`.
pub fn interpolation_check(u: &PiecewiseConstantFn, v: &PiecewiseConstantFn, p: f64) -> Result<(f64, f64)> {
    validate_p(p)?;
    let (qu, qv) = quantiles(u, v)?;
    let sup = quantile_sup(&qu, &qv);
    if p.is_infinite() {
        return Ok((sup, sup));
    }
    let w1 = quantile_lp(&qu, &qv, 1.0);
    Ok((quantile_lp(&qu, &qv, p), w1.powf(1.0 / p) * sup.powf(1.0 - 1.0 / p)))
}

/// `sup_x |U(x) - V(x)|`.
pub fn primitive_sup(u: &PiecewiseConstantFn, v: &PiecewiseConstantFn) -> Result<f64> {
    check_pair(u, v)?;
    Ok(primitive_sup_unchecked(u, v))
}

/// [`primitive_sup`] without the mass check.
pub fn primitive_sup_unchecked(u: &PiecewiseConstantFn, v: &PiecewiseConstantFn) -> f64 {
    u.primitive().difference(&v.primitive()).values().iter().fold(0.0, |m, d| m.max(d.abs()))
}

/// Every distance between two step functions that their data admits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub l1: f64,
    pub w1: Option<f64>,
    pub wp: BTreeMap<String, f64>,
    pub winf: Option<f64>,
    pub primitive_sup: Option<f64>,
    pub masses_equal: bool,
    pub nonnegative: bool,
}

/// Label used for `p` in reports and table headers.
pub fn p_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

impl DistanceReport {
    /// `ps` may contain `1` and `f64::INFINITY`; they fill `w1` / `winf` and
    /// are also listed under `wp`.
    pub fn compute(u: &PiecewiseConstantFn, v: &PiecewiseConstantFn, ps: &[f64]) -> Result<Self> {
        for &p in ps {
            validate_p(p)?;
        }
        let masses_equal = check_pair(u, v).is_ok();
        let nonnegative = u.is_nonnegative() && v.is_nonnegative();
        let mut report = Self {
            l1: l1(u, v),
            w1: None,
            wp: BTreeMap::new(),
            winf: None,
            primitive_sup: None,
            masses_equal,
            nonnegative,
        };
        if !masses_equal {
            return Ok(report);
        }
        report.w1 = Some(w1(u, v)?);
        report.primitive_sup = Some(primitive_sup_unchecked(u, v));
        if nonnegative {
            let (qu, qv) = (u.quantile()?, v.quantile()?);
            report.winf = Some(quantile_sup(&qu, &qv));
            for &p in ps {
                let value = if p.is_infinite() { quantile_sup(&qu, &qv) } else { quantile_lp(&qu, &qv, p) };
                report.wp.insert(p_label(p), value);
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pc(bps: &[f64], vals: &[f64]) -> PiecewiseConstantFn {
        PiecewiseConstantFn::new(bps.to_vec(), vals.to_vec()).unwrap()
    }

    /// `∫|a + bs|^p` by composite Simpson on many panels.
    fn simpson_abs_pow(len: f64, ga: f64, gb: f64, p: f64) -> f64 {
        let n = 20_000;
        let h = len / n as f64;
        let g = |s: f64| (ga + (gb - ga) * s / len).abs().powf(p);
        let mut acc = g(0.0) + g(len);
        for i in 1..n {
            acc += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn closed_form_power_integral() {
        for &(ga, gb) in &[(1.0, 2.0), (2.0, 1.0), (-1.0, 3.0), (0.5, 0.5), (0.0, -2.0), (1.0, 1.0 + 1e-12)] {
            for p in [1.0, 1.5, 2.0, 4.0, 7.3] {
                let exact = integral_abs_pow(0.7, ga, gb, p);
                assert_relative_eq!(exact, simpson_abs_pow(0.7, ga, gb, p), max_relative = 1e-9);
            }
        }
        assert_eq!(integral_abs_pow(1.0, 0.0, 0.0, 2.0), 0.0);
    }

    #[test]
    fn shifted_boxes() {
        let h = 0.3;
        let u = PiecewiseConstantFn::indicator(0.0, 1.0, 1.0).unwrap();
        let v = u.shift(h);
        assert_relative_eq!(w1(&u, &v).unwrap(), h, epsilon = 1e-15);
        for p in [1.0, 2.0, 3.5] {
            assert_relative_eq!(wp(&u, &v, p).unwrap(), h, epsilon = 1e-15);
        }
        assert_relative_eq!(winf(&u, &v).unwrap(), h, epsilon = 1e-15);
        let (a, b) = interpolation_check(&u, &v, 2.0).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-15);
        assert_eq!(w1(&u, &u).unwrap(), 0.0);
        assert_eq!(winf(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        let u = PiecewiseConstantFn::indicator(0.0, 1.0, 1.0).unwrap();
        let v = PiecewiseConstantFn::indicator(0.0, 1.0, 2.0).unwrap();
        assert!(matches!(w1(&u, &v), Err(Error::MassMismatch { .. })));
        assert!(matches!(wp(&u, &u, 0.5), Err(Error::InvalidExponent(_))));
        let signed = pc(&[0.0, 1.0, 2.0], &[1.0, -1.0]);
        let zero = PiecewiseConstantFn::zero();
        // signed data of zero mass: W1 through the primitive only
        assert_relative_eq!(w1(&signed, &zero).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(winf(&signed, &zero), Err(Error::NegativeDensity { .. })));
    }

    #[test]
    fn gap_in_support() {
        // mass 2 on [0,1) ∪ [2,3) against 1 on [0,2): quantiles ξ vs ξ/... hand values
        let u = pc(&[0.0, 1.0, 2.0, 3.0], &[1.0, 0.0, 1.0]);
        let v = PiecewiseConstantFn::indicator(0.0, 2.0, 1.0).unwrap();
        // Q_u = ξ on [0,1), 1 + ξ on [1,2]; Q_v = ξ: difference 0 then 1
        assert_relative_eq!(wp(&u, &v, 2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(winf(&u, &v).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(w1(&u, &v).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn report_shape() {
        let u = PiecewiseConstantFn::indicator(0.0, 1.0, 1.0).unwrap();
        let v = u.shift(0.25);
        let r = DistanceReport::compute(&u, &v, &[1.0, 2.0, f64::INFINITY]).unwrap();
        assert_eq!(r.wp.keys().cloned().collect::<Vec<_>>(), vec!["1", "2", "inf"]);
        assert_relative_eq!(r.wp["2"], 0.25, epsilon = 1e-15);
        assert_eq!(r.winf, Some(0.25));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<DistanceReport>(&json).unwrap(), r);
        let heavy = PiecewiseConstantFn::indicator(0.0, 1.0, 3.0).unwrap();
        let r = DistanceReport::compute(&u, &heavy, &[2.0]).unwrap();
        assert!(!r.masses_equal && r.w1.is_none());
    }

    /// Positive data of unit mass with connected support.
    pub(crate) fn random_density(rng: &mut ChaCha8Rng) -> PiecewiseConstantFn {
        let n = rng.gen_range(1..12);
        let mut bps = vec![rng.gen_range(-1.0..1.0)];
        for _ in 0..n {
            bps.push(bps.last().unwrap() + rng.gen_range(0.05..0.6));
        }
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let u = pc(&bps, &vals);
        u.scale(1.0 / u.mass())
    }

    /// Quantile by bisection on the primitive: independent of `QuantileFn`.
    fn bisect_quantile(u: &PiecewiseConstantFn, xi: f64) -> f64 {
        let cdf = u.primitive();
        let (mut lo, mut hi) = u.support().unwrap();
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if cdf.eval(mid) > xi {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn matches_riemann_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1 << 16;
        for _ in 0..10 {
            let (u, v) = (random_density(&mut rng), random_density(&mut rng));
            let diffs: Vec<f64> = (0..n)
                .map(|i| (i as f64 + 0.5) / n as f64)
                .map(|xi| bisect_quantile(&u, xi) - bisect_quantile(&v, xi))
                .collect();
            for p in [1.0, 2.0, 4.0] {
                let riemann = (diffs.iter().map(|d| d.abs().powf(p)).sum::<f64>() / n as f64).powf(1.0 / p);
                assert!((wp(&u, &v, p).unwrap() - riemann).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn metric_axioms_and_p_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let (u, v, w) = (random_density(&mut rng), random_density(&mut rng), random_density(&mut rng));
            for p in [1.0, 2.0, 3.0, f64::INFINITY] {
                let d = |a: &PiecewiseConstantFn, b: &PiecewiseConstantFn| wp(a, b, p).unwrap();
                assert_eq!(d(&u, &v), d(&v, &u));
                assert_eq!(d(&u, &u), 0.0);
                assert!(d(&u, &w) <= d(&u, &v) + d(&v, &w) + 1e-10);
            }
            let seq: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0].iter().map(|&p| wp(&u, &v, p).unwrap()).collect();
            assert!(seq.windows(2).all(|s| s[0] <= s[1] * (1.0 + 1e-12)));
            assert!(*seq.last().unwrap() <= winf(&u, &v).unwrap() * (1.0 + 1e-12));
            assert_relative_eq!(w1(&u, &v).unwrap(), seq[0], max_relative = 1e-10);
        }
    }

    #[test]
    fn scaling_convention() {
        // the quantile domain is [0, m]: Wp scales like m^{1/p}, W1 like m, W∞ not at all
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (u, v) = (random_density(&mut rng), random_density(&mut rng));
        let alpha = 3.0;
        let (su, sv) = (u.scale(alpha), v.scale(alpha));
        assert_relative_eq!(w1(&su, &sv).unwrap(), alpha * w1(&u, &v).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(wp(&su, &sv, 2.0).unwrap(), alpha.sqrt() * wp(&u, &v, 2.0).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(winf(&su, &sv).unwrap(), winf(&u, &v).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn knots_equal_up_to_rounding_do_not_leak_jumps() {
        // a gap makes the quantile jump; the shift perturbs the cumulative masses
        let u = pc(&[0.1, 0.4, 0.7, 1.3], &[1.7, 0.0, 0.3]);
        let u = u.scale(1.0 / u.mass());
        for h in [0.3, -0.77, 1e-3, 0.123456789] {
            let v = u.shift(h);
            assert!((winf(&u, &v).unwrap() - h.abs()).abs() < 1e-12);
            assert!((wp(&u, &v, 3.0).unwrap() - h.abs()).abs() < 1e-12);
        }
    }
}
