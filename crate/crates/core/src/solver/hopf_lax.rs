use crate::flux::{ConjugatePair, Flux};
use crate::piecewise::{PiecewiseLinearFn, QuantileFn};
use crate::{Error, Result};

/// `U(x, t) = min_y { t f*((x - y)/t) + U₀(y) }`.
///
/// Exact for piecewise-linear `U₀`: with a piecewise-linear conjugate the
/// objective is piecewise linear in `y`, so the minimum sits at a breakpoint of
/// `U₀`, a kink `y = x - σ_j t` or an end of the cone `x - [σ_min, σ_max] t`.
/// With a smooth conjugate the objective is convex on every piece of `U₀`,
/// minimised at `y = x - t f'(b)` for the piece slope `b`.
pub fn hopf_lax_primitive(u0: &PiecewiseLinearFn, flux: &Flux, cp: &ConjugatePair, x: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    if t == 0.0 {
        return Ok(u0.eval(x));
    }
    let objective = |y: f64, p: f64| t * cp.eval(p) + u0.eval(y);
    let mut best = f64::INFINITY;
    if cp.as_pl().is_some() {
        let (smin, smax) = cp.slope_domain();
        let (ylo, yhi) = (x - smax * t, x - smin * t);
        for &s in cp.breakpoints() {
            best = best.min(objective(x - s * t, s));
        }
        let bps = u0.breakpoints();
        let start = bps.partition_point(|&y| y < ylo);
        for &y in bps[start..].iter().take_while(|&&y| y <= yhi) {
            best = best.min(objective(y, ((x - y) / t).clamp(smin, smax)));
        }
        return Ok(best);
    }
    let stationary = |b: f64, lo: f64, hi: f64| (x - t * flux.derivative(b)).clamp(lo, hi);
    let bps = u0.breakpoints();
    let mut consider = |y: f64| best = best.min(objective(y, (x - y) / t));
    consider(stationary(u0.left_slope(), f64::NEG_INFINITY, bps[0]));
    consider(stationary(u0.right_slope(), bps[bps.len() - 1], f64::INFINITY));
    for (a, b, fa, fb) in u0.segments() {
        consider(a);
        consider(stationary((fb - fa) / (b - a), a, b));
    }
    consider(bps[bps.len() - 1]);
    Ok(best)
}

/// `U⁻¹(γ, t) = max_{0 ≤ ω ≤ γ} { t f̃((γ - ω)/t) + Q₀(ω) }` for nonnegative
/// data, `f̃` the inverse of `f*` on `[0, ∞)`.
///
/// With a piecewise-linear conjugate both terms are piecewise linear in `ω`,
/// so the maximum is at a knot of `Q₀`, at `ω = γ - t f*(σ_j)` or at an end.
/// With a smooth conjugate the objective is concave on every segment of `Q₀`
/// of slope `c`, maximised at `ω = γ - t f*(f'(1/c))`.
pub fn inverse_primitive_formula(q0: &QuantileFn, flux: &Flux, cp: &ConjugatePair, gamma: f64, t: f64) -> Result<f64> {
    let m = q0.mass();
    let tol = 1e-13 * m.max(1.0);
    if !(gamma >= -tol && gamma <= m + tol) {
        return Err(Error::LevelOutOfRange { gamma, mass: m });
    }
    let gamma = gamma.clamp(0.0, m);
    if t < 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    if t == 0.0 {
        return Ok(q0.eval(gamma));
    }
    let ftilde = |q: f64| cp.restricted_inverse(q.max(0.0));
    let objective = |w: f64| -> Result<f64> { Ok(t * ftilde((gamma - w) / t)? + q0.eval(w)) };
    let mut best = objective(0.0)?.max(objective(gamma)?);
    for (xi, _, _) in q0.knots() {
        if xi > 0.0 && xi < gamma {
            best = best.max(objective(xi)?);
        }
    }
    if cp.as_pl().is_some() {
        for c in cp.inverse_breakpoints() {
            let w = gamma - t * c;
            if w > 0.0 && w < gamma {
                best = best.max(objective(w)?);
            }
        }
        return Ok(best);
    }
    for seg in q0.segments() {
        if seg.xi_start >= gamma {
            break;
        }
        let (lo, hi) = (seg.xi_start, seg.xi_end.min(gamma));
        let c = (seg.x_end - seg.x_start) / (seg.xi_end - seg.xi_start);
        if c > 0.0 {
            let w = (gamma - t * cp.eval(flux.derivative(1.0 / c))).clamp(lo, hi);
            best = best.max(objective(w)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::interpolate_flux;
    use crate::piecewise::PiecewiseConstantFn;

    #[test]
    fn zero_data_stays_zero() {
        let u0 = PiecewiseLinearFn::constant(0.0);
        let g = interpolate_flux(&Flux::Burgers, 0.25, 1.0).unwrap();
        for f in [Flux::Burgers, g] {
            let cp = f.conjugate().unwrap();
            for x in [-1.0, 0.0, 3.0] {
                assert_eq!(hopf_lax_primitive(&u0, &f, &cp, x, 0.7).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn translation_equivariance() {
        let u = PiecewiseConstantFn::from_cells(0.0, 0.25, vec![0.5, 1.0, 0.25]).unwrap();
        let h = 0.375;
        let g = interpolate_flux(&Flux::Burgers, 0.25, 1.0).unwrap();
        let cp = g.conjugate().unwrap();
        let (a, b) = (u.primitive(), u.shift(h).primitive());
        for i in 0..40 {
            let x = -0.5 + 0.07 * i as f64;
            let lhs = hopf_lax_primitive(&b, &g, &cp, x + h, 0.9).unwrap();
            let rhs = hopf_lax_primitive(&a, &g, &cp, x, 0.9).unwrap();
            assert!((lhs - rhs).abs() < 1e-13);
        }
        assert!(hopf_lax_primitive(&a, &g, &cp, 0.0, -1.0).is_err());
        assert_eq!(hopf_lax_primitive(&a, &g, &cp, 0.3, 0.0).unwrap(), a.eval(0.3));
    }

    #[test]
    fn burgers_box_matches_closed_form() {
        // 1 on [0, 1): fan (x/t) from 0, shock at 1 + t/2 until t = 2
        let u = PiecewiseConstantFn::indicator(0.0, 1.0, 1.0).unwrap();
        let cp = Flux::Burgers.conjugate().unwrap();
        let t = 1.0;
        let exact = |x: f64| {
            if x <= 0.0 {
                0.0
            } else if x <= t {
                x * x / (2.0 * t)
            } else if x <= 1.0 + 0.5 * t {
                x - 0.5 * t
            } else {
                1.0
            }
        };
        for i in 0..60 {
            let x = -0.5 + 0.04 * i as f64;
            let v = hopf_lax_primitive(&u.primitive(), &Flux::Burgers, &cp, x, t).unwrap();
            assert!((v - exact(x)).abs() < 1e-14, "x = {x}: {v} vs {}", exact(x));
        }
        let q0 = u.quantile().unwrap();
        // inverse of the primitive above: sqrt(2tγ) on the fan, γ + t/2 after
        for i in 0..=20 {
            let g = i as f64 / 20.0;
            let want = if g <= 0.5 * t { (2.0 * t * g).sqrt() } else { g + 0.5 * t };
            let v = inverse_primitive_formula(&q0, &Flux::Burgers, &cp, g, t).unwrap();
            assert!((v - want).abs() < 1e-14, "γ = {g}: {v} vs {want}");
        }
    }

    #[test]
    fn inverse_formula_edges() {
        let u = PiecewiseConstantFn::from_cells(0.0, 0.5, vec![1.0, 0.5]).unwrap();
        let q0 = u.quantile().unwrap();
        let g = interpolate_flux(&Flux::Burgers, 0.5, 1.0).unwrap();
        let cp = g.conjugate().unwrap();
        assert!(inverse_primitive_formula(&q0, &g, &cp, 1.0, 1.0).is_err());
        assert!(inverse_primitive_formula(&q0, &g, &cp, -0.1, 1.0).is_err());
        // t -> 0: f̃ is bounded by σ_max, so the correction is O(t)
        for gamma in [0.1, 0.4, 0.7] {
            let v = inverse_primitive_formula(&q0, &g, &cp, gamma, 1e-6).unwrap();
            assert!((v - q0.eval(gamma)).abs() < 1e-4);
        }
    }
}
