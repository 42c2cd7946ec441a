use super::check_masses;
use crate::piecewise::{PiecewiseConstantFn, PiecewiseLinearFn, QuantileFn};
use crate::quadrature::integrate;
use crate::{Error, Result};

/// A nonnegative density of finite mass, seen through its primitive and its
/// quantile function.
///
/// Step functions give [`StepProfile`]; analytic references and the Hopf–Lax
/// evolution implement it directly. The distances below integrate between
/// the reported knots, so every kink or jump of `cdf` / `quantile` must be
/// listed in `x_knots` / `xi_knots`.
pub trait Profile: Send + Sync {
    fn mass(&self) -> f64;

    /// Closed hull of the support, `None` for the zero profile.
    fn support(&self) -> Option<(f64, f64)>;

    /// Primitive `∫_{-∞}^x u`.
    fn cdf(&self, x: f64) -> f64;

    /// Right-continuous quantile on `[0, mass]`.
    fn quantile(&self, xi: f64) -> f64;

    fn quantile_left(&self, xi: f64) -> f64 {
        self.quantile(xi)
    }

    fn density(&self, _x: f64) -> Option<f64> {
        None
    }

    fn x_knots(&self) -> Vec<f64>;

    fn xi_knots(&self) -> Vec<f64>;

    fn is_nonnegative(&self) -> bool {
        true
    }

    fn as_steps(&self) -> Option<&PiecewiseConstantFn> {
        None
    }
}

/// Step function with its primitive and quantile cached.
#[derive(Debug, Clone)]
pub struct StepProfile {
    u: PiecewiseConstantFn,
    primitive: PiecewiseLinearFn,
    quantile: Option<QuantileFn>,
}

impl StepProfile {
    pub fn new(u: PiecewiseConstantFn) -> Self {
        Self { primitive: u.primitive(), quantile: u.quantile().ok(), u }
    }

    pub fn steps(&self) -> &PiecewiseConstantFn {
        &self.u
    }

    pub fn quantile_fn(&self) -> Option<&QuantileFn> {
        self.quantile.as_ref()
    }
}

impl From<PiecewiseConstantFn> for StepProfile {
    fn from(u: PiecewiseConstantFn) -> Self {
        Self::new(u)
    }
}

impl Profile for StepProfile {
    fn mass(&self) -> f64 {
        self.u.mass()
    }

    fn support(&self) -> Option<(f64, f64)> {
        self.u.support()
    }

    fn cdf(&self, x: f64) -> f64 {
        self.primitive.eval(x)
    }

    /// NaN for signed data.
    fn quantile(&self, xi: f64) -> f64 {
        self.quantile.as_ref().map_or(f64::NAN, |q| q.eval(xi))
    }

    fn quantile_left(&self, xi: f64) -> f64 {
        self.quantile.as_ref().map_or(f64::NAN, |q| q.eval_left(xi))
    }

    fn density(&self, x: f64) -> Option<f64> {
        Some(self.u.eval(x))
    }

    fn x_knots(&self) -> Vec<f64> {
        self.u.breakpoints().to_vec()
    }

    fn xi_knots(&self) -> Vec<f64> {
        self.quantile.as_ref().map(|q| q.knot_positions().to_vec()).unwrap_or_default()
    }

    fn is_nonnegative(&self) -> bool {
        self.u.is_nonnegative()
    }

    fn as_steps(&self) -> Option<&PiecewiseConstantFn> {
        Some(&self.u)
    }
}

const ROOT_SAMPLES: usize = 16;
const REL_TOL: f64 = 1e-10;

fn sorted_knots(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.retain(|x| *x > lo && *x < hi);
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    let tol = 1e-14 * (1.0 + lo.abs().max(hi.abs()));
    pts.dedup_by(|b, a| *b - *a <= tol);
    *pts.last_mut().unwrap() = hi;
    pts
}

/// Refines `knots` with every sign change of `g` found by sampling each piece.
/// `g` may jump at the knots, so the piece ends are sampled just inside.
fn split_at_roots(g: &impl Fn(f64) -> f64, knots: &[f64]) -> Vec<f64> {
    let mut out = vec![knots[0]];
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let inset = 1e-12 * (b - a);
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=ROOT_SAMPLES {
            let s = (a + (b - a) * i as f64 / ROOT_SAMPLES as f64).clamp(a + inset, b - inset);
            let gs = g(s);
            if let Some((sp, gp)) = prev {
                if gp * gs < 0.0 {
                    let (mut lo, mut hi) = (sp, s);
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if g(mid) * gp > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    out.push(0.5 * (lo + hi));
                }
            }
            prev = Some((s, gs));
        }
        out.push(b);
    }
    out
}

/// `∫ |g|^p` over the knot span, to relative accuracy about [`REL_TOL`].
fn abs_pow_integral(g: impl Fn(f64) -> f64, knots: &[f64], p: f64) -> f64 {
    if knots.len() < 2 {
        return 0.0;
    }
    let pieces = split_at_roots(&g, knots);
    let h = |x: f64| g(x).abs().powf(p);
    // one panel per piece for the scale, then the adaptive pass
    let rough: f64 = pieces.windows(2).map(|w| integrate(h, w[0], w[1], f64::INFINITY)).sum();
    let n = (pieces.len() - 1) as f64;
    let tol = (REL_TOL * rough).max(f64::MIN_POSITIVE) / n;
    pieces.windows(2).map(|w| integrate(h, w[0], w[1], tol)).sum()
}

fn golden_max(h: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const R: f64 = 0.618_033_988_749_894_9;
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let (mut hc, mut hd) = (h(c), h(d));
    for _ in 0..80 {
        if b - a <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if hc > hd {
            b = d;
            d = c;
            hd = hc;
            c = b - R * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + R * (b - a);
            hd = h(d);
        }
    }
    hc.max(hd)
}

/// `sup |g|` on the knot span: one-sided values at the knots plus, on each
/// piece, golden-section searches for the largest and smallest `g`. Exact for
/// `g` piecewise monotone, concave or convex between knots.
pub(super) fn abs_sup(g: impl Fn(f64) -> f64, g_left: impl Fn(f64) -> f64, knots: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for &k in knots {
        best = best.max(g(k).abs()).max(g_left(k).abs());
    }
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let inset = 1e-12 * (b - a);
        let (lo, hi) = (a + inset, b - inset);
        if hi <= lo {
            continue;
        }
        best = best.max(golden_max(&g, lo, hi)).max(golden_max(|x| -g(x), lo, hi));
    }
    best
}

fn check_profiles(a: &dyn Profile, b: &dyn Profile) -> Result<f64> {
    let (ma, mb) = (a.mass(), b.mass());
    check_masses(ma, mb, ma.abs().max(mb.abs()))?;
    Ok(ma.max(mb))
}

fn check_nonnegative(a: &dyn Profile, b: &dyn Profile) -> Result<()> {
    for p in [a, b] {
        if !p.is_nonnegative() {
            return Err(Error::NegativeDensity { at: f64::NAN, value: f64::NAN });
        }
    }
    Ok(())
}

fn x_span(a: &dyn Profile, b: &dyn Profile) -> Option<Vec<f64>> {
    let span = match (a.support(), b.support()) {
        (None, None) => return None,
        (Some(s), None) | (None, Some(s)) => s,
        (Some((a0, a1)), Some((b0, b1))) => (a0.min(b0), a1.max(b1)),
    };
    let mut pts = a.x_knots();
    pts.extend(b.x_knots());
    Some(sorted_knots(pts, span.0, span.1))
}

fn xi_span(a: &dyn Profile, b: &dyn Profile, m: f64) -> Vec<f64> {
    let mut pts = a.xi_knots();
    pts.extend(b.xi_knots());
    sorted_knots(pts, 0.0, m)
}

/// `∫ |A - B|` for two profiles of equal mass.
pub fn w1_between(a: &dyn Profile, b: &dyn Profile) -> Result<f64> {
    if let (Some(u), Some(v)) = (a.as_steps(), b.as_steps()) {
        return super::w1(u, v);
    }
    check_profiles(a, b)?;
    Ok(x_span(a, b).map_or(0.0, |knots| abs_pow_integral(|x| a.cdf(x) - b.cdf(x), &knots, 1.0)))
}

/// `‖Q_a - Q_b‖_{Lp[0, m]}`; `p = ∞` gives [`winf_between`].
pub fn wp_between(a: &dyn Profile, b: &dyn Profile, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if p.is_infinite() {
        return winf_between(a, b);
    }
    if let (Some(u), Some(v)) = (a.as_steps(), b.as_steps()) {
        return super::wp(u, v, p);
    }
    let m = check_profiles(a, b)?;
    check_nonnegative(a, b)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    let knots = xi_span(a, b, m);
    Ok(abs_pow_integral(|xi| a.quantile(xi) - b.quantile(xi), &knots, p).powf(1.0 / p))
}

pub fn winf_between(a: &dyn Profile, b: &dyn Profile) -> Result<f64> {
    if let (Some(u), Some(v)) = (a.as_steps(), b.as_steps()) {
        return super::winf(u, v);
    }
    let m = check_profiles(a, b)?;
    check_nonnegative(a, b)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    let knots = xi_span(a, b, m);
    Ok(abs_sup(
        |xi| a.quantile(xi) - b.quantile(xi),
        |xi| a.quantile_left(xi) - b.quantile_left(xi),
        &knots,
    ))
}

/// `∫ |a - b|`; needs densities on both sides.
pub fn l1_between(a: &dyn Profile, b: &dyn Profile) -> Result<f64> {
    if let (Some(u), Some(v)) = (a.as_steps(), b.as_steps()) {
        return Ok(u.l1_distance(v));
    }
    let (Some(_), Some(_)) = (a.density(0.0), b.density(0.0)) else {
        return Err(Error::Unsupported("L1 distance needs pointwise densities"));
    };
    Ok(x_span(a, b).map_or(0.0, |knots| {
        abs_pow_integral(|x| a.density(x).unwrap_or(0.0) - b.density(x).unwrap_or(0.0), &knots, 1.0)
    }))
}
