//! Closed-form Burgers solutions used as references.

use crate::metrics::Profile;
use crate::solver::Evolution;
use crate::{Error, Result};

/// Shock position for the wedge `u0 = 2x` on `[0, 1)`.
pub fn wedge_shock_position(t: f64) -> f64 {
    (1.0 + 2.0 * t).sqrt()
}

/// Entropy solution of Burgers' equation for `u0(x) = 2x` on `[0, 1)`, zero
/// elsewhere: the ramp `2x / (1 + 2t)` up to the shock at `√(1 + 2t)`.
pub fn exact_wedge_burgers(x: f64, t: f64) -> f64 {
    if (0.0..wedge_shock_position(t)).contains(&x) {
        2.0 * x / (1.0 + 2.0 * t)
    } else {
        0.0
    }
}

/// Burgers shock between `left` and `right < left` starting at `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockSolution {
    pub left: f64,
    pub right: f64,
    pub x0: f64,
}

impl ShockSolution {
    pub fn speed(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        if x < self.x0 + self.speed() * t {
            self.left
        } else {
            self.right
        }
    }
}

impl Default for ShockSolution {
    fn default() -> Self {
        Self { left: 1.0, right: 0.0, x0: 0.0 }
    }
}

/// The unit shock `1 → 0` from the origin.
pub fn exact_shock_burgers(x: f64, t: f64) -> f64 {
    ShockSolution::default().eval(x, t)
}

/// The wedge solution as an [`Evolution`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactWedge;

/// [`ExactWedge`] at one time.
#[derive(Debug, Clone, Copy)]
pub struct WedgeProfile {
    t: f64,
}

impl Evolution for ExactWedge {
    fn profile_at(&self, t: f64) -> Result<Box<dyn Profile + '_>> {
        if !(t >= 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        Ok(Box::new(WedgeProfile { t }))
    }
}

impl WedgeProfile {
    fn stretch(&self) -> f64 {
        1.0 + 2.0 * self.t
    }
}

impl Profile for WedgeProfile {
    fn mass(&self) -> f64 {
        1.0
    }

    fn support(&self) -> Option<(f64, f64)> {
        Some((0.0, wedge_shock_position(self.t)))
    }

    fn cdf(&self, x: f64) -> f64 {
        let s = wedge_shock_position(self.t);
        x.clamp(0.0, s).powi(2) / self.stretch()
    }

    fn quantile(&self, xi: f64) -> f64 {
        (xi.clamp(0.0, 1.0) * self.stretch()).sqrt()
    }

    fn density(&self, x: f64) -> Option<f64> {
        Some(exact_wedge_burgers(x, self.t))
    }

    fn x_knots(&self) -> Vec<f64> {
        vec![0.0, wedge_shock_position(self.t)]
    }

    fn xi_knots(&self) -> Vec<f64> {
        vec![0.0, 1.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::w1_between;
    use crate::metrics::StepProfile;
    use crate::piecewise::PiecewiseConstantFn;

    /// Classical RK4 for `s' = rhs(t, s)`.
    fn rk4(rhs: impl Fn(f64, f64) -> f64, s0: f64, t_end: f64, steps: usize) -> f64 {
        let h = t_end / steps as f64;
        let mut s = s0;
        for i in 0..steps {
            let t = i as f64 * h;
            let k1 = rhs(t, s);
            let k2 = rhs(t + 0.5 * h, s + 0.5 * h * k1);
            let k3 = rhs(t + 0.5 * h, s + 0.5 * h * k2);
            let k4 = rhs(t + h, s + h * k3);
            s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        s
    }

    #[test]
    fn wedge_matches_characteristics_and_rankine_hugoniot() {
        // behind the shock the state is carried from x0 = x / (1 + 2t) with value 2 x0;
        // the shock moves at half the left state (right state zero)
        let rhs = |t: f64, s: f64| 0.5 * 2.0 * s / (1.0 + 2.0 * t);
        for i in 1..=10 {
            let t = 0.4 * i as f64;
            let s = rk4(rhs, 1.0, t, 4000);
            assert!((s - wedge_shock_position(t)).abs() < 1e-10, "t = {t}");
            for j in 0..20 {
                let x = s * (j as f64 + 0.5) / 20.0;
                let x0 = x / (1.0 + 2.0 * t);
                assert!((exact_wedge_burgers(x, t) - 2.0 * x0).abs() < 1e-14);
            }
            assert_eq!(exact_wedge_burgers(s + 1e-9, t), 0.0);
        }
        assert_eq!(wedge_shock_position(0.0), 1.0);
        assert_eq!(wedge_shock_position(4.0), 3.0);
    }

    #[test]
    fn wedge_profile_is_consistent() {
        let p = ExactWedge.profile_at(1.5).unwrap();
        for i in 0..=50 {
            let xi = i as f64 / 50.0;
            assert!((p.cdf(p.quantile(xi)) - xi).abs() < 1e-14);
        }
        assert_eq!(p.cdf(10.0), 1.0);
        let p0 = ExactWedge.profile_at(0.0).unwrap();
        for x in [-0.5, 0.0, 0.3, 0.99, 1.0, 2.0] {
            let want = if (0.0..1.0).contains(&x) { 2.0 * x } else { 0.0 };
            assert_eq!(p0.density(x), Some(want));
        }
        assert!(ExactWedge.profile_at(-1.0).is_err());
    }

    #[test]
    fn shock_translates_at_half_speed() {
        assert_eq!(exact_shock_burgers(0.49, 1.0), 1.0);
        assert_eq!(exact_shock_burgers(0.5, 1.0), 0.0);
        let s = ShockSolution { left: 2.0, right: 1.0, x0: -1.0 };
        assert_eq!(s.eval(-1.0 + 1.5 * 2.0 - 1e-12, 2.0), 2.0);
    }

    #[test]
    fn mass_of_the_wedge_is_conserved() {
        // the cdf reaches 1 exactly at the shock
        for t in [0.0, 0.25, 3.0] {
            let p = ExactWedge.profile_at(t).unwrap();
            assert!((p.cdf(wedge_shock_position(t)) - 1.0).abs() < 1e-15);
        }
        // a step profile of the same mass is a valid comparison partner
        let unit = StepProfile::new(PiecewiseConstantFn::indicator(0.0, 1.0, 1.0).unwrap());
        assert!(w1_between(&*ExactWedge.profile_at(0.0).unwrap(), &unit).is_ok());
    }
}
