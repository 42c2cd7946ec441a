//! Event-driven front tracking and the Hopf–Lax oracle.
//!
//! [`run`] resolves every front interaction exactly. The Hopf–Lax functions
//! compute the primitive and its inverse from the initial data directly; they
//! share no code with the front tracker and serve as its oracle.

mod front_tracking;
mod hopf_lax;
mod riemann;

pub use front_tracking::{run, Front, FrontTrackingRun, Interaction, RunOptions, SnapReport};
pub use hopf_lax::{hopf_lax_primitive, inverse_primitive_formula};
pub use riemann::{solve_riemann, RiemannFan, Wave};

use crate::flux::{ConjugatePair, Flux};
use crate::metrics::{Profile, StepProfile};
use crate::piecewise::{PiecewiseConstantFn, PiecewiseLinearFn, QuantileFn};
use crate::{Error, Result};

/// Anything that yields a density profile at a given time.
pub trait Evolution: Sync {
    fn profile_at(&self, t: f64) -> Result<Box<dyn Profile + '_>>;
}

impl Evolution for FrontTrackingRun {
    fn profile_at(&self, t: f64) -> Result<Box<dyn Profile + '_>> {
        Ok(Box::new(StepProfile::new(self.snapshot(t)?)))
    }
}

/// Exact entropy solution for a smooth convex flux and nonnegative step data,
/// evaluated through the Hopf–Lax formula and its inverse.
#[derive(Debug, Clone)]
pub struct HopfLaxEvolution {
    flux: Flux,
    conjugate: ConjugatePair,
    initial: PiecewiseConstantFn,
    primitive: PiecewiseLinearFn,
    quantile: QuantileFn,
}

impl HopfLaxEvolution {
    pub fn new(u0: &PiecewiseConstantFn, flux: Flux) -> Result<Self> {
        let conjugate = flux.conjugate()?;
        if !conjugate.min_at_zero() {
            return Err(Error::Unsupported("Hopf–Lax evolution needs a flux with minimum f(0) = 0"));
        }
        Ok(Self {
            quantile: u0.quantile()?,
            primitive: u0.primitive(),
            initial: u0.clone(),
            conjugate,
            flux,
        })
    }

    pub fn flux(&self) -> &Flux {
        &self.flux
    }

    pub fn initial(&self) -> &PiecewiseConstantFn {
        &self.initial
    }

    pub fn primitive_at(&self, x: f64, t: f64) -> Result<f64> {
        hopf_lax_primitive(&self.primitive, &self.flux, &self.conjugate, x, t)
    }

    pub fn inverse_primitive_at(&self, gamma: f64, t: f64) -> Result<f64> {
        inverse_primitive_formula(&self.quantile, &self.flux, &self.conjugate, gamma, t)
    }
}

/// [`HopfLaxEvolution`] frozen at one time.
pub struct HopfLaxProfile<'a> {
    evolution: &'a HopfLaxEvolution,
    t: f64,
    support: Option<(f64, f64)>,
}

impl Evolution for HopfLaxEvolution {
    fn profile_at(&self, t: f64) -> Result<Box<dyn Profile + '_>> {
        if t < 0.0 {
            return Err(Error::NonPositiveTime(t));
        }
        let m = self.quantile.mass();
        let support = if m > 0.0 {
            Some((self.inverse_primitive_at(0.0, t)?, self.inverse_primitive_at(m, t)?))
        } else {
            None
        };
        Ok(Box::new(HopfLaxProfile { evolution: self, t, support }))
    }
}

impl Profile for HopfLaxProfile<'_> {
    fn mass(&self) -> f64 {
        self.evolution.quantile.mass()
    }

    fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    fn cdf(&self, x: f64) -> f64 {
        self.evolution.primitive_at(x, self.t).expect("time checked on construction")
    }

    fn quantile(&self, xi: f64) -> f64 {
        let xi = xi.clamp(0.0, self.mass());
        self.evolution.inverse_primitive_at(xi, self.t).expect("level clamped to [0, m]")
    }

    fn x_knots(&self) -> Vec<f64> {
        self.support.map(|(a, b)| vec![a, b]).unwrap_or_default()
    }

    fn xi_knots(&self) -> Vec<f64> {
        vec![0.0, self.mass()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::interpolate_flux;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Front tracking against both Hopf–Lax formulas on the same flux.
    fn assert_oracle_agreement(u0: &PiecewiseConstantFn, delta: f64, times: &[f64]) {
        let m = u0.sup_abs();
        let g = interpolate_flux(&Flux::Burgers, delta, m).unwrap();
        let pl = g.as_pl().unwrap();
        let r = run(u0, pl, *times.last().unwrap(), &RunOptions::default()).unwrap();
        let init = r.initial();
        let cp = g.conjugate().unwrap();
        let (p0, q0) = (init.primitive(), init.quantile().unwrap());
        for &t in times {
            let s = r.snapshot(t).unwrap();
            let (us, qs) = (s.primitive(), s.quantile().unwrap());
            let (a, b) = s.support().unwrap();
            for i in 0..=200 {
                let x = a - 0.1 + (b - a + 0.2) * i as f64 / 200.0;
                let hl = hopf_lax_primitive(&p0, &g, &cp, x, t).unwrap();
                assert!((hl - us.eval(x)).abs() < 1e-9, "t = {t}, x = {x}: {hl} vs {}", us.eval(x));
            }
            for i in 0..=200 {
                let gamma = qs.mass() * i as f64 / 200.0;
                let inv = inverse_primitive_formula(&q0, &g, &cp, gamma, t).unwrap();
                assert!((inv - qs.eval(gamma)).abs() < 1e-9, "t = {t}, γ = {gamma}: {inv} vs {}", qs.eval(gamma));
            }
        }
    }

    #[test]
    fn oracle_matches_front_tracking_on_a_staircase() {
        let u0 = PiecewiseConstantFn::from_cells(0.0, 0.25, vec![0.25, 0.75, 1.0, 0.5, 0.25]).unwrap();
        assert_oracle_agreement(&u0, 0.25, &[0.3, 1.0, 2.5, 6.0]);
    }

    #[test]
    fn oracle_matches_front_tracking_on_random_connected_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let delta = 0.125;
            let n = rng.gen_range(2..16);
            let vals = (0..n).map(|_| rng.gen_range(1..=8) as f64 * delta).collect();
            let u0 = PiecewiseConstantFn::from_cells(rng.gen_range(-1.0..1.0), 0.125, vals).unwrap();
            assert_oracle_agreement(&u0, delta, &[0.1, 0.7, 3.0]);
        }
    }

    #[test]
    fn support_stays_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let delta = 0.25;
            let vals = (0..rng.gen_range(1..12)).map(|_| rng.gen_range(1..=6) as f64 * delta).collect();
            let u0 = PiecewiseConstantFn::from_cells(0.0, 0.2, vals).unwrap();
            let g = interpolate_flux(&Flux::Burgers, delta, u0.sup_abs()).unwrap();
            let r = run(&u0, g.as_pl().unwrap(), 5.0, &RunOptions::default()).unwrap();
            for t in r.event_times().chain([0.5, 2.0, 5.0]) {
                let s = r.snapshot(t).unwrap();
                assert!(s.values().iter().all(|&v| v > 0.0), "gap at t = {t}");
            }
        }
    }

    #[test]
    fn primitive_gap_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let delta = 0.25;
        for _ in 0..20 {
            let mut data = || {
                let vals: Vec<f64> = (0..8).map(|_| rng.gen_range(0..=4) as f64 * delta).collect();
                PiecewiseConstantFn::from_cells(0.0, 0.25, vals).unwrap()
            };
            let (u0, v0) = (data(), data());
            let g = interpolate_flux(&Flux::Burgers, delta, 1.0).unwrap();
            let pl = g.as_pl().unwrap();
            let (ru, rv) = (run(&u0, pl, 4.0, &RunOptions::default()).unwrap(), run(&v0, pl, 4.0, &RunOptions::default()).unwrap());
            let mut times: Vec<f64> = ru.event_times().chain(rv.event_times()).chain([0.0, 4.0]).collect();
            times.sort_by(f64::total_cmp);
            let mut last = f64::INFINITY;
            for t in times {
                let d = crate::metrics::primitive_sup_unchecked(&ru.snapshot(t).unwrap(), &rv.snapshot(t).unwrap());
                assert!(d <= last + 1e-12, "t = {t}: {d} > {last}");
                last = d;
            }
        }
    }

    #[test]
    fn hopf_lax_profile_support() {
        let u0 = PiecewiseConstantFn::indicator(0.0, 1.0, 1.0).unwrap();
        let ev = HopfLaxEvolution::new(&u0, Flux::Burgers).unwrap();
        let p = ev.profile_at(1.0).unwrap();
        let (a, b) = p.support().unwrap();
        assert!(a.abs() < 1e-15 && (b - 1.5).abs() < 1e-14);
        assert!((p.cdf(0.5) - 0.125).abs() < 1e-15);
    }
}
