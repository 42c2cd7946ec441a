use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::riemann::RiemannFan;
use crate::flux::PlFlux;
use crate::piecewise::PiecewiseConstantFn;
use crate::{Error, Result};

/// A discontinuity moving at constant speed between its birth and death.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub birth_time: f64,
    pub birth_position: f64,
    pub speed: f64,
    pub left: f64,
    pub right: f64,
    pub death_time: Option<f64>,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        self.birth_position + self.speed * (t - self.birth_time)
    }

    pub fn is_alive(&self, t: f64) -> bool {
        self.birth_time <= t && self.death_time.is_none_or(|d| t < d)
    }
}

/// Fronts `incoming` (contiguous, left to right) met at `(time, position)` and
/// were replaced by `outgoing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub time: f64,
    pub position: f64,
    pub incoming: Vec<usize>,
    pub outgoing: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Round initial values to the nearest flux node.
    pub snap: bool,
    pub event_cap: usize,
    pub wall_clock: Option<Duration>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { snap: true, event_cap: 10_000_000, wall_clock: None }
    }
}

/// What snapping did to the initial data.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SnapReport {
    pub max_shift: f64,
    pub mass_change: f64,
}

/// Complete front history of a run up to `t_end`.
#[derive(Debug, Clone)]
pub struct FrontTrackingRun {
    flux: PlFlux,
    initial: PiecewiseConstantFn,
    fronts: Vec<Front>,
    initial_order: Vec<usize>,
    interactions: Vec<Interaction>,
    t_end: f64,
    snap: SnapReport,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    position: f64,
    left: usize,
    right: usize,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // reversed so that BinaryHeap pops the earliest, then leftmost, event
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.position.total_cmp(&self.position))
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

const NONE: usize = usize::MAX;

struct Engine<'a> {
    flux: &'a PlFlux,
    fronts: Vec<Front>,
    prev: Vec<usize>,
    next: Vec<usize>,
    head: usize,
    queue: BinaryHeap<Event>,
    interactions: Vec<Interaction>,
    x_tol: f64,
    state_tol: f64,
}

impl<'a> Engine<'a> {
    fn push_front(&mut self, t: f64, x: f64, left: f64, right: f64, speed: f64) -> usize {
        self.fronts.push(Front { birth_time: t, birth_position: x, speed, left, right, death_time: None });
        self.prev.push(NONE);
        self.next.push(NONE);
        self.fronts.len() - 1
    }

    fn link(&mut self, a: usize, b: usize) {
        if a != NONE {
            self.next[a] = b;
        } else {
            self.head = b;
        }
        if b != NONE {
            self.prev[b] = a;
        }
    }

    fn schedule(&mut self, a: usize, b: usize, now: f64) {
        if a == NONE || b == NONE {
            return;
        }
        let (fa, fb) = (self.fronts[a], self.fronts[b]);
        if fa.speed <= fb.speed {
            return;
        }
        let t_ref = fa.birth_time.max(fb.birth_time);
        let gap = fb.position(t_ref) - fa.position(t_ref);
        let time = (t_ref + gap.max(0.0) / (fa.speed - fb.speed)).max(now);
        let position = 0.5 * (fa.position(time) + fb.position(time));
        self.queue.push(Event { time, position, left: a, right: b });
    }

    fn is_current(&self, e: &Event) -> bool {
        self.fronts[e.left].death_time.is_none()
            && self.fronts[e.right].death_time.is_none()
            && self.next[e.left] == e.right
    }

    fn emit_fan(&mut self, t: f64, x: f64, ul: f64, ur: f64) -> Vec<usize> {
        if (ul - ur).abs() <= self.state_tol {
            return Vec::new();
        }
        RiemannFan::solve(self.flux, ul, ur)
            .waves
            .into_iter()
            .map(|w| self.push_front(t, x, w.left, w.right, w.speed))
            .collect()
    }

    fn resolve(&mut self, e: Event) {
        let (t, x) = (e.time, e.position);
        let close = |f: &Front| (f.position(t) - x).abs() <= self.x_tol;
        let mut first = e.left;
        while self.prev[first] != NONE && close(&self.fronts[self.prev[first]]) {
            first = self.prev[first];
        }
        let mut last = e.right;
        while self.next[last] != NONE && close(&self.fronts[self.next[last]]) {
            last = self.next[last];
        }
        let mut incoming = vec![first];
        while *incoming.last().unwrap() != last {
            incoming.push(self.next[*incoming.last().unwrap()]);
        }
        for &i in &incoming {
            self.fronts[i].death_time = Some(t);
        }
        let (before, after) = (self.prev[first], self.next[last]);
        let (ul, ur) = (self.fronts[first].left, self.fronts[last].right);
        let outgoing = self.emit_fan(t, x, ul, ur);
        let mut cursor = before;
        for &o in &outgoing {
            self.link(cursor, o);
            cursor = o;
        }
        self.link(cursor, after);
        match (outgoing.first(), outgoing.last()) {
            (Some(&o1), Some(&on)) => {
                self.schedule(before, o1, t);
                self.schedule(on, after, t);
            }
            _ => self.schedule(before, after, t),
        }
        self.interactions.push(Interaction { time: t, position: x, incoming, outgoing });
    }
}

/// Front tracking for `u_t + f(u)_x = 0` with piecewise-linear convex `f`.
pub fn run(u0: &PiecewiseConstantFn, flux: &PlFlux, t_end: f64, opts: &RunOptions) -> Result<FrontTrackingRun> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::Config(format!("t_end = {t_end} must be finite and nonnegative")));
    }
    let (initial, snap) = if opts.snap { snap_to_lattice(u0, flux) } else { (u0.clone(), SnapReport::default()) };

    let width = initial.support_width().max(1.0);
    let state_scale = initial.sup_abs().max(1.0);
    let mut engine = Engine {
        flux,
        fronts: Vec::new(),
        prev: Vec::new(),
        next: Vec::new(),
        head: NONE,
        queue: BinaryHeap::new(),
        interactions: Vec::new(),
        x_tol: 1e-12 * width,
        state_tol: 1e-13 * state_scale,
    };

    let mut order = Vec::new();
    let mut left_state = 0.0;
    let bps = initial.breakpoints();
    for (i, &x) in bps.iter().enumerate() {
        let right_state = initial.values().get(i).copied().unwrap_or(0.0);
        order.extend(engine.emit_fan(0.0, x, left_state, right_state));
        left_state = right_state;
    }
    for w in order.windows(2) {
        engine.link(w[0], w[1]);
    }
    if let Some(&f) = order.first() {
        engine.head = f;
    }
    for w in order.windows(2) {
        engine.schedule(w[0], w[1], 0.0);
    }

    let started = Instant::now();
    let mut processed = 0usize;
    while let Some(e) = engine.queue.peek().copied() {
        if e.time > t_end {
            break;
        }
        engine.queue.pop();
        if !engine.is_current(&e) {
            continue;
        }
        processed += 1;
        if processed > opts.event_cap {
            return Err(Error::EventCap(opts.event_cap));
        }
        if processed.is_multiple_of(1024) {
            if let Some(budget) = opts.wall_clock {
                if started.elapsed() > budget {
                    return Err(Error::Timeout { events: processed });
                }
            }
        }
        engine.resolve(e);
    }

    Ok(FrontTrackingRun {
        flux: flux.clone(),
        initial,
        fronts: engine.fronts,
        initial_order: order,
        interactions: engine.interactions,
        t_end,
        snap,
    })
}

fn snap_to_lattice(u0: &PiecewiseConstantFn, flux: &PlFlux) -> (PiecewiseConstantFn, SnapReport) {
    let snapped: Vec<f64> = u0.values().iter().map(|&v| if v == 0.0 { 0.0 } else { flux.snap(v) }).collect();
    let max_shift = u0.values().iter().zip(&snapped).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let out = PiecewiseConstantFn::new(u0.breakpoints().to_vec(), snapped).expect("breakpoints already valid");
    let mass_change = out.mass() - u0.mass();
    (out, SnapReport { max_shift, mass_change })
}

impl FrontTrackingRun {
    pub fn flux(&self) -> &PlFlux {
        &self.flux
    }

    /// Initial data after snapping.
    pub fn initial(&self) -> &PiecewiseConstantFn {
        &self.initial
    }

    pub fn fronts(&self) -> &[Front] {
        &self.fronts
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn snap_report(&self) -> SnapReport {
        self.snap
    }

    pub fn event_count(&self) -> usize {
        self.interactions.len()
    }

    /// Event times in processing order.
    pub fn event_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.interactions.iter().map(|i| i.time)
    }

    /// Ids of the fronts alive at `t`, left to right. Events at exactly `t`
    /// count as already resolved.
    pub fn active_fronts(&self, t: f64) -> Result<Vec<usize>> {
        if !(t >= 0.0) || t > self.t_end {
            return Err(Error::TimeOutOfRange { t, t_end: self.t_end });
        }
        let n = self.fronts.len();
        let mut prev = vec![NONE; n];
        let mut next = vec![NONE; n];
        let mut head = self.initial_order.first().copied().unwrap_or(NONE);
        for w in self.initial_order.windows(2) {
            next[w[0]] = w[1];
            prev[w[1]] = w[0];
        }
        for it in self.interactions.iter().take_while(|it| it.time <= t) {
            let before = prev[it.incoming[0]];
            let after = next[*it.incoming.last().unwrap()];
            let mut cursor = before;
            for &o in it.outgoing.iter().chain(std::iter::once(&NONE)) {
                let target = if o == NONE { after } else { o };
                if cursor == NONE {
                    head = target;
                } else {
                    next[cursor] = target;
                }
                if target != NONE {
                    prev[target] = cursor;
                }
                if o == NONE {
                    break;
                }
                cursor = o;
            }
        }
        let mut out = Vec::new();
        let mut cur = head;
        while cur != NONE {
            out.push(cur);
            cur = next[cur];
        }
        Ok(out)
    }

    /// Solution at time `t`.
    pub fn snapshot(&self, t: f64) -> Result<PiecewiseConstantFn> {
        let ids = self.active_fronts(t)?;
        if ids.is_empty() {
            return Ok(PiecewiseConstantFn::zero());
        }
        let mut breakpoints = Vec::with_capacity(ids.len());
        let mut values = Vec::with_capacity(ids.len() - 1);
        for (k, &i) in ids.iter().enumerate() {
            let f = &self.fronts[i];
            // rounding may reorder fronts that are about to collide
            let x = f.position(t).max(breakpoints.last().copied().unwrap_or(f64::NEG_INFINITY));
            breakpoints.push(x);
            if k + 1 < ids.len() {
                values.push(f.right);
            }
        }
        Ok(PiecewiseConstantFn::canonical(breakpoints, values))
    }

    /// Number of fronts alive at `t`.
    pub fn front_count(&self, t: f64) -> Result<usize> {
        Ok(self.active_fronts(t)?.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{interpolate_flux, Flux};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn burgers(delta: f64, m: f64) -> PlFlux {
        interpolate_flux(&Flux::Burgers, delta, m).unwrap().as_pl().unwrap().clone()
    }

    fn pc(bps: &[f64], vals: &[f64]) -> PiecewiseConstantFn {
        PiecewiseConstantFn::new(bps.to_vec(), vals.to_vec()).unwrap()
    }

    #[test]
    fn single_shock_translates() {
        // 1 on [-5, 0): the upward jump stays inside one flux piece
        let run = run(&pc(&[-5.0, 0.0], &[1.0]), &burgers(1.0, 1.0), 1.0, &RunOptions::default()).unwrap();
        let s = run.snapshot(1.0).unwrap();
        assert_eq!(s.breakpoints(), &[-4.5, 0.5]);
        assert_eq!(run.event_count(), 0);
    }

    #[test]
    fn two_fronts_merge() {
        let u0 = pc(&[0.0, 1.0, 2.0], &[1.0, 0.5]);
        let r = run(&u0, &burgers(0.5, 1.0), 3.0, &RunOptions::default()).unwrap();
        let merge = r.interactions().iter().find(|i| i.incoming.len() == 2 && i.time > 1.0).unwrap();
        assert_relative_eq!(merge.time, 2.0, epsilon = 1e-14);
        assert_relative_eq!(merge.position, 2.5, epsilon = 1e-14);
        let out = r.fronts()[merge.outgoing[0]];
        assert_eq!((out.left, out.right, out.speed), (1.0, 0.0, 0.5));
        let ids = r.active_fronts(1.0).unwrap();
        let speeds: Vec<f64> = ids.iter().map(|&i| r.fronts()[i].speed).collect();
        assert!(speeds.ends_with(&[0.75, 0.25]));
    }

    #[test]
    fn snapshot_bounds_and_ties() {
        let u0 = pc(&[0.0, 1.0, 2.0], &[1.0, 0.5]);
        let r = run(&u0, &burgers(0.5, 1.0), 3.0, &RunOptions::default()).unwrap();
        assert_eq!(r.snapshot(0.0).unwrap(), u0);
        assert!(r.snapshot(3.5).is_err());
        assert!(r.snapshot(-0.1).is_err());
        // at the merge time the merged front is already active
        let at = r.snapshot(2.0).unwrap();
        assert!(at.breakpoints().iter().any(|&x| (x - 2.5).abs() < 1e-14));
    }

    #[test]
    fn snapping_reports_shift() {
        let u0 = pc(&[0.0, 1.0], &[0.6]);
        let r = run(&u0, &burgers(0.5, 1.0), 0.0, &RunOptions::default()).unwrap();
        assert_eq!(r.initial().values(), &[0.5]);
        assert_relative_eq!(r.snap_report().max_shift, 0.1, epsilon = 1e-15);
        let raw = run(&u0, &burgers(0.5, 1.0), 1.0, &RunOptions { snap: false, ..Default::default() }).unwrap();
        assert_relative_eq!(raw.snapshot(1.0).unwrap().mass(), 0.6, max_relative = 1e-14);
    }

    #[test]
    fn event_cap_is_enforced() {
        let u0 = PiecewiseConstantFn::from_cells(0.0, 0.1, (0..40).map(|i| ((i * 7) % 5) as f64 * 0.25).collect()).unwrap();
        let opts = RunOptions { event_cap: 3, ..Default::default() };
        assert!(matches!(run(&u0, &burgers(0.25, 1.0), 10.0, &opts), Err(Error::EventCap(3))));
    }

    fn random_lattice_data(rng: &mut ChaCha8Rng, delta: f64) -> PiecewiseConstantFn {
        let n = rng.gen_range(1..30);
        let dx = rng.gen_range(0.05..0.3);
        let vals = (0..n).map(|_| rng.gen_range(-4i32..=4) as f64 * delta).collect();
        PiecewiseConstantFn::from_cells(rng.gen_range(-1.0..1.0), dx, vals).unwrap()
    }

    /// Checks every structural invariant of a run at event epochs and midpoints.
    fn check_structure(r: &FrontTrackingRun) {
        let mass0 = r.initial().mass();
        let scale = r.initial().l1_norm().max(1e-300);
        let mut times: Vec<f64> = vec![0.0];
        times.extend(r.event_times());
        times.push(r.t_end());
        let mut mids: Vec<f64> = times.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        times.append(&mut mids);
        times.sort_by(f64::total_cmp);
        let mut tv_prev = f64::INFINITY;
        for &t in &times {
            let s = r.snapshot(t).unwrap();
            assert!((s.mass() - mass0).abs() <= 1e-12 * scale, "mass at t = {t}");
            let tv = s.total_variation();
            assert!(tv <= tv_prev + 1e-12, "TV grew at t = {t}");
            tv_prev = tv;
            let ids = r.active_fronts(t).unwrap();
            for w in ids.windows(2) {
                let (a, b) = (r.fronts()[w[0]], r.fronts()[w[1]]);
                assert_eq!(a.right, b.left);
                assert!(a.position(t) <= b.position(t) + 1e-12);
            }
            for &i in &ids {
                let f = r.fronts()[i];
                if f.left < f.right {
                    assert!(r.flux().same_piece(f.left, f.right), "non-entropic front {f:?}");
                }
            }
        }
        for it in r.interactions() {
            assert!(it.outgoing.len() <= it.incoming.len());
        }
    }

    #[test]
    fn randomized_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let delta = [0.5, 0.25, 0.125][rng.gen_range(0..3)];
            let u0 = random_lattice_data(&mut rng, delta);
            let r = run(&u0, &burgers(delta, 1.0), 4.0, &RunOptions::default()).unwrap();
            check_structure(&r);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn unsnapped_runs_conserve_mass(vals in prop::collection::vec(-1.0f64..1.0, 1..20), t in 0.0f64..3.0) {
            let u0 = PiecewiseConstantFn::from_cells(0.0, 0.1, vals).unwrap();
            let r = run(&u0, &burgers(0.25, 1.0), 3.0, &RunOptions { snap: false, ..Default::default() }).unwrap();
            let s = r.snapshot(t).unwrap();
            prop_assert!((s.mass() - u0.mass()).abs() <= 1e-12 * u0.l1_norm().max(1.0));
            prop_assert!(s.total_variation() <= u0.total_variation() + 1e-12);
        }
    }
}
