use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DataStats, InitialData, PreparedData, ReferenceMode, StudyConfig};
use super::eoc::{EocRow, EocTable};
use super::exact::ExactWedge;
use crate::flux::{interpolate_flux, Flux};
use crate::metrics::{l1_between, p_label, w1_between, winf_between, wp_between, Profile, StepProfile};
use crate::piecewise::project_to_grid;
use crate::solver::{run, Evolution, FrontTrackingRun, HopfLaxEvolution, RunOptions};
use crate::{Error, Result};

/// Environment variable capping the worker threads of a study.
pub const THREADS_ENV: &str = "SHOCKFRONT_THREADS";

/// Metric column names for a config, in output order.
pub fn metric_columns(cfg: &StudyConfig) -> Vec<String> {
    let mut cols = vec!["l1".to_string(), "w1".to_string()];
    cols.extend(cfg.wp_exponents().into_iter().map(|p| format!("wp_{}", p_label(p))));
    cols.push("winf".into());
    cols
}

/// Explicit constants of the `W1` and `W∞` error bounds
///
/// ```text
/// W1 error ≤ C̃(t) Δx²,  C̃(t) = C(t) (TV + t λ² K(t) sup f'') + K(t) C / 8
/// W∞ error ≤ L(t) Δx,   L(t) = 1 + t max f''
/// ```
///
/// with `C(t) = exp(‖f'‖_Lip C t)` and `K(t) = |supp u0| + 2Δx + Lip(f) t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateConstants {
    pub data: DataStats,
    pub lambda: f64,
    /// `sup f''` on `[-M - δ, M + δ]`, which also bounds `‖f'‖_Lip` there.
    pub max_f2: f64,
    /// `Lip(f)` on `[-M - δ, M + δ]`.
    pub flux_lip: f64,
}

impl RateConstants {
    /// `None` when the flux has no second derivative (piecewise linear).
    pub fn new(flux: &Flux, data: DataStats, lambda: f64, dx: f64) -> Option<Self> {
        let reach = data.sup + lambda * dx;
        Some(Self {
            data,
            lambda,
            max_f2: flux.max_second_derivative(reach)?,
            flux_lip: flux.lipschitz_on(-reach, reach),
        })
    }

    pub fn growth(&self, t: f64) -> f64 {
        (self.max_f2 * self.data.lip_plus * t).exp()
    }

    pub fn support_bound(&self, t: f64, dx: f64) -> f64 {
        self.data.support_width + 2.0 * dx + self.flux_lip * t
    }

    pub fn w1_constant(&self, t: f64, dx: f64) -> f64 {
        let k = self.support_bound(t, dx);
        let c = self.data.lip_plus;
        self.growth(t) * (self.data.total_variation + t * self.lambda.powi(2) * k * self.max_f2) + k * c / 8.0
    }

    pub fn winf_constant(&self, t: f64) -> f64 {
        1.0 + t * self.max_f2
    }
}

/// The reference solution of a study.
pub enum Reference {
    Wedge(ExactWedge),
    HopfLax(HopfLaxEvolution),
    Fine(FrontTrackingRun),
}

impl Reference {
    pub fn evolution(&self) -> &dyn Evolution {
        match self {
            Self::Wedge(e) => e,
            Self::HopfLax(e) => e,
            Self::Fine(e) => e,
        }
    }
}

/// One level: the projected data, the interpolated flux and the run.
pub struct Level {
    pub k: u32,
    pub dx: f64,
    pub delta: f64,
    pub flux: Flux,
    pub run: FrontTrackingRun,
}

fn run_options(cfg: &StudyConfig) -> RunOptions {
    let mut opts = RunOptions { snap: cfg.snap, ..RunOptions::default() };
    if let Some(cap) = cfg.event_cap {
        opts.event_cap = cap;
    }
    opts.wall_clock = cfg.wall_clock_secs.map(Duration::from_secs_f64);
    opts
}

/// Projects, interpolates and runs one level to the last study time.
pub fn run_level(cfg: &StudyConfig, data: &PreparedData, flux: &Flux, k: u32) -> Result<Level> {
    let dx = 0.5f64.powi(k as i32);
    let delta = cfg.lambda * dx;
    let u0 = project_to_grid(data, dx)?;
    let g = interpolate_flux(flux, delta, u0.sup_abs())?;
    let t_end = cfg.sorted_times().last().copied().unwrap_or(0.0);
    let pl = g.as_pl().expect("interpolant is piecewise linear");
    let r = run(&u0, pl, t_end, &run_options(cfg))?;
    Ok(Level { k, dx, delta, flux: g, run: r })
}

/// Builds the reference for a config.
pub fn reference(cfg: &StudyConfig) -> Result<Reference> {
    let flux = cfg.flux()?;
    let data = cfg.initial.prepare()?;
    match cfg.reference {
        ReferenceMode::Fine => Ok(Reference::Fine(run_level(cfg, &data, &flux, cfg.k_max + 3)?.run)),
        ReferenceMode::Analytic => match (&cfg.initial, &flux, data.steps()) {
            (InitialData::Wedge, Flux::Burgers, _) => Ok(Reference::Wedge(ExactWedge)),
            (_, Flux::Burgers | Flux::Power { .. }, Some(u0)) => {
                Ok(Reference::HopfLax(HopfLaxEvolution::new(u0, flux.clone())?))
            }
            _ => Err(Error::Config("no analytic reference for this flux and data; use \"fine\"".into())),
        },
    }
}

/// Distances in column order; `l1` is `None` when the reference has no
/// pointwise density.
pub fn level_errors(reference: &dyn Profile, approx: &StepProfile, ps: &[f64]) -> Result<Vec<Option<f64>>> {
    let mut out = vec![l1_between(reference, approx).ok(), Some(w1_between(reference, approx)?)];
    for &p in ps {
        out.push(Some(wp_between(reference, approx, p)?));
    }
    out.push(Some(winf_between(reference, approx)?));
    Ok(out)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} = {v:?} is not a thread count")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

/// Runs every level against the reference and returns one table per time,
/// sorted by time. A failing level is recorded in its rows and the study
/// continues.
pub fn run_study(cfg: &StudyConfig) -> Result<Vec<EocTable>> {
    cfg.validate()?;
    let flux = cfg.flux()?;
    let data = cfg.initial.prepare()?;
    let times = cfg.sorted_times();
    let ps = cfg.wp_exponents();
    let columns = metric_columns(cfg);
    let reference = reference(cfg)?;
    let pool = thread_pool()?;

    let rows: Vec<Vec<EocRow>> = pool.install(|| {
        let refs: Vec<Result<Box<dyn Profile + '_>>> =
            times.iter().map(|&t| reference.evolution().profile_at(t)).collect();
        (cfg.k_min..=cfg.k_max)
            .into_par_iter()
            .map(|k| {
                let dx = 0.5f64.powi(k as i32);
                let failed = |msg: String| EocRow {
                    k,
                    dx,
                    errors: vec![None; columns.len()],
                    eoc: vec![None; columns.len()],
                    failure: Some(msg),
                    events: 0,
                    fronts: 0,
                };
                let level = match run_level(cfg, &data, &flux, k) {
                    Ok(l) => l,
                    Err(e) => return times.iter().map(|_| failed(e.to_string())).collect(),
                };
                times
                    .iter()
                    .zip(&refs)
                    .map(|(&t, r)| {
                        let outcome = r.as_ref().map_err(|e| e.to_string()).and_then(|r| {
                            let approx = StepProfile::new(level.run.snapshot(t).map_err(|e| e.to_string())?);
                            level_errors(&**r, &approx, &ps).map_err(|e| e.to_string())
                        });
                        match outcome {
                            Ok(errors) => EocRow {
                                k,
                                dx,
                                errors,
                                eoc: vec![None; columns.len()],
                                failure: None,
                                events: level.run.interactions().iter().filter(|i| i.time <= t).count(),
                                fronts: level.run.front_count(t).unwrap_or(0),
                            },
                            Err(msg) => failed(msg),
                        }
                    })
                    .collect()
            })
            .collect()
    });

    let notes = study_notes(cfg, &data);
    let mut tables: Vec<EocTable> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut table = EocTable::new(t, columns.clone());
            table.rows = rows.iter().map(|level| level[i].clone()).collect();
            table.notes = notes.clone();
            table.finalize();
            table
        })
        .collect();
    tables.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(tables)
}

fn study_notes(cfg: &StudyConfig, data: &PreparedData) -> Vec<String> {
    let mut notes = Vec::new();
    if data.stats().lip_plus.is_infinite() {
        notes.push("initial data are not one-sided Lipschitz: outside the hypotheses of the W1 rate estimate".into());
    }
    if !cfg.snap {
        notes.push("unsnapped initial states".into());
    }
    if cfg.reference == ReferenceMode::Fine {
        notes.push(format!("reference: front tracking at k = {}", cfg.k_max + 3));
    }
    notes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_follow_the_p_list() {
        let mut cfg = StudyConfig::wedge_burgers(3, 5);
        cfg.p = vec![4.0, 1.0, 2.0, f64::INFINITY, 2.0];
        assert_eq!(metric_columns(&cfg), vec!["l1", "w1", "wp_2", "wp_4", "winf"]);
    }

    #[test]
    fn wedge_constants() {
        let data = InitialData::Wedge.prepare().unwrap().stats();
        let c = RateConstants::new(&Flux::Burgers, data, 1.0, 0.125).unwrap();
        assert_eq!(c.max_f2, 1.0);
        assert_eq!(c.flux_lip, 2.125);
        assert_eq!(c.winf_constant(2.0), 3.0);
        // K = 1 + 2Δx + 2.125 t, C(t) = e^{2t}
        let (t, dx) = (0.5, 0.125);
        let k = 1.0 + 0.25 + 2.125 * t;
        let want = 1f64.exp() * (4.0 + t * k) + k * 2.0 / 8.0;
        assert!((c.w1_constant(t, dx) - want).abs() < 1e-13);
        let pl = interpolate_flux(&Flux::Burgers, 0.1, 1.0).unwrap();
        assert!(RateConstants::new(&pl, data, 1.0, 0.1).is_none());
    }

    #[test]
    fn small_wedge_study() {
        let cfg = StudyConfig::wedge_burgers(3, 6);
        let tables = run_study(&cfg).unwrap();
        assert_eq!(tables.len(), 2);
        for t in &tables {
            assert!(!t.any_failed());
            assert_eq!(t.rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![3, 4, 5, 6]);
            let w1 = t.errors("w1").unwrap();
            assert!(w1.windows(2).all(|w| w[1].unwrap() < w[0].unwrap()));
            assert!(t.slope("w1").unwrap() > 1.5);
        }
    }

    #[test]
    fn fine_reference_and_failures() {
        let mut cfg = StudyConfig::wedge_burgers(2, 4);
        cfg.reference = ReferenceMode::Fine;
        cfg.times = vec![0.5];
        let tables = run_study(&cfg).unwrap();
        assert!(!tables[0].any_failed());
        assert!(tables[0].notes.iter().any(|n| n.contains("k = 7")));
        cfg.event_cap = Some(5);
        let tables = run_study(&cfg).unwrap_err();
        // the reference run itself hits the cap
        assert!(matches!(tables, Error::EventCap(5)));
        let mut cfg = StudyConfig::wedge_burgers(2, 5);
        cfg.times = vec![0.5];
        let data = cfg.initial.prepare().unwrap();
        let coarse = run_level(&cfg, &data, &Flux::Burgers, 2).unwrap().run.event_count();
        cfg.event_cap = Some(coarse);
        let t = &run_study(&cfg).unwrap()[0];
        assert!(t.rows[0].failure.is_none() && t.rows.last().unwrap().failure.is_some());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let cfg = StudyConfig::wedge_burgers(3, 6);
        let a = run_study(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_study(&cfg).unwrap());
        assert_eq!(a[0].to_csv(), b[0].to_csv());
    }

    #[test]
    fn fine_and_analytic_references_agree() {
        // reference error stays an order of magnitude below the coarsest level
        let cfg = StudyConfig::wedge_burgers(3, 6);
        let tables = run_study(&cfg).unwrap();
        let data = cfg.initial.prepare().unwrap();
        let fine = run_level(&cfg, &data, &Flux::Burgers, cfg.k_max + 3).unwrap().run;
        for table in &tables {
            let exact = ExactWedge.profile_at(table.time).unwrap();
            let approx = StepProfile::new(fine.snapshot(table.time).unwrap());
            let gap = w1_between(&*exact, &approx).unwrap();
            let coarsest = table.errors("w1").unwrap()[0].unwrap();
            assert!(gap < coarsest / 10.0, "t = {}: {gap} vs {coarsest}", table.time);
        }
    }
}
