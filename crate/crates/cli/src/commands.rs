use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use shockfront::flux::interpolate_flux;
use shockfront::harness::{path_for_time, render, run_study, Format};
use shockfront::piecewise::project_to_grid;
use shockfront::solver::{run, solve_riemann, SnapReport};
use shockfront::{DistanceReport, Error, Flux, FluxDescriptor, PiecewiseConstantFn, RiemannFan, RunOptions, StudyConfig};

/// Exit code of `convergence` when some level failed.
pub const EXIT_FAILED_LEVEL: u8 = 2;
/// Exit code of `convergence` for an unusable configuration.
pub const EXIT_CONFIG: u8 = 3;

/// Input of `solve`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub flux: FluxDescriptor,
    /// Step function in the `{"kind":"pc", ...}` form.
    pub initial: PiecewiseConstantFn,
    /// Interpolation spacing, required unless the flux is already piecewise linear.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Average the initial data over cells of this width first.
    #[serde(default)]
    pub dx: Option<f64>,
    #[serde(default = "yes")]
    pub snap: bool,
    #[serde(default)]
    pub event_cap: Option<usize>,
    #[serde(default)]
    pub wall_clock_secs: Option<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Serialize)]
struct Snapshot {
    t: f64,
    fronts: usize,
    u: PiecewiseConstantFn,
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    flux: FluxDescriptor,
    snapped: bool,
    snap: SnapReport,
    event_count: usize,
    final_front_count: usize,
    snapshots: Vec<Snapshot>,
}

pub fn parse_exponent(s: &str) -> std::result::Result<f64, String> {
    match s.trim() {
        "inf" | "Inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse().map_err(|e| format!("bad exponent {t:?}: {e}")),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_out(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Piecewise-linear version of `flux`; smooth fluxes need `delta`.
fn lattice_flux(flux: Flux, delta: Option<f64>, range: f64) -> Result<Flux> {
    match (&flux, delta) {
        (Flux::PiecewiseLinear(_), _) => Ok(flux),
        (_, Some(d)) => Ok(interpolate_flux(&flux, d, range)?),
        (_, None) => bail!("a smooth flux needs a node spacing (delta)"),
    }
}

pub fn solve(config: &Path, times: &[f64], output: Option<&Path>, no_snap: bool) -> Result<()> {
    let cfg: SolveConfig = read_json(config)?;
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        bail!("snapshot time {t} must be finite and nonnegative");
    }
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let u0 = match cfg.dx {
        Some(dx) => project_to_grid(&cfg.initial, dx)?,
        None => cfg.initial,
    };
    let flux = lattice_flux(Flux::try_from(cfg.flux)?, cfg.delta, u0.sup_abs())?;
    let pl = flux.as_pl().expect("lattice flux is piecewise linear");
    let mut opts = RunOptions { snap: cfg.snap && !no_snap, ..RunOptions::default() };
    if let Some(cap) = cfg.event_cap {
        opts.event_cap = cap;
    }
    opts.wall_clock = cfg.wall_clock_secs.map(Duration::from_secs_f64);
    let r = run(&u0, pl, t_end, &opts)?;
    let snapshots = times
        .iter()
        .map(|&t| Ok(Snapshot { t, fronts: r.front_count(t)?, u: r.snapshot(t)? }))
        .collect::<shockfront::Result<Vec<_>>>()?;
    let out = SolveOutput {
        flux: FluxDescriptor::from(&flux),
        snapped: opts.snap,
        snap: r.snap_report(),
        event_count: r.event_count(),
        final_front_count: r.front_count(t_end)?,
        snapshots,
    };
    write_out(&(serde_json::to_string_pretty(&out)? + "\n"), output)
}

pub fn riemann(flux: &Path, ul: f64, ur: f64, delta: Option<f64>) -> Result<()> {
    let desc: FluxDescriptor = read_json(flux)?;
    let flux = lattice_flux(Flux::try_from(desc)?, delta, ul.abs().max(ur.abs()))?;
    let pl = flux.as_pl().expect("lattice flux is piecewise linear");
    let fan: RiemannFan = solve_riemann(pl, ul, ur)?;
    println!("{}", serde_json::to_string_pretty(&fan)?);
    Ok(())
}

pub fn distance(a: &Path, b: &Path, ps: &[f64]) -> Result<()> {
    let u: PiecewiseConstantFn = read_json(a)?;
    let v: PiecewiseConstantFn = read_json(b)?;
    let report = DistanceReport::compute(&u, &v, ps)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

pub fn convergence(config: &Path, format: Format, out: Option<&Path>) -> ExitCode {
    let cfg = match StudyConfig::load(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let tables = match run_study(&cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config(_) => EXIT_CONFIG,
                Error::EventCap(_) | Error::Timeout { .. } => EXIT_FAILED_LEVEL,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };
    if let Err(e) = write_tables(&tables, format, out) {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    for t in tables.iter().filter(|t| t.any_failed()) {
        for row in t.rows.iter().filter(|r| r.failure.is_some()) {
            eprintln!("level k = {} failed at t = {}: {}", row.k, t.time, row.failure.as_deref().unwrap_or(""));
        }
    }
    if tables.iter().any(|t| t.any_failed()) {
        ExitCode::from(EXIT_FAILED_LEVEL)
    } else {
        ExitCode::SUCCESS
    }
}

fn write_tables(tables: &[shockfront::EocTable], format: Format, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) if tables.len() == 1 => write_out(&render(&tables[0], format)?, Some(path)),
        Some(path) => {
            for t in tables {
                write_out(&render(t, format)?, Some(&path_for_time(path, t.time)))?;
            }
            Ok(())
        }
        None => {
            let text = match format {
                Format::Json => serde_json::to_string_pretty(tables)? + "\n",
                Format::Csv => {
                    let blocks: Vec<String> = tables.iter().map(|t| format!("# t = {}\n{}", t.time, t.to_csv())).collect();
                    blocks.join("\n")
                }
            };
            write_out(&text, None)
        }
    }
}
