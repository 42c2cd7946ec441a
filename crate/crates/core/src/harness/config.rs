use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::flux::{Flux, FluxDescriptor};
use crate::piecewise::{CellIntegrable, PiecewiseConstantFn};
use crate::{Error, Result};

/// Initial data of a refinement study. Step data are rescaled to unit mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialData {
    /// `2x` on `[0, 1)`.
    Wedge,
    /// `height` on `[-width, 0)`.
    DecreasingStep {
        #[serde(default = "one")]
        height: f64,
        #[serde(default = "one")]
        width: f64,
    },
    /// `values[i]` on `[i w, (i + 1) w)`.
    Staircase { values: Vec<f64>, width: f64 },
    /// `values[i]` on `[x0 + i dx, x0 + (i + 1) dx)`.
    Samples { x0: f64, dx: f64, values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl InitialData {
    /// The data as a step function, `None` for the wedge.
    pub fn steps(&self) -> Result<Option<PiecewiseConstantFn>> {
        let raw = match self {
            Self::Wedge => return Ok(None),
            Self::DecreasingStep { height, width } => PiecewiseConstantFn::indicator(-width, 0.0, *height)?,
            Self::Staircase { values, width } => PiecewiseConstantFn::from_cells(0.0, *width, values.clone())?,
            Self::Samples { x0, dx, values } => PiecewiseConstantFn::from_cells(*x0, *dx, values.clone())?,
        };
        if !raw.is_nonnegative() {
            return Err(Error::Config("initial data must be nonnegative".into()));
        }
        let m = raw.mass();
        if !(m > 0.0) {
            return Err(Error::Config("initial data must have positive mass".into()));
        }
        Ok(Some(raw.scale(1.0 / m)))
    }

    /// Validated form with precomputed statistics.
    pub fn prepare(&self) -> Result<PreparedData> {
        let steps = self.steps()?;
        let stats = match &steps {
            None => DataStats { sup: 2.0, total_variation: 4.0, lip_plus: 2.0, support_width: 1.0 },
            Some(u) => DataStats {
                sup: u.sup_abs(),
                total_variation: u.total_variation(),
                lip_plus: u.lip_plus(),
                support_width: u.support_width(),
            },
        };
        Ok(PreparedData { steps, stats })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataStats {
    pub sup: f64,
    pub total_variation: f64,
    pub lip_plus: f64,
    pub support_width: f64,
}

/// Initial data ready for projection.
#[derive(Debug, Clone)]
pub struct PreparedData {
    steps: Option<PiecewiseConstantFn>,
    stats: DataStats,
}

impl PreparedData {
    pub fn steps(&self) -> Option<&PiecewiseConstantFn> {
        self.steps.as_ref()
    }

    pub fn stats(&self) -> DataStats {
        self.stats
    }
}

impl CellIntegrable for PreparedData {
    fn primitive_at(&self, x: f64) -> f64 {
        match &self.steps {
            None => x.clamp(0.0, 1.0).powi(2),
            Some(u) => u.primitive_at(x),
        }
    }

    fn support(&self) -> Option<(f64, f64)> {
        match &self.steps {
            None => Some((0.0, 1.0)),
            Some(u) => u.support(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceMode {
    /// Closed form, or the Hopf–Lax formula for step data under a smooth flux.
    #[default]
    Analytic,
    /// Front tracking three levels below the finest.
    Fine,
}

/// A refinement study: levels `Δx = 2^{-k}`, `δ = λ Δx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub flux: FluxDescriptor,
    pub initial: InitialData,
    #[serde(default = "one")]
    pub lambda: f64,
    pub k_min: u32,
    pub k_max: u32,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Exponents of the `Wp` columns besides `W1` and `W∞`.
    #[serde(default = "default_ps")]
    pub p: Vec<f64>,
    #[serde(default)]
    pub reference: ReferenceMode,
    #[serde(default = "yes")]
    pub snap: bool,
    #[serde(default)]
    pub event_cap: Option<usize>,
    /// Per-run wall-clock budget in seconds.
    #[serde(default)]
    pub wall_clock_secs: Option<f64>,
}

fn default_times() -> Vec<f64> {
    vec![0.5, 2.0]
}

fn default_ps() -> Vec<f64> {
    vec![2.0, 4.0]
}

fn yes() -> bool {
    true
}

/// Finest level accepted; `2^{-26}` cells already stress the event queue.
pub const MAX_LEVEL: u32 = 26;

impl StudyConfig {
    /// Wedge data under Burgers' flux, analytic reference.
    pub fn wedge_burgers(k_min: u32, k_max: u32) -> Self {
        Self {
            flux: FluxDescriptor::Burgers,
            initial: InitialData::Wedge,
            lambda: 1.0,
            k_min,
            k_max,
            times: default_times(),
            p: default_ps(),
            reference: ReferenceMode::Analytic,
            snap: true,
            event_cap: None,
            wall_clock_secs: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.k_min >= self.k_max {
            return bad(format!("k_min = {} must be below k_max = {}", self.k_min, self.k_max));
        }
        let finest = self.k_max + if self.reference == ReferenceMode::Fine { 3 } else { 0 };
        if finest > MAX_LEVEL {
            return bad(format!("level {finest} exceeds the supported maximum {MAX_LEVEL}"));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda = {} must be positive", self.lambda));
        }
        if self.times.is_empty() {
            return bad("no evaluation times".into());
        }
        if let Some(t) = self.times.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return bad(format!("time {t} must be positive"));
        }
        if let Some(p) = self.p.iter().find(|p| !(**p >= 1.0)) {
            return bad(format!("exponent {p} must be at least 1"));
        }
        if let Some(s) = self.wall_clock_secs {
            if !(s > 0.0) {
                return bad(format!("wall-clock budget {s} must be positive"));
            }
        }
        let flux = self.flux()?;
        flux.conjugate()?;
        self.initial.prepare()?;
        Ok(())
    }

    pub fn flux(&self) -> Result<Flux> {
        Flux::try_from(self.flux.clone()).map_err(|e| Error::Config(e.to_string()))
    }

    /// Finite `p` strictly between 1 and ∞, sorted, without duplicates.
    pub fn wp_exponents(&self) -> Vec<f64> {
        let mut ps: Vec<f64> = self.p.iter().copied().filter(|p| *p > 1.0 && p.is_finite()).collect();
        ps.sort_by(f64::total_cmp);
        ps.dedup();
        ps
    }

    pub fn sorted_times(&self) -> Vec<f64> {
        let mut ts = self.times.clone();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_defaults() {
        let cfg = StudyConfig::from_json(
            r#"{"flux": {"type": "burgers"}, "initial": {"kind": "wedge"}, "k_min": 3, "k_max": 6}"#,
        )
        .unwrap();
        assert_eq!(cfg, StudyConfig::wedge_burgers(3, 6));
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(StudyConfig::from_json(&json).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = r#""flux": {"type": "burgers"}, "initial": {"kind": "wedge"}"#;
        for extra in [
            r#""k_min": 6, "k_max": 6"#,
            r#""k_min": 3, "k_max": 6, "lambda": 0"#,
            r#""k_min": 3, "k_max": 6, "times": [0.0]"#,
            r#""k_min": 3, "k_max": 6, "p": [0.5]"#,
            r#""k_min": 3, "k_max": 6, "bogus": 1"#,
            r#""k_min": 3, "k_max": 40"#,
        ] {
            let text = format!("{{{base}, {extra}}}");
            assert!(matches!(StudyConfig::from_json(&text), Err(Error::Config(_))), "{extra}");
        }
        let negative = r#"{"flux": {"type": "burgers"}, "initial": {"kind": "staircase", "values": [1, -1], "width": 0.5}, "k_min": 2, "k_max": 4}"#;
        assert!(StudyConfig::from_json(negative).is_err());
    }

    #[test]
    fn step_data_are_normalized() {
        let d = InitialData::Staircase { values: vec![3.0, 1.0], width: 0.5 };
        let u = d.steps().unwrap().unwrap();
        assert!((u.mass() - 1.0).abs() < 1e-15);
        assert_eq!(u.values(), &[1.5, 0.5]);
        let p = d.prepare().unwrap();
        assert_eq!(p.stats().lip_plus, f64::INFINITY);
        assert!((p.primitive_at(1.0) - 1.0).abs() < 1e-15);
        let w = InitialData::Wedge.prepare().unwrap();
        assert_eq!(w.stats().total_variation, 4.0);
        assert_eq!(w.primitive_at(0.5), 0.25);
    }
}
