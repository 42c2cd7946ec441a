//! Refinement studies: exact references, configuration, observed orders.
//!
//! A study projects the initial data onto grids `Δx = 2^{-k}`, runs front
//! tracking with the flux interpolated at `δ = λΔx` and measures the error
//! against a reference in `L1`, `W1`, `Wp` and `W∞`. Levels run in parallel;
//! results are ordered by level, so the output does not depend on scheduling.

mod config;
mod eoc;
mod exact;
mod study;

pub use config::{DataStats, InitialData, PreparedData, ReferenceMode, StudyConfig, MAX_LEVEL};
pub use eoc::{emit, eoc, fmt_float, path_for_time, render, Eoc, EocRow, EocTable, Format, EOC_FLOOR, SLOPE_LEVELS};
pub use exact::{
    exact_shock_burgers, exact_wedge_burgers, wedge_shock_position, ExactWedge, ShockSolution, WedgeProfile,
};
pub use study::{
    level_errors, metric_columns, reference, run_level, run_study, Level, RateConstants, Reference, THREADS_ENV,
};
