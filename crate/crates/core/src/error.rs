use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid piecewise function: {0}")]
    InvalidFunction(String),

    #[error("function is not nondecreasing (slope {slope} on segment starting at x = {at})")]
    NotMonotone { at: f64, slope: f64 },

    #[error("grid spacing must be positive, got {0}")]
    NonPositiveSpacing(f64),

    #[error("masses differ: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },

    #[error("negative density {value} on the cell starting at x = {at}")]
    NegativeDensity { at: f64, value: f64 },

    #[error("transport exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("flux is not convex: {0}")]
    NotConvex(String),

    #[error("invalid flux: {0}")]
    InvalidFlux(String),

    #[error("state {0} is not a node of the piecewise-linear flux")]
    OffLattice(f64),

    #[error("Riemann problem with equal states {0}")]
    TrivialRiemann(f64),

    #[error("event cap of {0} interactions exceeded")]
    EventCap(usize),

    #[error("wall-clock budget exceeded after {events} interactions")]
    Timeout { events: usize },

    #[error("time {t} outside [0, {t_end}]")]
    TimeOutOfRange { t: f64, t_end: f64 },

    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),

    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("quantile level {gamma} outside [0, {mass}]")]
    LevelOutOfRange { gamma: f64, mass: f64 },

    #[error("the two evolutions use different fluxes")]
    FluxMismatch,

    #[error("the two evolutions start from different initial data")]
    InitialDataMismatch,

    #[error("density profile does not expose {0}")]
    Unsupported(&'static str),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
