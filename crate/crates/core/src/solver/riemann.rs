use serde::{Deserialize, Serialize};

use crate::flux::PlFlux;
use crate::{Error, Result};

/// One wave of a Riemann fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub left: f64,
    pub right: f64,
    pub speed: f64,
}

/// Entropy solution of a Riemann problem for a convex piecewise-linear flux:
/// waves ordered left to right with strictly increasing speeds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RiemannFan {
    pub waves: Vec<Wave>,
}

impl RiemannFan {
    /// Fan for arbitrary states. A downward jump is a single shock; an upward
    /// jump splits at every kink strictly between the states.
    pub fn solve(flux: &PlFlux, ul: f64, ur: f64) -> Self {
        if ul == ur {
            return Self::default();
        }
        if ul > ur {
            return Self { waves: vec![Wave { left: ul, right: ur, speed: flux.chord(ul, ur) }] };
        }
        let mut states = vec![ul];
        states.extend(flux.kinks_between(ul, ur));
        states.push(ur);
        let waves = states
            .windows(2)
            .map(|w| Wave { left: w[0], right: w[1], speed: flux.chord(w[0], w[1]) })
            .collect();
        Self { waves }
    }

    pub fn len(&self) -> usize {
        self.waves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }
}

/// Riemann problem between two distinct lattice states.
pub fn solve_riemann(flux: &PlFlux, ul: f64, ur: f64) -> Result<RiemannFan> {
    for u in [ul, ur] {
        if !flux.is_node(u) {
            return Err(Error::OffLattice(u));
        }
    }
    if ul == ur {
        return Err(Error::TrivialRiemann(ul));
    }
    Ok(RiemannFan::solve(flux, ul, ur))
}
