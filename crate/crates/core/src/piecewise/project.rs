use super::PiecewiseConstantFn;
use crate::{Error, Result};

/// Integrable data with an exact antiderivative, so cell averages are exact.
pub trait CellIntegrable {
    /// `∫_{-∞}^x u₀`.
    fn primitive_at(&self, x: f64) -> f64;

    /// Closed interval containing the support, `None` for the zero function.
    fn support(&self) -> Option<(f64, f64)>;
}

impl CellIntegrable for PiecewiseConstantFn {
    fn primitive_at(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (a, b, v) in self.cells() {
            if x <= a {
                break;
            }
            acc += v * (x.min(b) - a);
        }
        acc
    }

    fn support(&self) -> Option<(f64, f64)> {
        PiecewiseConstantFn::support(self)
    }
}

/// Cell averages on `[(i - ½)Δx, (i + ½)Δx)`, the grid centred on the integers.
pub fn project_to_grid<F: CellIntegrable + ?Sized>(u0: &F, dx: f64) -> Result<PiecewiseConstantFn> {
    project_to_grid_offset(u0, dx, 0.0)
}

/// Cell averages on `[c + (i - ½)Δx, c + (i + ½)Δx)`.
///
/// `offset = Δx / 2` gives cells with edges on the integer multiples of `Δx`.
pub fn project_to_grid_offset<F: CellIntegrable + ?Sized>(
    u0: &F,
    dx: f64,
    offset: f64,
) -> Result<PiecewiseConstantFn> {
    if !(dx > 0.0) || !dx.is_finite() {
        return Err(Error::NonPositiveSpacing(dx));
    }
    let Some((a, b)) = u0.support() else {
        return Ok(PiecewiseConstantFn::zero());
    };
    // cells overlapping the support by less than EDGE_SLACK·Δx are rounding artefacts
    const EDGE_SLACK: f64 = 1e-9;
    let i_lo = ((a - offset) / dx - 0.5 + EDGE_SLACK).floor() as i64 + 1;
    let i_hi = ((b - offset) / dx + 0.5 - EDGE_SLACK).ceil() as i64 - 1;
    if i_hi < i_lo {
        return Ok(PiecewiseConstantFn::zero());
    }
    let edge = |i: i64| offset + (i as f64 - 0.5) * dx;
    let breakpoints: Vec<f64> = (i_lo..=i_hi + 1).map(edge).collect();
    let mut primitives: Vec<f64> = breakpoints.iter().map(|&x| u0.primitive_at(x)).collect();
    // the outer edges enclose the whole support, so the telescoped mass is exact
    let n = primitives.len() - 1;
    primitives[0] = u0.primitive_at(a);
    primitives[n] = u0.primitive_at(b);
    let values = primitives.windows(2).map(|w| (w[1] - w[0]) / dx).collect();
    PiecewiseConstantFn::new(breakpoints, values)
}
