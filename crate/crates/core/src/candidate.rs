//! The autocorrelation extremizer `f = (2^d/|Ω|) χ_{Ω/2} * χ_{Ω/2}` on a grid.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::torus::{autocorrelate, rasterize, GridFunction, TorusGrid};

/// Grid autocorrelation of the rasterized `Ω/2`, divided by its value at the
/// origin so that `f(0) = 1` exactly.
///
/// `h^-d (χ * χ)(x)` counts node pairs and is an integer, so the transform
/// noise is rounded away: nodes outside `Ω` get exact zeros.
pub fn turan_candidate(body: &ConvexBody, grid: &TorusGrid) -> Result<GridFunction> {
    if !body.fits_in_period(grid, 1.0) {
        return Err(Error::OutsidePeriod("the candidate needs Ω inside the period cube".into()));
    }
    let half = rasterize(&body.scale(0.5)?, grid)?;
    let count = half.sum();
    if count == 0.0 {
        return Err(Error::GridTooCoarse("Ω/2 contains no grid node".into()));
    }
    let ac = autocorrelate(&half)?;
    let w = grid.cell_volume();
    let mut f = ac.function;
    for v in f.values_mut() {
        *v = (*v / w).round() / count;
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateValue {
    pub value: f64,
    /// False when `|Ω|` came from grid counting.
    pub exact: bool,
}

/// `2^-d |Ω|`, from the exact volume when a formula exists and otherwise from
/// the grid count on `grid`.
pub fn candidate_value(body: &ConvexBody, grid: Option<&TorusGrid>) -> Result<CandidateValue> {
    let vol = body.volume(grid)?;
    let scale = 0.5f64.powi(body.dim() as i32);
    match vol.exact {
        Some(v) => Ok(CandidateValue { value: scale * v, exact: true }),
        None => {
            Ok(CandidateValue { value: scale * vol.grid_estimate.expect("volume has one of the two"), exact: false })
        }
    }
}

/// `|h^d Σ candidate - 2^-d |Ω||`.
pub fn candidate_gap(body: &ConvexBody, grid: &TorusGrid) -> Result<f64> {
    let f = turan_candidate(body, grid)?;
    let target = candidate_value(body, Some(grid))?.value;
    Ok((f.integral() - target).abs())
}
