//! Rotation averaging in the plane, the autocorrelation inequality chain, and
//! the disk version of the Turán check.

use serde::Serialize;
use std::f64::consts::PI;

use crate::candidate::turan_candidate;
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::solver::{solve_turan, SolveStatus, TuranProblem};
use crate::torus::{autocorrelate, min_spectrum, Domain, GridFunction, TorusGrid};

pub const DEFAULT_ANGLES: usize = 64;

// Bilinear interpolation at a point given in grid units; zero outside the
// period cube, since rotating a corner node leaves the cube.
fn bilinear(f: &GridFunction, u: f64, v: f64) -> f64 {
    let grid = f.grid();
    let half = (grid.n() / 2) as i64;
    let (i0, j0) = (u.floor(), v.floor());
    let (a, b) = (u - i0, v - j0);
    let (i0, j0) = (i0 as i64, j0 as i64);
    let inside = |k: i64| (-half..half).contains(&k);
    let at = |i: i64, j: i64| if inside(i) && inside(j) { f.values()[grid.flat(&[i, j])] } else { 0.0 };
    (1.0 - a) * ((1.0 - b) * at(i0, j0) + b * at(i0, j0 + 1))
        + a * ((1.0 - b) * at(i0 + 1, j0) + b * at(i0 + 1, j0 + 1))
}

/// Mean of `f∘R_θ` over `θ = 2πj/n_angles`, sampled by bilinear
/// interpolation.
///
/// Node 0 is a fixed point of every rotation, so `f(0)` is kept exactly.
pub fn radialize(f: &GridFunction, n_angles: usize) -> Result<GridFunction> {
    let grid = *f.grid();
    if grid.dim() != 2 {
        return Err(Error::Unsupported(format!("rotation averaging is planar, got d = {}", grid.dim())));
    }
    if f.domain() != Domain::Space {
        return Err(Error::WrongDomain { expected: "space" });
    }
    if !f.is_symmetric() {
        let (index, deviation) = f.asymmetry();
        return Err(Error::Asymmetric { index, deviation });
    }
    if n_angles == 0 {
        return Err(Error::InvalidGrid("need at least one rotation".into()));
    }
    let rotations: Vec<(f64, f64)> = (0..n_angles).map(|j| (2.0 * PI * j as f64 / n_angles as f64).sin_cos()).collect();
    let mut out = GridFunction::zeros(grid, Domain::Space);
    for i in 0..grid.len() {
        let k = grid.index(i);
        let (x, y) = (k[0] as f64, k[1] as f64);
        let sum: f64 = rotations.iter().map(|(s, c)| bilinear(f, c * x - s * y, s * x + c * y)).sum();
        out.values_mut()[i] = sum / n_angles as f64;
    }
    let sym: Vec<f64> = (0..grid.len()).map(|i| 0.5 * (out.values()[i] + out.values()[grid.negate(i)])).collect();
    out.values_mut().copy_from_slice(&sym);
    out.values_mut()[grid.origin()] = f.at_origin();
    Ok(out)
}

/// `max |radialize(f) - f|`.
pub fn radial_fixed_point_error(f: &GridFunction, n_angles: usize) -> Result<f64> {
    let r = radialize(f, n_angles)?;
    Ok(r.values().iter().zip(f.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainReport {
    /// `h^d Σ (g * g̃)`.
    pub a: f64,
    /// `|h^d Σ g|²`; equals `a` up to rounding.
    pub a_identity: f64,
    /// `|K| h^d Σ g²`.
    pub b: f64,
    /// `2^-d |K - K| h^d Σ g²` with `|K - K| = 2^d |K|`.
    pub c: f64,
    /// Cauchy–Schwarz bound with the node count of `K` in place of `|K|`.
    pub b_grid: f64,
    pub holds: bool,
}

/// `∫ g*g̃ = |∫g|² <= |K| ∫|g|² = 2^-d |K-K| ∫|g|²` for `g` supported in `K`.
pub fn chain_check(g: &GridFunction, body: &ConvexBody) -> Result<ChainReport> {
    let grid = *g.grid();
    if body.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: body.dim() });
    }
    if let Some(i) = (0..grid.len()).find(|&i| g.values()[i] != 0.0 && !body.member(&grid.node(i))) {
        return Err(Error::SupportViolation(format!("g is nonzero at {:?}, outside K", grid.index(i))));
    }
    let w = grid.cell_volume();
    let a = autocorrelate(g)?.function.integral();
    let a_identity = g.integral().powi(2);
    let l2 = w * g.values().iter().map(|v| v * v).sum::<f64>();
    let vol = body.volume(Some(&grid))?.best().expect("grid estimate present");
    let b = vol * l2;
    let difference_body = 2f64.powi(body.dim() as i32) * vol;
    let c = 0.5f64.powi(body.dim() as i32) * difference_body * l2;
    let nodes = (0..grid.len()).filter(|&i| body.member(&grid.node(i))).count();
    let b_grid = nodes as f64 * w * l2;
    let slack = 1e-12 * b.max(1e-300);
    let holds = (a - a_identity).abs() <= 1e-9 * a_identity.max(1.0) && a <= b + slack && b <= c + slack;
    Ok(ChainReport { a, a_identity, b, c, b_grid, holds })
}

#[derive(Debug, Clone, Serialize)]
pub struct BallReport {
    pub period: f64,
    pub n: usize,
    pub value: f64,
    pub ratio: f64,
    pub target: f64,
    pub status: SolveStatus,
    pub radial_value: f64,
    pub radial_value_change: f64,
    pub radial_min_spectrum: f64,
    pub radial_support_ok: bool,
    pub radial_pd_ok: bool,
    pub candidate_fixed_point_error: f64,
    #[serde(skip)]
    pub optimum: GridFunction,
    #[serde(skip)]
    pub radial: GridFunction,
}

/// Solves the unit-disk problem, then checks that the rotation average of the
/// optimum stays feasible and keeps its value.
pub fn ball_turan_check(period: f64, n: usize, n_angles: usize) -> Result<BallReport> {
    let grid = TorusGrid::new(2, n, period)?;
    let disk = ConvexBody::ball(2, 1.0)?;
    let problem = TuranProblem::new(disk.clone(), grid)?;
    let s = solve_turan(&problem)?;
    let r = radialize(&s.f, n_angles)?;
    let radial_value = r.integral();
    let radial_min_spectrum = min_spectrum(&r)?.value;
    let reach = 1.0 + grid.spacing() * 2f64.sqrt();
    let radial_support_ok = (0..grid.len())
        .all(|i| r.values()[i].abs() <= 1e-12 || grid.node(i).iter().map(|x| x * x).sum::<f64>().sqrt() <= reach);
    let cand = turan_candidate(&disk, &grid)?;
    Ok(BallReport {
        period,
        n,
        value: s.value,
        ratio: s.ratio,
        target: s.candidate_value,
        status: s.status,
        radial_value,
        radial_value_change: (radial_value - s.value).abs() / s.value,
        radial_min_spectrum,
        radial_support_ok,
        radial_pd_ok: radial_min_spectrum >= -1e-6,
        candidate_fixed_point_error: radial_fixed_point_error(&cand, n_angles)?,
        optimum: s.f,
        radial: r,
    })
}
