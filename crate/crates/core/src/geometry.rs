//! Symmetric convex bodies and lattices.
//!
//! A [`ConvexBody`] is origin-symmetric, bounded, and has the origin in its
//! interior. Membership uses the closed body. Polytopes are stored with one
//! row per `±` pair of half-spaces, so every materialized polytope is
//! symmetric by construction.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplex::{DualSimplex, SimplexOptions};
use crate::torus::TorusGrid;

/// Relative slack used by closed-body membership.
pub const BOUNDARY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Box {
        halfwidths: Vec<f64>,
    },
    Ball {
        radius: f64,
    },
    /// Rows `|a_i·x| <= b_i`, one entry per `±` pair.
    HPolytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexBody {
    dim: usize,
    shape: Shape,
    /// Half-widths of the smallest axis-aligned box containing the body.
    extent: Vec<f64>,
}

/// Exact and grid-counted volume of a body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Volume {
    pub exact: Option<f64>,
    pub grid_estimate: Option<f64>,
}

impl Volume {
    /// The exact value when known, otherwise the grid estimate.
    pub fn best(&self) -> Option<f64> {
        self.exact.or(self.grid_estimate)
    }
}

/// Where a point sits relative to a closed body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Interior,
    Boundary,
    Exterior,
}

/// Volume of the Euclidean unit ball in `dim` dimensions.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(dim - 2) * 2.0 * std::f64::consts::PI / dim as f64,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl ConvexBody {
    pub fn boxed(halfwidths: Vec<f64>) -> Result<Self> {
        if halfwidths.is_empty() {
            return Err(Error::InvalidBody("box needs at least one axis".into()));
        }
        if let Some(w) = halfwidths.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidBody(format!("box half-width {w} must be positive")));
        }
        Ok(ConvexBody { dim: halfwidths.len(), extent: halfwidths.clone(), shape: Shape::Box { halfwidths } })
    }

    /// The cube `[-halfwidth, halfwidth]^dim`.
    pub fn cube(dim: usize, halfwidth: f64) -> Result<Self> {
        Self::boxed(vec![halfwidth; dim])
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBody("ball needs dimension >= 1".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidBody(format!("ball radius {radius} must be positive")));
        }
        Ok(ConvexBody { dim, shape: Shape::Ball { radius }, extent: vec![radius; dim] })
    }

    /// Polytope `{x : a_i·x <= b_i}` from rows `(a_i, b_i)`. The mirrored row
    /// `(-a_i, b_i)` is implied; rows duplicating an existing pair are dropped.
    /// Unbounded row sets are rejected.
    pub fn hpolytope(rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let dim = rows.first().map(|r| r.0.len()).ok_or_else(|| Error::InvalidBody("polytope needs rows".into()))?;
        if dim == 0 {
            return Err(Error::InvalidBody("polytope rows need at least one coefficient".into()));
        }
        let mut normals: Vec<Vec<f64>> = Vec::new();
        let mut offsets: Vec<f64> = Vec::new();
        for (i, (a, b)) in rows.into_iter().enumerate() {
            if a.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: a.len() });
            }
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::InvalidBody(format!("row {i}: offset {b} must be positive")));
            }
            let an = norm(&a);
            if !(an.is_finite() && an > 0.0) {
                return Err(Error::InvalidBody(format!("row {i}: normal must be non-zero and finite")));
            }
            let duplicate = normals.iter().zip(&offsets).any(|(n, c)| {
                let same = n.iter().zip(&a).all(|(p, q)| (p / c - q / b).abs() <= 1e-12 * (an / b));
                let mirrored = n.iter().zip(&a).all(|(p, q)| (p / c + q / b).abs() <= 1e-12 * (an / b));
                same || mirrored
            });
            if !duplicate {
                normals.push(a);
                offsets.push(b);
            }
        }
        let extent = polytope_extent(&normals, &offsets)?;
        Ok(ConvexBody { dim, shape: Shape::HPolytope { normals, offsets }, extent })
    }

    /// Random symmetric polygon with `pairs` edge pairs. Normal angles take
    /// one jittered slot each in `[0, π)` and offsets are uniform in
    /// `[1/2, 1]`. Neighbouring normals stay less than `π` apart, so the
    /// polygon is bounded.
    pub fn random_symmetric_polygon<R: Rng + ?Sized>(rng: &mut R, pairs: usize) -> Result<Self> {
        if pairs < 2 {
            return Err(Error::InvalidBody(format!("a bounded polygon needs at least 2 edge pairs, got {pairs}")));
        }
        let slot = std::f64::consts::PI / pairs as f64;
        let rows = (0..pairs)
            .map(|j| {
                let t = (j as f64 + 0.25 + 0.5 * rng.gen::<f64>()) * slot;
                (vec![t.cos(), t.sin()], rng.gen_range(0.5..=1.0))
            })
            .collect();
        Self::hpolytope(rows)
    }

    /// Regular polygon with an even number of sides and the given
    /// circumradius; one vertex sits on the positive x axis.
    pub fn regular_polygon(sides: usize, circumradius: f64) -> Result<Self> {
        if sides < 4 || !sides.is_multiple_of(2) {
            return Err(Error::InvalidBody(format!("regular polygon needs an even side count >= 4, got {sides}")));
        }
        let step = std::f64::consts::PI * 2.0 / sides as f64;
        let apothem = circumradius * (step / 2.0).cos();
        let rows = (0..sides / 2)
            .map(|k| {
                let t = step / 2.0 + k as f64 * step;
                (vec![t.cos(), t.sin()], apothem)
            })
            .collect();
        Self::hpolytope(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent
    }

    /// All half-space rows `(a, b)` including both members of each pair.
    pub fn halfspaces(&self) -> Vec<(Vec<f64>, f64)> {
        match &self.shape {
            Shape::HPolytope { normals, offsets } => normals
                .iter()
                .zip(offsets)
                .flat_map(|(a, &b)| [(a.clone(), b), (a.iter().map(|v| -v).collect(), b)])
                .collect(),
            Shape::Box { halfwidths } => (0..self.dim)
                .flat_map(|j| {
                    let mut e = vec![0.0; self.dim];
                    e[j] = 1.0;
                    let neg: Vec<f64> = e.iter().map(|v| -v).collect();
                    [(e, halfwidths[j]), (neg, halfwidths[j])]
                })
                .collect(),
            Shape::Ball { .. } => Vec::new(),
        }
    }

    /// Minkowski functional: the least `t >= 0` with `x ∈ tΩ`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Box { halfwidths } => x.iter().zip(halfwidths).map(|(v, w)| ratio(v.abs(), *w)).fold(0.0, f64::max),
            Shape::Ball { radius } => ratio(norm(x), *radius),
            Shape::HPolytope { normals, offsets } => {
                normals.iter().zip(offsets).map(|(a, b)| ratio(dot(a, x).abs(), *b)).fold(0.0, f64::max)
            }
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Membership in the closed body.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.member(x))
    }

    pub(crate) fn member(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0 + BOUNDARY_EPS
    }

    /// Classifies `x` as interior, boundary (within `tol` of the boundary in
    /// gauge), or exterior.
    pub fn placement(&self, x: &[f64], tol: f64) -> Result<Placement> {
        self.check_dim(x)?;
        let g = self.gauge(x);
        Ok(if (g - 1.0).abs() <= tol {
            Placement::Boundary
        } else if g < 1.0 {
            Placement::Interior
        } else {
            Placement::Exterior
        })
    }

    /// The body `tΩ`. `t = 0` gives the single point `{0}`.
    pub fn scale(&self, t: f64) -> Result<ConvexBody> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::NegativeScale(t));
        }
        let shape = match &self.shape {
            Shape::Box { halfwidths } => Shape::Box { halfwidths: halfwidths.iter().map(|w| t * w).collect() },
            Shape::Ball { radius } => Shape::Ball { radius: t * radius },
            Shape::HPolytope { normals, offsets } => {
                Shape::HPolytope { normals: normals.clone(), offsets: offsets.iter().map(|b| t * b).collect() }
            }
        };
        Ok(ConvexBody { dim: self.dim, shape, extent: self.extent.iter().map(|e| t * e).collect() })
    }

    /// `dist{0, Ω^c}`.
    pub fn inradius(&self) -> f64 {
        match &self.shape {
            Shape::Box { halfwidths } => halfwidths.iter().copied().fold(f64::INFINITY, f64::min),
            Shape::Ball { radius } => *radius,
            Shape::HPolytope { normals, offsets } => {
                normals.iter().zip(offsets).map(|(a, b)| b / norm(a)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// True when `factor·Ω` lies inside the closed period cube of `grid`.
    pub fn fits_in_closed_period(&self, grid: &TorusGrid, factor: f64) -> bool {
        let half = grid.period() / 2.0;
        self.dim == grid.dim() && self.extent.iter().all(|e| factor * e <= half * (1.0 + 1e-12))
    }

    /// True when `factor·Ω` lies strictly inside the open period cube of `grid`.
    pub fn fits_in_period(&self, grid: &TorusGrid, factor: f64) -> bool {
        let half = grid.period() / 2.0;
        self.dim == grid.dim() && self.extent.iter().all(|e| factor * e < half * (1.0 - 1e-12))
    }

    /// Vertices of a planar body in counter-clockwise order (polygons only).
    pub fn polygon_vertices(&self) -> Option<Vec<[f64; 2]>> {
        if self.dim != 2 || matches!(self.shape, Shape::Ball { .. }) {
            return None;
        }
        let e = 2.0 * self.extent.iter().copied().fold(0.0, f64::max) + 1.0;
        let mut poly = vec![[-e, -e], [e, -e], [e, e], [-e, e]];
        for (a, b) in self.halfspaces() {
            poly = clip(&poly, [a[0], a[1]], b);
            if poly.is_empty() {
                break;
            }
        }
        Some(poly)
    }

    pub fn exact_volume(&self) -> Option<f64> {
        match &self.shape {
            Shape::Box { halfwidths } => Some(halfwidths.iter().map(|w| 2.0 * w).product()),
            Shape::Ball { radius } => Some(unit_ball_volume(self.dim) * radius.powi(self.dim as i32)),
            Shape::HPolytope { .. } if self.dim == 1 => Some(2.0 * self.extent[0]),
            Shape::HPolytope { .. } if self.dim == 2 => self.polygon_vertices().map(|v| shoelace(&v)),
            Shape::HPolytope { .. } => None,
        }
    }

    /// Node count of the body on `grid` times the cell volume.
    pub fn grid_volume(&self, grid: &TorusGrid) -> Result<f64> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: grid.dim() });
        }
        let count = (0..grid.len()).filter(|&i| self.member(&grid.node(i))).count();
        Ok(count as f64 * grid.cell_volume())
    }

    /// Exact volume where a formula exists, and the grid estimate when a grid
    /// is supplied. Fails only when neither is available.
    pub fn volume(&self, grid: Option<&TorusGrid>) -> Result<Volume> {
        let exact = self.exact_volume();
        let grid_estimate = match grid {
            Some(g) => {
                if !self.fits_in_period(g, 1.0) {
                    return Err(Error::OutsidePeriod("volume estimate needs the body inside the period".into()));
                }
                Some(self.grid_volume(g)?)
            }
            None => None,
        };
        if exact.is_none() && grid_estimate.is_none() {
            return Err(Error::NoVolume(format!(
                "no exact formula for a {}-dimensional polytope and no grid",
                self.dim
            )));
        }
        Ok(Volume { exact, grid_estimate })
    }
}

// Max of x_j over the polytope for every axis, by LP. An optimum pinned to the
// artificial box means the rows do not bound that direction.
fn polytope_extent(normals: &[Vec<f64>], offsets: &[f64]) -> Result<Vec<f64>> {
    let dim = normals[0].len();
    let reach = normals.iter().zip(offsets).map(|(a, b)| b / norm(a)).fold(0.0, f64::max);
    let big = 1e6 * reach.max(1.0);
    let mut extent = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut cost = vec![0.0; dim];
        cost[j] = 1.0;
        let mut lp = DualSimplex::new(cost, vec![-big; dim], vec![big; dim], SimplexOptions::default())?;
        for (a, &b) in normals.iter().zip(offsets) {
            lp.add_row(a, b)?;
            let neg: Vec<f64> = a.iter().map(|v| -v).collect();
            lp.add_row(&neg, b)?;
        }
        lp.solve()?;
        let top = lp.objective();
        if top > 0.5 * big {
            return Err(Error::InvalidBody(format!("polytope is unbounded along axis {j}")));
        }
        extent.push(top);
    }
    Ok(extent)
}

// Sutherland-Hodgman step against a·x <= b.
fn clip(poly: &[[f64; 2]], a: [f64; 2], b: f64) -> Vec<[f64; 2]> {
    let side = |p: &[f64; 2]| a[0] * p[0] + a[1] * p[1] - b;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (sp, sq) = (side(&p), side(&q));
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

pub fn shoelace(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (p, q) = (vertices[i], vertices[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    twice.abs() / 2.0
}

/// Grid check of `dist{αΩ, (βΩ)^c} = r(β-α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceLemma {
    pub numeric: f64,
    pub predicted: f64,
    pub residual: f64,
}

/// Compares the grid distance between `αΩ` and the complement of `βΩ` with
/// `inradius·(β-α)`. Only boundary layers of both node sets are scanned: a
/// closest pair always has an axis neighbour on the other side of its set.
pub fn distance_lemma_residual(body: &ConvexBody, alpha: f64, beta: f64, grid: &TorusGrid) -> Result<DistanceLemma> {
    if alpha < 0.0 {
        return Err(Error::NegativeScale(alpha));
    }
    if alpha > beta {
        return Err(Error::AlphaExceedsBeta { alpha, beta });
    }
    if !body.fits_in_period(grid, beta) {
        return Err(Error::OutsidePeriod(format!("{beta}·Ω exceeds the period cube")));
    }
    let inner = body.scale(alpha)?;
    let outer = body.scale(beta)?;
    let nodes: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.node(i)).collect();
    let in_inner: Vec<bool> = nodes.iter().map(|x| inner.member(x)).collect();
    let in_outer: Vec<bool> = nodes.iter().map(|x| outer.member(x)).collect();
    let layer = |mask: &[bool], want: bool| -> Vec<usize> {
        (0..grid.len()).filter(|&i| mask[i] == want && grid.axis_neighbours(i).any(|k| mask[k] != want)).collect()
    };
    let p_layer = layer(&in_inner, true);
    let q_layer = layer(&in_outer, false);
    let mut best = f64::INFINITY;
    for &p in &p_layer {
        for &q in &q_layer {
            let d2: f64 = nodes[p].iter().zip(&nodes[q]).map(|(a, b)| (a - b) * (a - b)).sum();
            best = best.min(d2);
        }
    }
    let numeric = best.sqrt();
    let predicted = body.inradius() * (beta - alpha);
    Ok(DistanceLemma { numeric, predicted, residual: (numeric - predicted).abs() })
}

/// Full-rank lattice `G·Z^d`; the columns of `G` are the basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    generator: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det: f64,
}

impl Lattice {
    pub fn new(generator: DMatrix<f64>) -> Result<Self> {
        if !generator.is_square() || generator.nrows() == 0 {
            return Err(Error::InvalidLattice("generator must be a non-empty square matrix".into()));
        }
        if generator.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidLattice("generator has non-finite entries".into()));
        }
        let det = generator.determinant().abs();
        let scale: f64 = generator.column_iter().map(|c| c.norm()).product();
        if det.is_nan() || det <= 1e-12 * scale || scale == 0.0 {
            return Err(Error::InvalidLattice(format!("generator is singular (|det| = {det:e})")));
        }
        let inverse =
            generator.clone().try_inverse().ok_or_else(|| Error::InvalidLattice("generator is singular".into()))?;
        Ok(Lattice { generator, inverse, det })
    }

    /// Lattice spanned by the given basis vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let d = columns.len();
        if columns.iter().any(|c| c.len() != d) {
            return Err(Error::InvalidLattice("need d basis vectors of length d".into()));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| columns[j][i]))
    }

    /// Column-major generator entries.
    pub fn from_column_major(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidLattice(format!(
                "expected {} generator entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_column_slice(dim, dim, entries))
    }

    pub fn integer(dim: usize) -> Self {
        Self::scaled_integer(dim, 1.0).expect("identity is regular")
    }

    /// `s·Z^d`.
    pub fn scaled_integer(dim: usize, s: f64) -> Result<Self> {
        Self::new(DMatrix::from_diagonal_element(dim, dim, s))
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.generator.column(j).iter().copied().collect()
    }

    pub fn determinant(&self) -> f64 {
        self.det
    }

    /// `Λ* = {x : <x, λ> ∈ Z for all λ ∈ Λ}`, generated by `G^{-T}`.
    pub fn dual(&self) -> Result<Lattice> {
        Lattice::new(self.inverse.transpose())
    }

    /// Points per unit volume, `1/|det G|`.
    pub fn density(&self) -> f64 {
        1.0 / self.det
    }

    pub fn point(&self, coeffs: &[i64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.generator[(i, j)] * coeffs[j] as f64).sum()).collect()
    }

    /// Coordinates of `x` in the lattice basis, `G^{-1} x`.
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.inverse[(i, j)] * x[j]).sum()).collect()
    }

    /// True when both generators express each other with integer matrices.
    pub fn same_points(&self, other: &Lattice, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let integral = |m: DMatrix<f64>| m.iter().all(|v| (v - v.round()).abs() <= tol);
        integral(&self.inverse * &other.generator) && integral(&other.inverse * &self.generator)
    }

    /// Lattice points in the box `|x_j| <= halfwidths_j`, with their integer
    /// coefficients, ordered by coefficient vector.
    pub fn points_in_box(&self, halfwidths: &[f64]) -> Vec<(Vec<i64>, Vec<f64>)> {
        let d = self.dim();
        let ranges: Vec<i64> = (0..d)
            .map(|i| {
                let reach: f64 = (0..d).map(|j| self.inverse[(i, j)].abs() * halfwidths[j]).sum();
                (reach + 1e-9).floor() as i64
            })
            .collect();
        let mut out = Vec::new();
        let mut coeffs: Vec<i64> = ranges.iter().map(|r| -r).collect();
        loop {
            let p = self.point(&coeffs);
            if p.iter().zip(halfwidths).all(|(v, w)| v.abs() <= w * (1.0 + 1e-12) + 1e-12) {
                out.push((coeffs.clone(), p));
            }
            let mut axis = d;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                if coeffs[axis] < ranges[axis] {
                    coeffs[axis] += 1;
                    break;
                }
                coeffs[axis] = -ranges[axis];
            }
        }
    }

    /// Lattice points with Euclidean norm at most `radius`.
    pub fn points_within(&self, radius: f64) -> Vec<(Vec<i64>, Vec<f64>)> {
        let mut pts = self.points_in_box(&vec![radius; self.dim()]);
        pts.retain(|(_, p)| norm(p) <= radius * (1.0 + 1e-12));
        pts
    }
}
