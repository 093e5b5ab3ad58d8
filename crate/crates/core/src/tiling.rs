//! Lattice tilings, spectral pairs, the dual-lattice support condition, and
//! point densities.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, ConvexBody, Lattice, Placement, Shape};
use crate::torus::{periodize, rasterize, TorusGrid};

// sin(πx) with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let k = x.round();
    let r = x - k;
    if r == 0.0 {
        return 0.0;
    }
    let s = (PI * r).sin();
    if (k as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Bessel function `J_n(x)` from `J_n(x) = (1/π)∫_0^π cos(nτ - x sin τ) dτ`.
///
/// The integrand extends to a smooth even periodic function, so the trapezoid
/// rule converges geometrically once the node count exceeds `|x|`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let m = (2.0 * x.abs()).ceil() as usize + 64;
    let step = PI / m as f64;
    let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(PI));
    for j in 1..m {
        sum += f(j as f64 * step);
    }
    sum * step / PI
}

// Transform of a counter-clockwise polygon by the divergence theorem:
// χ̂(ξ) = Σ_e (ξ·ν_e)|e| e^{-2πiξ·m_e} sinc(πξ·(q-p)) / (-2πi|ξ|²).
fn polygon_transform(vertices: &[[f64; 2]], xi: [f64; 2]) -> Complex64 {
    let area = crate::geometry::shoelace(vertices);
    let diam = vertices.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max);
    let rho2 = xi[0] * xi[0] + xi[1] * xi[1];
    if rho2.sqrt() * diam < 1e-7 {
        return Complex64::new(area, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..vertices.len() {
        let (p, q) = (vertices[i], vertices[(i + 1) % vertices.len()]);
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let flux = xi[0] * dy - xi[1] * dx;
        let along = xi[0] * dx + xi[1] * dy;
        let sinc = if along == 0.0 { 1.0 } else { sin_pi(along) / (PI * along) };
        let mid = xi[0] * (p[0] + q[0]) / 2.0 + xi[1] * (p[1] + q[1]) / 2.0;
        acc += Complex64::from_polar(flux * sinc, -2.0 * PI * mid);
    }
    acc / Complex64::new(0.0, -2.0 * PI * rho2)
}

/// `χ̂_Ω(ξ) = ∫_Ω e^{-2πi ξ·x} dx`.
///
/// Closed forms cover boxes, balls in dimensions 1 to 3, and polytopes in
/// dimensions 1 and 2. Other bodies fall back to the node sum on `grid`, whose error
/// is of order `h·|∂Ω|`.
pub fn ft_indicator(body: &ConvexBody, xi: &[f64], grid: Option<&TorusGrid>) -> Result<Complex64> {
    let d = body.dim();
    if xi.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: xi.len() });
    }
    let real = |v: f64| Ok(Complex64::new(v, 0.0));
    match body.shape() {
        Shape::Box { halfwidths } => real(
            halfwidths
                .iter()
                .zip(xi)
                .map(|(w, x)| if *x == 0.0 { 2.0 * w } else { sin_pi(2.0 * w * x) / (PI * x) })
                .product(),
        ),
        Shape::Ball { radius } if d <= 3 => {
            let r = *radius;
            let rho = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let vol = unit_ball_volume(d) * r.powi(d as i32);
            if rho == 0.0 {
                return real(vol);
            }
            let t = 2.0 * PI * r * rho;
            match d {
                1 => real(sin_pi(2.0 * r * rho) / (PI * rho)),
                2 => real(r * bessel_j(1, t) / rho),
                _ if t < 1e-3 => real(vol * (1.0 - t * t / 10.0)),
                _ => real((t.sin() - t * t.cos()) / (2.0 * PI * PI * rho.powi(3))),
            }
        }
        Shape::HPolytope { .. } if d == 1 => {
            let w = body.extent()[0];
            real(if xi[0] == 0.0 { 2.0 * w } else { sin_pi(2.0 * w * xi[0]) / (PI * xi[0]) })
        }
        Shape::HPolytope { .. } if d == 2 => {
            let vertices = body.polygon_vertices().expect("planar polytope");
            Ok(polygon_transform(&vertices, [xi[0], xi[1]]))
        }
        _ => {
            let g = grid.ok_or_else(|| Error::Unsupported("this body's transform needs a quadrature grid".into()))?;
            if g.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: g.dim() });
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..g.len() {
                let x = g.node(i);
                if body.member(&x) {
                    let phase: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
                    acc += Complex64::from_polar(1.0, -2.0 * PI * phase);
                }
            }
            Ok(acc * g.cell_volume())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub min_multiplicity: usize,
    pub max_multiplicity: usize,
    pub fraction_exactly_one: f64,
    pub samples: usize,
    /// Up to ten sample points not covered exactly once.
    pub offending: Vec<Vec<f64>>,
}

impl CoverageReport {
    pub fn tiles(&self, min_fraction: f64) -> bool {
        self.fraction_exactly_one >= min_fraction
    }

    fn from_counts(counts: impl Iterator<Item = (usize, Vec<f64>)>) -> Self {
        let (mut lo, mut hi, mut ones, mut total) = (usize::MAX, 0, 0, 0);
        let mut offending = Vec::new();
        for (c, x) in counts {
            lo = lo.min(c);
            hi = hi.max(c);
            total += 1;
            if c == 1 {
                ones += 1;
            } else if offending.len() < 10 {
                offending.push(x);
            }
        }
        CoverageReport {
            min_multiplicity: lo,
            max_multiplicity: hi,
            fraction_exactly_one: ones as f64 / total as f64,
            samples: total,
            offending,
        }
    }
}

/// Counts how many translates `Ω + λ` cover each of the `N^d` cell-centred
/// samples `G((i + 1/2)/N)` of the lattice's fundamental parallelepiped.
///
/// Only `N` is taken from `grid`; the samples follow the lattice, so any
/// lattice works, commensurate or not.
pub fn lattice_tiling_check(body: &ConvexBody, lat: &Lattice, grid: &TorusGrid) -> Result<CoverageReport> {
    let d = body.dim();
    if lat.dim() != d || grid.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: lat.dim() });
    }
    let n = grid.n();
    let reach: Vec<f64> =
        (0..d).map(|i| body.extent()[i] + (0..d).map(|j| lat.generator()[(i, j)].abs()).sum::<f64>()).collect();
    let translates: Vec<Vec<f64>> = lat.points_in_box(&reach).into_iter().map(|(_, p)| p).collect();
    let total = n.pow(d as u32);
    let counts = (0..total).map(|flat| {
        let mut rest = flat;
        let mut u = vec![0.0; d];
        for slot in u.iter_mut().rev() {
            *slot = ((rest % n) as f64 + 0.5) / n as f64;
            rest /= n;
        }
        let s: Vec<f64> = (0..d).map(|i| (0..d).map(|j| lat.generator()[(i, j)] * u[j]).sum()).collect();
        let c = translates
            .iter()
            .filter(|lam| {
                let y: Vec<f64> = s.iter().zip(lam.iter()).map(|(a, b)| a - b).collect();
                body.member(&y)
            })
            .count();
        (c, s)
    });
    Ok(CoverageReport::from_counts(counts))
}

/// Multiplicity at every torus node of `periodize(rasterize(Ω), Λ)`.
///
/// Requires a commensurate lattice. Closure rasterization counts shared
/// boundary nodes twice, so even exact tilings report multiplicity 2 there.
pub fn lattice_tiling_check_torus(body: &ConvexBody, lat: &Lattice, grid: &TorusGrid) -> Result<CoverageReport> {
    let p = periodize(&rasterize(body, grid)?, lat)?;
    Ok(CoverageReport::from_counts(p.values().iter().enumerate().map(|(i, v)| (v.round() as usize, grid.node(i)))))
}

const SHELLS: usize = 7;

fn shell_radius(k: usize) -> f64 {
    (k + 2) as f64 / 8.0
}

// Least-squares P∞ for sums[k] ≈ P∞ - C/ρ_k - D/ρ_k².
fn extrapolate(sums: &[f64; SHELLS]) -> f64 {
    let design = DMatrix::from_fn(SHELLS, 3, |k, j| {
        let rho = shell_radius(k);
        [1.0, -1.0 / rho, -1.0 / (rho * rho)][j]
    });
    let rhs = DVector::from_column_slice(sums);
    let normal = design.transpose() * &design;
    let fit = normal.lu().solve(&(design.transpose() * rhs)).expect("fixed full-rank design");
    fit[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct SpectralOptions {
    /// Truncation radius of the `λ` sums.
    pub radius: f64,
    pub samples: usize,
    pub seed: u64,
    /// Orthogonality threshold, relative to `|Ω|`.
    pub ortho_tol: f64,
    /// Level threshold, relative to `|Ω|²`.
    pub level_tol: f64,
    /// Largest acceptable extrapolated tail, relative to `|Ω|²`.
    pub tail_tol: f64,
    /// Quadrature grid for bodies without a closed-form transform.
    pub grid: Option<TorusGrid>,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            radius: 40.0,
            samples: 16,
            seed: 0,
            ortho_tol: 1e-12,
            level_tol: 1e-3,
            tail_tol: 0.05,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub max_offdiagonal: f64,
    /// Level error after the tail correction, maximized over samples.
    pub parseval_level_error: f64,
    /// Level error of the plain truncated sum.
    pub raw_level_error: f64,
    /// Largest extrapolated truncation tail.
    pub tail_estimate: f64,
    pub pairs_tested: usize,
    pub lambdas_used: usize,
    pub volume: f64,
    pub verdict: Verdict,
}

/// Orthogonality of `{e^{2πiλ·x}}` on `Ω` and the level identity
/// `Σ_λ |χ̂_Ω(x - λ)|² = |Ω|²`.
///
/// The truncated sums over `|x - λ| <= ρR` for `ρ = 1/4, 3/8, …, 1` are
/// fitted by least squares to `P(ρR) = P∞ - C/ρ - D/ρ²`; the tail estimate
/// is `P∞ - P(R)`. Several shells average out the lattice-point noise of
/// individual ball sums.
pub fn spectral_pair_check(body: &ConvexBody, spectrum: &Lattice, opts: &SpectralOptions) -> Result<SpectralReport> {
    let d = body.dim();
    if spectrum.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: spectrum.dim() });
    }
    if opts.radius.is_nan() || opts.radius <= 0.0 || opts.samples == 0 {
        return Err(Error::EmptyWindow("spectral check needs a positive radius and at least one sample".into()));
    }
    let volume = match body.exact_volume() {
        Some(v) => v,
        None => body.volume(opts.grid.as_ref())?.best().expect("volume has one of the two"),
    };
    let grid = opts.grid.as_ref();
    let chi = |xi: &[f64]| ft_indicator(body, xi, grid).map(|c| c.norm());

    let mut max_offdiagonal: f64 = 0.0;
    let mut pairs_tested = 0;
    for (coeffs, mu) in spectrum.points_within(opts.radius) {
        if coeffs.iter().all(|c| *c == 0) {
            continue;
        }
        max_offdiagonal = max_offdiagonal.max(chi(&mu)?);
        pairs_tested += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let span: f64 = (0..d).map(|j| spectrum.column(j).iter().map(|v| v * v).sum::<f64>().sqrt()).sum();
    let candidates = spectrum.points_within(opts.radius + span);
    let target = volume * volume;
    let (mut level, mut raw, mut tail_max, mut lambdas_used) = (0.0f64, 0.0f64, 0.0f64, 0);
    for _ in 0..opts.samples {
        let u: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let x: Vec<f64> = (0..d).map(|i| (0..d).map(|j| spectrum.generator()[(i, j)] * u[j]).sum()).collect();
        let mut sums = [0.0; SHELLS];
        let mut used = 0;
        for (_, lam) in &candidates {
            let diff: Vec<f64> = x.iter().zip(lam).map(|(a, b)| a - b).collect();
            let dist = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
            if dist > opts.radius {
                continue;
            }
            used += 1;
            let v = chi(&diff)?.powi(2);
            for (k, sum) in sums.iter_mut().enumerate() {
                if dist <= shell_radius(k) * opts.radius {
                    *sum += v;
                }
            }
        }
        let full = sums[SHELLS - 1];
        let tail = extrapolate(&sums) - full;
        raw = raw.max((full - target).abs());
        level = level.max((full + tail - target).abs());
        tail_max = tail_max.max(tail.abs());
        lambdas_used = lambdas_used.max(used);
    }
    let verdict = if max_offdiagonal > opts.ortho_tol * volume.max(1.0) {
        Verdict::Fail
    } else if tail_max > opts.tail_tol * target {
        Verdict::Inconclusive
    } else if level > opts.level_tol * target {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok(SpectralReport {
        max_offdiagonal,
        parseval_level_error: level,
        raw_level_error: raw,
        tail_estimate: tail_max,
        pairs_tested,
        lambdas_used,
        volume,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportVerdict {
    /// No nonzero dual point in the closed `2Ω`.
    Pass,
    /// Nonzero dual points only on the boundary of `2Ω`.
    Boundary,
    /// A nonzero dual point in the interior of `2Ω`.
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportReport {
    pub verdict: SupportVerdict,
    /// Dual-lattice coefficients and coordinates of the reported point.
    pub witness: Option<Vec<i64>>,
    pub witness_point: Option<Vec<f64>>,
    pub dual_points_checked: usize,
}

impl SupportReport {
    /// The condition holds unless a dual point lies strictly inside `2Ω`.
    pub fn holds(&self) -> bool {
        self.verdict != SupportVerdict::Fail
    }
}

/// `Λ* \ {0}` against `2Ω`, enumerated over the bounding box of `2Ω`.
///
/// The witness is the offending point of least norm, ties going to the
/// largest coefficient vector in lexicographic order.
pub fn support_condition_check(body: &ConvexBody, spectrum: &Lattice) -> Result<SupportReport> {
    if spectrum.dim() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: spectrum.dim() });
    }
    let dual = spectrum.dual()?;
    let doubled = body.scale(2.0)?;
    let reach: Vec<f64> = doubled.extent().iter().map(|e| e * (1.0 + 1e-9)).collect();
    let points = dual.points_in_box(&reach);
    let checked = points.len();
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for (c, p) in points {
        if c.iter().all(|v| *v == 0) {
            continue;
        }
        match doubled.placement(&p, 1e-9)? {
            Placement::Interior => interior.push((c, p)),
            Placement::Boundary => boundary.push((c, p)),
            Placement::Exterior => {}
        }
    }
    let pick = |mut set: Vec<(Vec<i64>, Vec<f64>)>| {
        let norm = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
        set.sort_by(|a, b| norm(&a.1).total_cmp(&norm(&b.1)).then_with(|| b.0.cmp(&a.0)));
        set.into_iter().next()
    };
    let (verdict, w) = if !interior.is_empty() {
        (SupportVerdict::Fail, pick(interior))
    } else if !boundary.is_empty() {
        (SupportVerdict::Boundary, pick(boundary))
    } else {
        (SupportVerdict::Pass, None)
    };
    let (witness, witness_point) = match w {
        Some((c, p)) => (Some(c), Some(p)),
        None => (None, None),
    };
    Ok(SupportReport { verdict, witness, witness_point, dual_points_checked: checked })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub mean: f64,
    /// `max - min` over the windows.
    pub spread: f64,
    pub windows: usize,
}

/// `#(P ∩ B_R(x)) / |B_R(x)|` over every pair of center and radius.
pub fn density_estimate(points: &[Vec<f64>], centers: &[Vec<f64>], radii: &[f64]) -> Result<DensityEstimate> {
    if points.is_empty() || centers.is_empty() || radii.is_empty() {
        return Err(Error::EmptyWindow("need points, centers and radii".into()));
    }
    let d = points[0].len();
    if let Some(r) = radii.iter().find(|r| r.is_nan() || **r <= 1.0) {
        return Err(Error::EmptyWindow(format!("window radius {r} must exceed 1")));
    }
    if points.iter().chain(centers).any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: centers[0].len() });
    }
    let mut values = Vec::with_capacity(centers.len() * radii.len());
    for c in centers {
        for &r in radii {
            let count =
                points.iter().filter(|p| p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r * r).count();
            values.push(count as f64 / (unit_ball_volume(d) * r.powi(d as i32)));
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    Ok(DensityEstimate { mean, spread: hi - lo, windows: values.len() })
}

/// Mass of `δ̂_Λ` at the origin. For a lattice, Poisson summation makes
/// `δ̂_Λ = (1/|det G|) δ_{Λ*}`, so this is the density.
pub fn at_zero_mass(lat: &Lattice) -> f64 {
    lat.density()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon_pair() -> (ConvexBody, Lattice) {
        let hex = ConvexBody::regular_polygon(6, 1.0).unwrap();
        let s = 3f64.sqrt();
        (hex, Lattice::from_columns(&[vec![1.5, s / 2.0], vec![0.0, s]]).unwrap())
    }

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_j(1, 1.0) - 0.4400505857449335).abs() < 1e-14);
        assert!((bessel_j(1, 10.0) - 0.04347274616886144).abs() < 1e-14);
        assert!((bessel_j(0, 0.0) - 1.0).abs() < 1e-15);
        assert!(bessel_j(1, 0.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_transforms() {
        let q1 = ConvexBody::cube(1, 0.5).unwrap();
        assert_eq!(ft_indicator(&q1, &[1.0], None).unwrap().re, 0.0);
        assert_eq!(ft_indicator(&q1, &[0.0], None).unwrap().re, 1.0);
        let disk = ConvexBody::ball(2, 1.0).unwrap();
        assert!((ft_indicator(&disk, &[0.0, 0.0], None).unwrap().re - PI).abs() < 1e-15);
        let at_one = ft_indicator(&disk, &[1.0, 0.0], None).unwrap().re;
        assert!((at_one - bessel_j(1, 2.0 * PI)).abs() < 1e-15);
        assert!(at_one.abs() > 0.2);
        let ball3 = ConvexBody::ball(3, 1.0).unwrap();
        let tiny = ft_indicator(&ball3, &[1e-6, 0.0, 0.0], None).unwrap().re;
        assert!((tiny - 4.0 / 3.0 * PI).abs() < 1e-9);
        let octa = ConvexBody::hpolytope(vec![
            (vec![1.0, 1.0, 1.0], 1.0),
            (vec![1.0, 1.0, -1.0], 1.0),
            (vec![1.0, -1.0, 1.0], 1.0),
            (vec![-1.0, 1.0, 1.0], 1.0),
        ])
        .unwrap();
        assert!(ft_indicator(&octa, &[0.1, 0.0, 0.0], None).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let square = ConvexBody::hpolytope(vec![(vec![1.0, 0.0], 0.5), (vec![0.0, 1.0], 0.5)]).unwrap();
        let grid = TorusGrid::new(2, 256, 2.0).unwrap();
        let q = ft_indicator(&square, &[0.3, 0.7], Some(&grid)).unwrap();
        let exact = ft_indicator(&ConvexBody::cube(2, 0.5).unwrap(), &[0.3, 0.7], None).unwrap();
        assert!((q - exact).norm() < 4.0 * grid.spacing());
    }

    #[test]
    fn polygon_transform_matches_box_form() {
        let square = ConvexBody::hpolytope(vec![(vec![1.0, 0.0], 0.5), (vec![0.0, 1.0], 0.75)]).unwrap();
        let boxed = ConvexBody::boxed(vec![0.5, 0.75]).unwrap();
        for xi in [[0.3, 0.7], [1.0, 0.0], [-2.5, 1.25], [1e-9, 0.0], [0.0, 0.0]] {
            let a = ft_indicator(&square, &xi, None).unwrap();
            let b = ft_indicator(&boxed, &xi, None).unwrap();
            assert!((a - b).norm() < 1e-13, "{xi:?}: {a} vs {b}");
        }
        let (hex, _) = hexagon_pair();
        let grid = TorusGrid::new(2, 512, 4.0).unwrap();
        let q = spectral_quadrature(&hex, [0.4, -0.3], &grid);
        let exact = ft_indicator(&hex, &[0.4, -0.3], None).unwrap();
        assert!((q - exact).norm() < 10.0 * grid.spacing());
    }

    fn spectral_quadrature(body: &ConvexBody, xi: [f64; 2], grid: &TorusGrid) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..grid.len() {
            let x = grid.node(i);
            if body.member(&x) {
                acc += Complex64::from_polar(1.0, -2.0 * PI * (x[0] * xi[0] + x[1] * xi[1]));
            }
        }
        acc * grid.cell_volume()
    }

    #[test]
    fn hexagon_is_spectral_with_the_dual_of_its_tiling_lattice() {
        let (hex, lat) = hexagon_pair();
        let spectrum = lat.dual().unwrap();
        let r = spectral_pair_check(&hex, &spectrum, &SpectralOptions::default()).unwrap();
        assert!(r.max_offdiagonal <= 1e-12, "{r:?}");
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        let wrong = spectral_pair_check(&hex, &Lattice::integer(2), &SpectralOptions::default()).unwrap();
        assert_eq!(wrong.verdict, Verdict::Fail);
    }

    #[test]
    fn cube_tiles_and_disk_does_not() {
        let grid = TorusGrid::new(2, 64, 4.0).unwrap();
        let cube = lattice_tiling_check(&ConvexBody::cube(2, 0.5).unwrap(), &Lattice::integer(2), &grid).unwrap();
        assert_eq!((cube.min_multiplicity, cube.max_multiplicity), (1, 1));
        assert_eq!(cube.fraction_exactly_one, 1.0);
        let disk = lattice_tiling_check(&ConvexBody::ball(2, 1.0).unwrap(), &Lattice::integer(2), &grid).unwrap();
        assert!(disk.max_multiplicity >= 2 || disk.min_multiplicity == 0);
        assert!(!disk.offending.is_empty() && disk.offending.len() <= 10);
        let small = lattice_tiling_check(&ConvexBody::ball(2, 0.5).unwrap(), &Lattice::integer(2), &grid).unwrap();
        assert_eq!(small.min_multiplicity, 0);
    }

    #[test]
    fn hexagon_tiles_with_its_lattice() {
        let (hex, lat) = hexagon_pair();
        assert!((lat.determinant() - hex.exact_volume().unwrap()).abs() < 1e-12);
        let r = lattice_tiling_check(&hex, &lat, &TorusGrid::new(2, 64, 4.0).unwrap()).unwrap();
        assert!(r.fraction_exactly_one >= 0.95, "{}", r.fraction_exactly_one);
    }

    #[test]
    fn torus_route_sees_boundary_doubling() {
        let grid = TorusGrid::new(2, 64, 4.0).unwrap();
        let r = lattice_tiling_check_torus(&ConvexBody::cube(2, 0.5).unwrap(), &Lattice::integer(2), &grid).unwrap();
        assert_eq!(r.min_multiplicity, 1);
        assert_eq!(r.max_multiplicity, 4);
        assert!((r.fraction_exactly_one - (15.0f64 / 16.0).powi(2)).abs() < 1e-12);
        let (hex, lat) = hexagon_pair();
        assert!(matches!(lattice_tiling_check_torus(&hex, &lat, &grid), Err(Error::Incommensurate { .. })));
    }

    #[test]
    fn unit_cube_is_spectral() {
        let r =
            spectral_pair_check(&ConvexBody::cube(2, 0.5).unwrap(), &Lattice::integer(2), &SpectralOptions::default())
                .unwrap();
        assert_eq!(r.max_offdiagonal, 0.0);
        assert!(r.parseval_level_error <= 1e-4, "{r:?}");
        assert!(r.raw_level_error > r.parseval_level_error);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn disk_is_not_spectral_with_integers() {
        let opts = SpectralOptions { radius: 10.0, samples: 2, ..Default::default() };
        let r = spectral_pair_check(&ConvexBody::ball(2, 1.0).unwrap(), &Lattice::integer(2), &opts).unwrap();
        assert!(r.max_offdiagonal > 0.2);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn short_truncation_is_inconclusive() {
        let opts = SpectralOptions { radius: 1.5, samples: 4, tail_tol: 1e-3, ..Default::default() };
        let r = spectral_pair_check(&ConvexBody::cube(1, 0.5).unwrap(), &Lattice::integer(1), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn support_condition_examples() {
        let cube = support_condition_check(&ConvexBody::cube(2, 0.5).unwrap(), &Lattice::integer(2)).unwrap();
        assert!(cube.holds());
        assert_eq!(cube.verdict, SupportVerdict::Boundary);
        let half = Lattice::scaled_integer(2, 0.5).unwrap();
        let b = support_condition_check(&ConvexBody::cube(2, 1.0).unwrap(), &half).unwrap();
        assert_eq!(b.verdict, SupportVerdict::Boundary);
        assert_eq!(b.witness, Some(vec![1, 0]));
        let disk = support_condition_check(&ConvexBody::ball(2, 1.0).unwrap(), &Lattice::integer(2)).unwrap();
        assert_eq!(disk.verdict, SupportVerdict::Fail);
        assert_eq!(disk.witness, Some(vec![1, 0]));
        assert!(!disk.holds());
        let tiny = support_condition_check(&ConvexBody::cube(2, 0.25).unwrap(), &Lattice::integer(2)).unwrap();
        assert_eq!(tiny.verdict, SupportVerdict::Pass);
    }

    #[test]
    fn densities() {
        let grid_points = |s: f64| -> Vec<Vec<f64>> {
            let lat = Lattice::scaled_integer(2, s).unwrap();
            lat.points_in_box(&[50.0, 50.0]).into_iter().map(|(_, p)| p).collect()
        };
        let centers = vec![vec![0.0, 0.0], vec![5.0, 7.0]];
        let z2 = density_estimate(&grid_points(1.0), &centers, &[20.0]).unwrap();
        assert!((z2.mean - 1.0).abs() < 0.03);
        let d2 = density_estimate(&grid_points(2.0), &centers, &[20.0]).unwrap();
        assert!((d2.mean - 0.25).abs() < 0.25 * 0.03);
        assert!((at_zero_mass(&Lattice::scaled_integer(2, 2.0).unwrap()) - 0.25).abs() < 1e-15);
        assert!(density_estimate(&[], &centers, &[20.0]).is_err());
        assert!(density_estimate(&grid_points(1.0), &centers, &[0.5]).is_err());
    }
}
