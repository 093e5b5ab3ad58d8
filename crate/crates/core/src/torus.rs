//! Periodic grids and grid functions.
//!
//! The torus is `[-L/2, L/2)^d` sampled at `N` points per axis with spacing
//! `h = L/N`. Node `k` sits at `k·h` for `k ∈ {-N/2, …, N/2-1}^d`; the dual
//! frequency with the same index is `m/L`. Values are stored in index order
//! with the first axis varying slowest.
//!
//! Transforms carry Riemann weights so that grid sums approximate integrals:
//!
//! ```text
//! f̂(ξ_m) = h^d  Σ_k f(x_k) e^{-2πi m·k/N}
//! f(x_k) = L^-d Σ_m f̂(ξ_m) e^{+2πi m·k/N}
//! ```
//!
//! so `f̂(0)` is the grid integral of `f` and `f(0)` is the grid integral of
//! `f̂`.

use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Lattice};

/// Tolerance for the symmetry invariant `f(k) = f(-k)`, relative to `max|f|`.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    period: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("N must be even and at least 4, got {n}")));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        if n.checked_pow(dim as u32).is_none_or(|len| len > 1 << 28) {
            return Err(Error::InvalidGrid(format!("{n}^{dim} nodes is too many")));
        }
        Ok(TorusGrid { dim, n, period })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Centered multi-index of a flat position.
    pub fn index(&self, flat: usize) -> Vec<i64> {
        let half = (self.n / 2) as i64;
        let mut out = vec![0; self.dim];
        let mut rest = flat;
        for j in (0..self.dim).rev() {
            out[j] = (rest % self.n) as i64 - half;
            rest /= self.n;
        }
        out
    }

    /// Flat position of a multi-index, reduced modulo `N` on every axis.
    pub fn flat(&self, index: &[i64]) -> usize {
        let n = self.n as i64;
        let half = n / 2;
        index.iter().fold(0usize, |acc, &k| acc * self.n + (k + half).rem_euclid(n) as usize)
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        self.index(flat).into_iter().map(|k| k as f64 * h).collect()
    }

    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        self.index(flat).into_iter().map(|m| m as f64 / self.period).collect()
    }

    /// Flat position of `-k`.
    pub fn negate(&self, flat: usize) -> usize {
        let neg: Vec<i64> = self.index(flat).into_iter().map(|k| -k).collect();
        self.flat(&neg)
    }

    pub fn origin(&self) -> usize {
        self.flat(&vec![0; self.dim])
    }

    /// The `2d` nodes one step away along an axis (periodic).
    pub fn axis_neighbours(&self, flat: usize) -> impl Iterator<Item = usize> + '_ {
        let base = self.index(flat);
        (0..self.dim).flat_map(move |j| {
            [-1i64, 1].into_iter().map({
                let base = base.clone();
                move |s| {
                    let mut k = base.clone();
                    k[j] += s;
                    self.flat(&k)
                }
            })
        })
    }

    /// Frequency index set `{0, e_1, …, e_d}`.
    pub fn axis_unit_frequencies(&self) -> Vec<usize> {
        let mut out = vec![self.origin()];
        for j in 0..self.dim {
            let mut m = vec![0; self.dim];
            m[j] = 1;
            out.push(self.flat(&m));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Space,
    Frequency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: TorusGrid,
    values: Vec<f64>,
    domain: Domain,
}

impl GridFunction {
    pub fn new(grid: TorusGrid, values: Vec<f64>, domain: Domain) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("grid function values must be finite".into()));
        }
        Ok(GridFunction { grid, values, domain })
    }

    pub fn zeros(grid: TorusGrid, domain: Domain) -> Self {
        GridFunction { grid, values: vec![0.0; grid.len()], domain }
    }

    /// Samples `f` at the nodes (space) or frequencies (frequency domain).
    pub fn from_fn(grid: TorusGrid, domain: Domain, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| match domain {
                Domain::Space => f(&grid.node(i)),
                Domain::Frequency => f(&grid.frequency(i)),
            })
            .collect();
        GridFunction { grid, values, domain }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn at(&self, index: &[i64]) -> f64 {
        self.values[self.grid.flat(index)]
    }

    pub fn at_origin(&self) -> f64 {
        self.values[self.grid.origin()]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `h^d Σ f` in space, `L^-d Σ F` in frequency.
    pub fn integral(&self) -> f64 {
        let w = match self.domain {
            Domain::Space => self.grid.cell_volume(),
            Domain::Frequency => self.grid.period().powi(-(self.grid.dim() as i32)),
        };
        w * self.sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|f(k) - f(-k)|` and where it occurs.
    pub fn asymmetry(&self) -> (usize, f64) {
        (0..self.values.len())
            .map(|i| (i, (self.values[i] - self.values[self.grid.negate(i)]).abs()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry().1 <= SYMMETRY_TOL * self.max_abs().max(1.0)
    }

    fn require_symmetric(&self) -> Result<()> {
        let (index, deviation) = self.asymmetry();
        if deviation > SYMMETRY_TOL * self.max_abs().max(1.0) {
            return Err(Error::Asymmetric { index, deviation });
        }
        Ok(())
    }

    fn require_domain(&self, domain: Domain) -> Result<()> {
        if self.domain != domain {
            return Err(Error::WrongDomain {
                expected: match domain {
                    Domain::Space => "space",
                    Domain::Frequency => "frequency",
                },
            });
        }
        Ok(())
    }

    /// CSV with one row per node: multi-index, coordinates, value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.grid.dim();
        let coord = if self.domain == Domain::Space { "x" } else { "xi" };
        let mut header: Vec<String> = (0..d).map(|j| format!("k{j}")).collect();
        header.extend((0..d).map(|j| format!("{coord}{j}")));
        header.push("value".into());
        writeln!(w, "{}", header.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let idx = self.grid.index(i);
            let pos = match self.domain {
                Domain::Space => self.grid.node(i),
                Domain::Frequency => self.grid.frequency(i),
            };
            let mut fields: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
            fields.extend(pos.iter().map(|x| format_sig(*x)));
            fields.push(format_sig(*v));
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }

    /// Binary dump: `d` and `N` as little-endian u64, `L` and then every
    /// value in index order as little-endian f64.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.grid.dim() as u64).to_le_bytes())?;
        w.write_all(&(self.grid.n() as u64).to_le_bytes())?;
        w.write_all(&self.grid.period().to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump written by [`GridFunction::write_binary`]. The domain is
    /// not part of the format and must be supplied.
    pub fn read_binary<R: Read>(mut r: R, domain: Domain) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut word).map_err(|e| Error::Format(e.to_string()))?;
            Ok(word)
        };
        let dim = u64::from_le_bytes(next(&mut r)?) as usize;
        let n = u64::from_le_bytes(next(&mut r)?) as usize;
        let period = f64::from_le_bytes(next(&mut r)?);
        let grid = TorusGrid::new(dim, n, period).map_err(|e| Error::Format(e.to_string()))?;
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            values.push(f64::from_le_bytes(next(&mut r)?));
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", rest.len())));
        }
        GridFunction::new(grid, values, domain)
    }
}

/// Fixed 12-significant-digit rendering shared by every text export.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{x:.11e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let v: f64 = format!("{mantissa}e{exp}").parse().expect("round trip");
        let digits = (11 - exp).max(0) as usize;
        let fixed = format!("{v:.digits$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        format!("{mantissa}e{exp}")
    }
}

/// Indicator of the closed body on the grid.
pub fn rasterize(body: &ConvexBody, grid: &TorusGrid) -> Result<GridFunction> {
    if body.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: body.dim() });
    }
    if !body.fits_in_period(grid, 1.0) {
        return Err(Error::OutsidePeriod("rasterized body must lie inside the open period cube".into()));
    }
    Ok(GridFunction::from_fn(*grid, Domain::Space, |x| if body.member(x) { 1.0 } else { 0.0 }))
}

// Position of centered index p in FFT order, and back: both shift by N/2.
fn fft_shift(grid: &TorusGrid, flat: usize) -> usize {
    let n = grid.n();
    let mut out = 0;
    let mut stride = 1;
    let mut rest = flat;
    for _ in 0..grid.dim() {
        let p = rest % n;
        rest /= n;
        out += ((p + n / 2) % n) * stride;
        stride *= n;
    }
    out
}

fn transform(grid: &TorusGrid, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.n();
    let fft = FftPlanner::new().plan_fft(n, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let total = grid.len();
    let mut stride = 1;
    for _ in 0..grid.dim() {
        let block = stride * n;
        for start in (0..total).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + t * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (t, v) in line.iter().enumerate() {
                    data[base + t * stride] = *v;
                }
            }
        }
        stride *= n;
    }
}

fn weighted_transform(grid: &TorusGrid, values: &[Complex64], direction: FftDirection, weight: f64) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); values.len()];
    for (i, v) in values.iter().enumerate() {
        buf[fft_shift(grid, i)] = *v;
    }
    transform(grid, &mut buf, direction);
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = buf[fft_shift(grid, i)] * weight;
    }
    out
}

/// Forward transform of arbitrary complex samples on `grid` (weight `h^d`).
pub fn dft_complex(grid: &TorusGrid, values: &[Complex64]) -> Vec<Complex64> {
    weighted_transform(grid, values, FftDirection::Forward, grid.cell_volume())
}

/// Inverse transform (weight `L^-d`).
pub fn idft_complex(grid: &TorusGrid, values: &[Complex64]) -> Vec<Complex64> {
    weighted_transform(grid, values, FftDirection::Inverse, grid.period().powi(-(grid.dim() as i32)))
}

fn complexify(f: &GridFunction) -> Vec<Complex64> {
    f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Transform of a real symmetric space function; real and symmetric.
pub fn dft(f: &GridFunction) -> Result<GridFunction> {
    f.require_domain(Domain::Space)?;
    f.require_symmetric()?;
    let out = dft_complex(&f.grid, &complexify(f));
    Ok(GridFunction { grid: f.grid, values: out.into_iter().map(|c| c.re).collect(), domain: Domain::Frequency })
}

/// Inverse transform of a real symmetric frequency function.
pub fn idft(spectrum: &GridFunction) -> Result<GridFunction> {
    spectrum.require_domain(Domain::Frequency)?;
    spectrum.require_symmetric()?;
    let out = idft_complex(&spectrum.grid, &complexify(spectrum));
    Ok(GridFunction { grid: spectrum.grid, values: out.into_iter().map(|c| c.re).collect(), domain: Domain::Space })
}

#[derive(Debug, Clone)]
pub struct Autocorrelation {
    pub function: GridFunction,
    /// `supp g` leaves the half period cube, so the result is a genuinely
    /// periodic (wrapped) autocorrelation.
    pub wraps: bool,
}

/// `g * g̃` computed as `idft(|dft g|²)`.
pub fn autocorrelate(g: &GridFunction) -> Result<Autocorrelation> {
    g.require_domain(Domain::Space)?;
    let quarter = g.grid.period() / 4.0;
    let wraps =
        g.values.iter().enumerate().any(|(i, v)| *v != 0.0 && g.grid.node(i).iter().any(|x| x.abs() >= quarter));
    let power: Vec<Complex64> =
        dft_complex(&g.grid, &complexify(g)).into_iter().map(|c| Complex64::new(c.norm_sqr(), 0.0)).collect();
    let back = idft_complex(&g.grid, &power);
    let mut function =
        GridFunction { grid: g.grid, values: back.into_iter().map(|c| c.re).collect(), domain: Domain::Space };
    // exact symmetrization removes O(ε) FFT asymmetry
    let sym: Vec<f64> =
        (0..function.values.len()).map(|i| 0.5 * (function.values[i] + function.values[g.grid.negate(i)])).collect();
    function.values = sym;
    Ok(Autocorrelation { function, wraps })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumMin {
    pub value: f64,
    pub index: Vec<i64>,
    pub frequency: Vec<f64>,
}

/// Minimum of the spectrum of a real symmetric function; ties go to the first
/// frequency in index order.
pub fn min_spectrum(f: &GridFunction) -> Result<SpectrumMin> {
    let spectrum = dft(f)?;
    Ok(spectrum_min(&spectrum))
}

pub(crate) fn spectrum_min(spectrum: &GridFunction) -> SpectrumMin {
    let (flat, value) =
        spectrum
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    SpectrumMin { value, index: spectrum.grid.index(flat), frequency: spectrum.grid.frequency(flat) }
}

pub fn is_positive_definite(f: &GridFunction, tol: f64) -> Result<bool> {
    Ok(min_spectrum(f)?.value >= -tol)
}

/// Integer node steps of the lattice basis, after checking that the lattice
/// maps the grid to itself and contains the period lattice `L·Z^d`.
pub fn commensurate_steps(lat: &Lattice, grid: &TorusGrid) -> Result<Vec<Vec<i64>>> {
    if lat.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: lat.dim() });
    }
    let h = grid.spacing();
    let near_int = |v: f64| (v - v.round()).abs() <= 1e-9 * v.abs().max(1.0);
    let mut steps = Vec::with_capacity(lat.dim());
    for j in 0..lat.dim() {
        let col: Vec<f64> = lat.column(j).iter().map(|c| c / h).collect();
        if let Some(v) = col.iter().find(|v| !near_int(**v)) {
            return Err(Error::Incommensurate {
                column: j,
                reason: format!("basis vector / h has non-integer entry {v}"),
            });
        }
        steps.push(col.iter().map(|v| v.round() as i64).collect());
    }
    for j in 0..grid.dim() {
        let mut e = vec![0.0; grid.dim()];
        e[j] = grid.period();
        let c = lat.coordinates(&e);
        if let Some(v) = c.iter().find(|v| !near_int(**v)) {
            return Err(Error::Incommensurate {
                column: j,
                reason: format!("period vector L·e_{j} has non-integer lattice coordinate {v}"),
            });
        }
    }
    Ok(steps)
}

/// Labels every node with its coset of the lattice inside `Z_N^d`.
/// Returns `(labels, coset_count, lattice_points_in_torus)`.
pub(crate) fn lattice_cosets(lat: &Lattice, grid: &TorusGrid) -> Result<(Vec<usize>, usize, usize)> {
    let steps = commensurate_steps(lat, grid)?;
    let total = grid.len();
    let mut in_group = vec![false; total];
    let origin = grid.origin();
    let mut group = vec![origin];
    in_group[origin] = true;
    let mut cursor = 0;
    while cursor < group.len() {
        let base = grid.index(group[cursor]);
        cursor += 1;
        for s in &steps {
            for sign in [-1, 1] {
                let k: Vec<i64> = base.iter().zip(s).map(|(b, v)| b + sign * v).collect();
                let f = grid.flat(&k);
                if !in_group[f] {
                    in_group[f] = true;
                    group.push(f);
                }
            }
        }
    }
    let offsets: Vec<Vec<i64>> = group.iter().map(|&g| grid.index(g)).collect();
    let mut label = vec![usize::MAX; total];
    let mut classes = 0;
    for i in 0..total {
        if label[i] != usize::MAX {
            continue;
        }
        let base = grid.index(i);
        for off in &offsets {
            let k: Vec<i64> = base.iter().zip(off).map(|(b, o)| b + o).collect();
            label[grid.flat(&k)] = classes;
        }
        classes += 1;
    }
    Ok((label, classes, group.len()))
}

/// `Σ_λ f(x - λ)` over the lattice points of the torus.
pub fn periodize(f: &GridFunction, lat: &Lattice) -> Result<GridFunction> {
    f.require_domain(Domain::Space)?;
    let (label, classes, _) = lattice_cosets(lat, &f.grid)?;
    let mut sums = vec![0.0; classes];
    for (v, &c) in f.values.iter().zip(&label) {
        sums[c] += v;
    }
    let values = label.iter().map(|&c| sums[c]).collect();
    Ok(GridFunction { grid: f.grid, values, domain: Domain::Space })
}
