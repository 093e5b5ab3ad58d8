//! The discretized Turán problem as a linear program.
//!
//! Unknowns are the values of a symmetric grid function `f` on the nodes of
//! `Ω`, one variable per orbit `{k, -k}`, with `f(0) = 1` fixed and
//! `-1 <= f <= 1`. The objective is the grid integral `h^d Σ f` and every
//! frequency `m` contributes the constraint
//!
//! ```text
//! f̂(m) = h^d (1 + Σ_v w_v y_v cos(2π m·k_v / N)) >= 0
//! ```
//!
//! where `w_v` is the orbit size. Frequency constraints are generated lazily:
//! each round solves the restricted LP, scans the full spectrum of the
//! optimum, and appends the most violated frequencies.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::candidate::{candidate_value, turan_candidate};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::simplex::{DualSimplex, LpError, SimplexOptions};
use crate::torus::{dft, spectrum_min, Domain, GridFunction, TorusGrid};

/// Largest grid the all-constraints oracle accepts.
pub const DENSE_ORACLE_LIMIT: usize = 4096;

#[derive(Debug, Clone)]
pub struct TuranProblem {
    pub body: ConvexBody,
    pub grid: TorusGrid,
    pub tol_pd: f64,
    pub tol_lp: f64,
    pub max_cuts: usize,
    pub cuts_per_round: usize,
}

impl TuranProblem {
    /// Problem with default tolerances and a cut budget of `50·N^{d/2}`.
    pub fn new(body: ConvexBody, grid: TorusGrid) -> Result<Self> {
        let max_cuts = (50.0 * (grid.n() as f64).powf(grid.dim() as f64 / 2.0)).ceil() as usize;
        let p = TuranProblem { body, grid, tol_pd: 1e-8, tol_lp: 1e-9, max_cuts, cuts_per_round: 16 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.body.dim() != self.grid.dim() {
            return Err(Error::DimensionMismatch { expected: self.grid.dim(), got: self.body.dim() });
        }
        if !self.body.fits_in_closed_period(&self.grid, 2.0) {
            return Err(Error::OutsidePeriod("the solver needs 2Ω inside the period cube".into()));
        }
        if !(self.tol_pd > 0.0 && self.tol_lp > 0.0) {
            return Err(Error::InvalidGrid("tolerances must be positive".into()));
        }
        if self.cuts_per_round == 0 {
            return Err(Error::InvalidGrid("cuts_per_round must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Certified,
    CutBudgetExhausted,
    InfeasibleNumerics,
}

#[derive(Debug, Clone, Serialize)]
pub struct TuranSolution {
    #[serde(skip)]
    pub f: GridFunction,
    pub value: f64,
    pub ratio: f64,
    pub candidate_value: f64,
    pub candidate_value_exact: bool,
    pub candidate_integral: f64,
    pub min_spectrum: f64,
    pub worst_violation: f64,
    pub duality_gap: f64,
    pub rounds: usize,
    /// Frequency representatives of the constraint pool, in insertion order.
    pub active_frequencies: Vec<Vec<i64>>,
    /// Restricted-LP dual weight of each pooled frequency.
    pub cut_duals: Vec<f64>,
    /// Restricted optimum after every round.
    pub round_values: Vec<f64>,
    pub monotone: bool,
    pub lp_iterations: usize,
    pub variables: usize,
    pub status: SolveStatus,
}

// Orbit structure of Ω's nodes and the cosine table of the grid.
struct Layout {
    grid: TorusGrid,
    reps: Vec<Vec<i64>>,
    weights: Vec<f64>,
    members: Vec<Vec<usize>>,
    cos: Vec<f64>,
}

impl Layout {
    fn new(body: &ConvexBody, grid: &TorusGrid) -> Self {
        let origin = grid.origin();
        let mut seen = vec![false; grid.len()];
        let (mut reps, mut weights, mut members) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..grid.len() {
            if i == origin || seen[i] || !body.member(&grid.node(i)) {
                continue;
            }
            let j = grid.negate(i);
            seen[i] = true;
            seen[j] = true;
            reps.push(grid.index(i));
            if i == j {
                weights.push(1.0);
                members.push(vec![i]);
            } else {
                weights.push(2.0);
                members.push(vec![i, j]);
            }
        }
        let n = grid.n();
        let cos = (0..n).map(|j| (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
        Layout { grid: *grid, reps, weights, members, cos }
    }

    fn len(&self) -> usize {
        self.reps.len()
    }

    // Row `-Σ w_v cos(2π m·k_v/N) y_v <= 1`.
    fn row(&self, m: &[i64]) -> Vec<f64> {
        let n = self.grid.n() as i64;
        self.reps
            .iter()
            .zip(&self.weights)
            .map(|(k, w)| {
                let dot: i64 = k.iter().zip(m).map(|(a, b)| a * b).sum();
                -w * self.cos[dot.rem_euclid(n) as usize]
            })
            .collect()
    }

    fn embed(&self, y: &[f64]) -> GridFunction {
        let mut f = GridFunction::zeros(self.grid, Domain::Space);
        let vals = f.values_mut();
        vals[self.grid.origin()] = 1.0;
        for (members, &v) in self.members.iter().zip(y) {
            for &i in members {
                vals[i] = v;
            }
        }
        f
    }
}

// Canonical flat index of the orbit `{m, -m}`; the pool remembers the
// representative it was first reached by.
fn orbit_key(grid: &TorusGrid, flat: usize) -> usize {
    flat.min(grid.negate(flat))
}

struct Pool {
    keys: BTreeSet<usize>,
    order: Vec<usize>,
}

impl Pool {
    fn new() -> Self {
        Pool { keys: BTreeSet::new(), order: Vec::new() }
    }

    fn insert(&mut self, grid: &TorusGrid, flat: usize) -> bool {
        let key = orbit_key(grid, flat);
        if self.keys.insert(key) {
            self.order.push(flat);
            true
        } else {
            false
        }
    }
}

fn new_lp(layout: &Layout) -> Result<DualSimplex> {
    let v = layout.len();
    Ok(DualSimplex::new(layout.weights.clone(), vec![-1.0; v], vec![1.0; v], SimplexOptions::default())?)
}

struct Finish<'a> {
    problem: &'a TuranProblem,
    layout: &'a Layout,
    pool: &'a Pool,
}

impl Finish<'_> {
    fn solution(
        &self,
        lp: &DualSimplex,
        round_values: Vec<f64>,
        spectrum: &GridFunction,
        status: SolveStatus,
    ) -> Result<TuranSolution> {
        let p = self.problem;
        let w = p.grid.cell_volume();
        let y = lp.primal();
        let f = self.layout.embed(y);
        let value = f.integral();
        let cv = candidate_value(&p.body, Some(&p.grid))?;
        let candidate_integral = turan_candidate(&p.body, &p.grid)?.integral();
        let min = spectrum_min(spectrum).value;
        let duality_gap = w * (lp.dual_bound() - lp.objective()).abs();
        let monotone = round_values.windows(2).all(|r| r[1] <= r[0] + 1e-9 * r[0].abs().max(1.0));
        Ok(TuranSolution {
            value,
            ratio: value / cv.value,
            candidate_value: cv.value,
            candidate_value_exact: cv.exact,
            candidate_integral,
            min_spectrum: min,
            worst_violation: (-min).max(0.0),
            duality_gap,
            rounds: round_values.len(),
            active_frequencies: self.pool.order.iter().map(|&k| p.grid.index(k)).collect(),
            cut_duals: lp.duals(),
            round_values,
            monotone,
            lp_iterations: lp.iterations(),
            variables: self.layout.len(),
            status,
            f,
        })
    }
}

/// Cutting-plane solve of the Turán LP.
///
/// The dual simplex starts from the slack basis with every variable at its
/// upper bound, which is dual feasible; each round appends rows and resumes
/// from the previous basis.
pub fn solve_turan(p: &TuranProblem) -> Result<TuranSolution> {
    p.validate()?;
    let grid = p.grid;
    let layout = Layout::new(&p.body, &grid);
    let mut lp = new_lp(&layout)?;
    let mut pool = Pool::new();
    for m in grid.axis_unit_frequencies() {
        if pool.insert(&grid, m) {
            lp.add_row(&layout.row(&grid.index(m)), 1.0)?;
        }
    }
    let w = grid.cell_volume();
    let mut round_values = Vec::new();
    loop {
        match lp.solve() {
            Ok(()) => {}
            Err(LpError::Infeasible { .. } | LpError::Singular | LpError::IterationLimit(_))
                if !round_values.is_empty() =>
            {
                let spectrum = dft(&layout.embed(lp.primal()))?;
                let fin = Finish { problem: p, layout: &layout, pool: &pool };
                return fin.solution(&lp, round_values, &spectrum, SolveStatus::InfeasibleNumerics);
            }
            Err(e) => return Err(e.into()),
        }
        round_values.push(w * (1.0 + lp.objective()));
        let spectrum = dft(&layout.embed(lp.primal()))?;
        let gap = w * (lp.dual_bound() - lp.objective()).abs();
        let fin = Finish { problem: p, layout: &layout, pool: &pool };

        let mut violated: Vec<(f64, usize)> =
            spectrum.values().iter().enumerate().filter(|(_, v)| **v < -p.tol_pd).map(|(i, v)| (*v, i)).collect();
        if violated.is_empty() {
            let status = if gap <= p.tol_lp { SolveStatus::Certified } else { SolveStatus::InfeasibleNumerics };
            return fin.solution(&lp, round_values, &spectrum, status);
        }
        // most negative first, ties by lexicographic index = flat order
        violated.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut added = 0;
        let mut stalled = true;
        for (_, flat) in violated {
            if added == p.cuts_per_round {
                break;
            }
            if pool.keys.contains(&orbit_key(&grid, flat)) {
                continue;
            }
            stalled = false;
            if pool.order.len() >= p.max_cuts {
                break;
            }
            pool.insert(&grid, flat);
            lp.add_row(&layout.row(&grid.index(flat)), 1.0)?;
            added += 1;
        }
        if added == 0 {
            let fin = Finish { problem: p, layout: &layout, pool: &pool };
            let status = if stalled { SolveStatus::InfeasibleNumerics } else { SolveStatus::CutBudgetExhausted };
            return fin.solution(&lp, round_values, &spectrum, status);
        }
    }
}

/// The same LP with every frequency constraint present from the start.
pub fn dense_oracle(p: &TuranProblem) -> Result<TuranSolution> {
    p.validate()?;
    let grid = p.grid;
    if grid.len() > DENSE_ORACLE_LIMIT {
        return Err(Error::GridTooLarge { points: grid.len(), limit: DENSE_ORACLE_LIMIT });
    }
    let layout = Layout::new(&p.body, &grid);
    let mut lp = new_lp(&layout)?;
    let mut pool = Pool::new();
    for m in 0..grid.len() {
        if pool.insert(&grid, m) {
            lp.add_row(&layout.row(&grid.index(m)), 1.0)?;
        }
    }
    lp.solve()?;
    let value = grid.cell_volume() * (1.0 + lp.objective());
    let spectrum = dft(&layout.embed(lp.primal()))?;
    let gap = grid.cell_volume() * (lp.dual_bound() - lp.objective()).abs();
    let certified = spectrum_min(&spectrum).value >= -p.tol_pd && gap <= p.tol_lp;
    let status = if certified { SolveStatus::Certified } else { SolveStatus::InfeasibleNumerics };
    Finish { problem: p, layout: &layout, pool: &pool }.solution(&lp, vec![value], &spectrum, status)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verification {
    pub support_ok: bool,
    pub origin_ok: bool,
    pub pd_ok: bool,
    pub value_ok: bool,
    pub min_spectrum: f64,
    pub recomputed_value: f64,
}

impl Verification {
    pub fn all(&self) -> bool {
        self.support_ok && self.origin_ok && self.pd_ok && self.value_ok
    }
}

/// Re-checks a solution from its grid function alone.
pub fn verify_solution(s: &TuranSolution, p: &TuranProblem) -> Verification {
    let f = &s.f;
    let grid = f.grid();
    let support_ok = grid == &p.grid && (0..grid.len()).all(|i| f.values()[i] == 0.0 || p.body.member(&grid.node(i)));
    let origin_ok = f.at_origin() == 1.0;
    let spectrum = if f.is_symmetric() { dft(f).ok() } else { None };
    let min_spectrum = spectrum.as_ref().map_or(f64::NEG_INFINITY, |s| spectrum_min(s).value);
    let recomputed_value = f.integral();
    Verification {
        support_ok,
        origin_ok,
        pd_ok: min_spectrum >= -p.tol_pd,
        value_ok: (recomputed_value - s.value).abs() <= 1e-12 * s.value.abs().max(1.0),
        min_spectrum,
        recomputed_value,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub period: f64,
    pub n: usize,
    pub value: Option<f64>,
    pub ratio: Option<f64>,
    pub worst_violation: Option<f64>,
    pub rounds: Option<usize>,
    pub status: Option<SolveStatus>,
    /// Wall time; left out of serialized output so reports stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefineStudy {
    pub rows: Vec<StudyRow>,
    /// `|ratio - 1|` never increases along the successful rows.
    pub approaches_one: bool,
}

/// Solves the same body on a sequence of `(L, N)` grids.
pub fn refine_study(body: &ConvexBody, grids: &[(f64, usize)]) -> RefineStudy {
    let rows: Vec<StudyRow> = grids
        .iter()
        .map(|&(period, n)| {
            let start = Instant::now();
            let outcome = TorusGrid::new(body.dim(), n, period)
                .and_then(|g| TuranProblem::new(body.clone(), g))
                .and_then(|p| solve_turan(&p));
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok(s) => StudyRow {
                    period,
                    n,
                    value: Some(s.value),
                    ratio: Some(s.ratio),
                    worst_violation: Some(s.worst_violation),
                    rounds: Some(s.rounds),
                    status: Some(s.status),
                    seconds,
                    error: None,
                },
                Err(e) => StudyRow {
                    period,
                    n,
                    value: None,
                    ratio: None,
                    worst_violation: None,
                    rounds: None,
                    status: None,
                    seconds,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let dev: Vec<f64> = rows.iter().filter_map(|r| r.ratio).map(|r| (r - 1.0).abs()).collect();
    let approaches_one = dev.windows(2).all(|w| w[1] <= w[0]);
    RefineStudy { rows, approaches_one }
}
