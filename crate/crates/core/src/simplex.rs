//! Dense bounded-variable dual simplex.
//!
//! Solves `maximize c·x` subject to rows `a_i·x <= b_i` and box bounds
//! `l <= x <= u`. Every row gets a slack `s_i >= 0`, so the working system is
//! `A x + s = b`. The method keeps the compact tableau `B^-1 N` over the
//! nonbasic columns and is built for cutting-plane use: rows can be appended
//! to a solved problem and the next [`DualSimplex::solve`] resumes from the
//! previous basis, which remains dual feasible.
//!
//! The leaving row is chosen by [`Pricing`]. Under [`Pricing::Bland`] it is
//! the infeasible basic variable with the smallest column index and the
//! entering column minimizes the dual ratio with ties going to the smallest
//! column index, which guarantees termination. [`Pricing::Dantzig`] takes the
//! largest infeasibility instead and switches to Bland's rule for as long as
//! pivots stay dual degenerate, so it keeps the same guarantee.
//!
//! The starting point requires a dual-feasible assignment of the nonbasic
//! structural variables: a column with positive cost starts at its upper
//! bound, negative cost at its lower bound, zero cost at its lower bound.
//! The corresponding bound must be finite.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("linear program is infeasible (row {row} cannot be repaired)")]
    Infeasible { row: usize },

    #[error("iteration limit of {0} pivots reached")]
    IterationLimit(usize),

    #[error("basis matrix is numerically singular")]
    Singular,

    #[error("column {column} needs a finite {side} bound for a dual feasible start")]
    MissingBound { column: usize, side: &'static str },

    #[error("row has {got} coefficients, expected {expected}")]
    RowLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pricing {
    Bland,
    Dantzig,
}

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Primal bound violation accepted as feasible.
    pub feasibility_tol: f64,
    /// Smallest tableau entry accepted as a pivot.
    pub pivot_tol: f64,
    /// Pivots between two refactorizations of the tableau.
    pub refactor_every: usize,
    pub max_iterations: usize,
    pub pricing: Pricing,
    /// Consecutive degenerate pivots after which Dantzig pricing falls back
    /// to Bland's rule.
    pub degenerate_limit: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feasibility_tol: 1e-10,
            pivot_tol: 1e-9,
            refactor_every: 400,
            max_iterations: 2_000_000,
            pricing: Pricing::Dantzig,
            degenerate_limit: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Basic(usize),
    Nonbasic(usize),
}

#[derive(Debug, Clone)]
pub struct DualSimplex {
    n: usize,
    cost: Vec<f64>,
    // bounds, values and positions span structural columns then slacks
    lower: Vec<f64>,
    upper: Vec<f64>,
    value: Vec<f64>,
    at_upper: Vec<bool>,
    slot: Vec<Slot>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    // row-major m × n, row i expresses basis[i] through the nonbasic columns
    tableau: Vec<f64>,
    // reduced costs of the nonbasic columns, by slot
    reduced: Vec<f64>,
    options: SimplexOptions,
    iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
}

impl DualSimplex {
    pub fn new(cost: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>, options: SimplexOptions) -> Result<Self, LpError> {
        let n = cost.len();
        assert_eq!(lower.len(), n, "lower bound length");
        assert_eq!(upper.len(), n, "upper bound length");
        let mut at_upper = vec![false; n];
        let mut value = vec![0.0; n];
        for j in 0..n {
            if cost[j] > 0.0 {
                if !upper[j].is_finite() {
                    return Err(LpError::MissingBound { column: j, side: "upper" });
                }
                at_upper[j] = true;
                value[j] = upper[j];
            } else {
                if !lower[j].is_finite() {
                    return Err(LpError::MissingBound { column: j, side: "lower" });
                }
                value[j] = lower[j];
            }
        }
        Ok(DualSimplex {
            n,
            reduced: cost.clone(),
            cost,
            lower,
            upper,
            value,
            at_upper,
            slot: (0..n).map(Slot::Nonbasic).collect(),
            rows: Vec::new(),
            rhs: Vec::new(),
            basis: Vec::new(),
            nonbasic: (0..n).collect(),
            tableau: Vec::new(),
            options,
            iterations: 0,
            since_refactor: 0,
            degenerate_run: 0,
        })
    }

    pub fn num_columns(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    fn trow(&self, i: usize) -> &[f64] {
        &self.tableau[i * self.n..(i + 1) * self.n]
    }

    /// Appends the row `coeffs·x <= rhs`; returns its row index.
    pub fn add_row(&mut self, coeffs: &[f64], rhs: f64) -> Result<usize, LpError> {
        let n = self.n;
        if coeffs.len() != n {
            return Err(LpError::RowLength { expected: n, got: coeffs.len() });
        }
        let m = self.rows.len();
        let slack = n + m;
        // s = b - a·x, with basic structurals substituted out
        let mut t: Vec<f64> = self.nonbasic.iter().map(|&v| if v < n { coeffs[v] } else { 0.0 }).collect();
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n && coeffs[b] != 0.0 {
                let f = coeffs[b];
                for (tq, rq) in t.iter_mut().zip(self.trow(i)) {
                    *tq -= f * rq;
                }
            }
        }
        let activity: f64 = coeffs.iter().zip(&self.value).map(|(a, x)| a * x).sum();
        self.lower.push(0.0);
        self.upper.push(f64::INFINITY);
        self.value.push(rhs - activity);
        self.at_upper.push(false);
        self.slot.push(Slot::Basic(m));
        self.basis.push(slack);
        self.tableau.extend_from_slice(&t);
        self.rows.push(coeffs.to_vec());
        self.rhs.push(rhs);
        Ok(m)
    }

    /// Runs dual simplex pivots until the current basis is primal feasible.
    pub fn solve(&mut self) -> Result<(), LpError> {
        if self.since_refactor > 0 {
            self.refactor()?;
        }
        loop {
            self.run_pivots()?;
            if self.since_refactor == 0 {
                return Ok(());
            }
            self.refactor()?;
            if self.leaving_row().is_none() {
                return Ok(());
            }
        }
    }

    fn run_pivots(&mut self) -> Result<(), LpError> {
        while let Some((r, to_upper)) = self.leaving_row() {
            if self.iterations >= self.options.max_iterations {
                return Err(LpError::IterationLimit(self.iterations));
            }
            let (q, ratio) = self.entering_slot(r, to_upper).ok_or(LpError::Infeasible { row: r })?;
            if ratio <= 1e-12 {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(r, q, to_upper);
            self.iterations += 1;
            self.since_refactor += 1;
            if self.since_refactor >= self.options.refactor_every.max(2 * self.rows.len()) {
                self.refactor()?;
            }
        }
        Ok(())
    }

    fn bland_mode(&self) -> bool {
        self.options.pricing == Pricing::Bland || self.degenerate_run >= self.options.degenerate_limit
    }

    fn leaving_row(&self) -> Option<(usize, bool)> {
        let tol = self.options.feasibility_tol;
        let bland = self.bland_mode();
        // (key, row, to_upper): Bland minimizes the column index, Dantzig
        // maximizes the violation and breaks ties by column index
        let mut best: Option<(f64, usize, usize, bool)> = None;
        for (i, &b) in self.basis.iter().enumerate() {
            let x = self.value[b];
            let (viol, to_upper) = if x < self.lower[b] - tol {
                (self.lower[b] - x, false)
            } else if x > self.upper[b] + tol {
                (x - self.upper[b], true)
            } else {
                continue;
            };
            let better = match best {
                None => true,
                Some((_, col, _, _)) if bland => b < col,
                Some((v0, col, _, _)) => viol > v0 || (viol == v0 && b < col),
            };
            if better {
                best = Some((viol, b, i, to_upper));
            }
        }
        best.map(|(_, _, i, to_upper)| (i, to_upper))
    }

    fn entering_slot(&self, r: usize, to_upper: bool) -> Option<(usize, f64)> {
        let bland = self.bland_mode();
        let mut best: Option<(usize, f64, f64)> = None;
        for (q, &alpha) in self.trow(r).iter().enumerate() {
            if alpha.abs() <= self.options.pivot_tol {
                continue;
            }
            let v = self.nonbasic[q];
            // x_r moves by -alpha * dx_v; below its lower bound it must rise.
            let increases = !self.at_upper[v];
            let eligible = if to_upper {
                (increases && alpha > 0.0) || (!increases && alpha < 0.0)
            } else {
                (increases && alpha < 0.0) || (!increases && alpha > 0.0)
            };
            if !eligible || self.lower[v] == self.upper[v] {
                continue;
            }
            let d = if self.at_upper[v] { self.reduced[q].max(0.0) } else { (-self.reduced[q]).max(0.0) };
            let ratio = d / alpha.abs();
            best = match best {
                None => Some((q, ratio, alpha.abs())),
                Some((q0, r0, a0)) => {
                    let tie = 1e-12 * (1.0 + r0);
                    if ratio < r0 - tie {
                        Some((q, ratio, alpha.abs()))
                    } else if ratio <= r0 + tie {
                        let take = if bland { v < self.nonbasic[q0] } else { alpha.abs() > a0 };
                        if take {
                            Some((q, ratio.min(r0), alpha.abs()))
                        } else {
                            best
                        }
                    } else {
                        best
                    }
                }
            };
        }
        best.map(|(q, ratio, _)| (q, ratio))
    }

    fn pivot(&mut self, r: usize, q: usize, to_upper: bool) {
        let n = self.n;
        let leaving = self.basis[r];
        let entering = self.nonbasic[q];
        let target = if to_upper { self.upper[leaving] } else { self.lower[leaving] };
        let alpha = self.tableau[r * n + q];
        let delta = (self.value[leaving] - target) / alpha;
        for (i, &b) in self.basis.iter().enumerate() {
            self.value[b] -= self.tableau[i * n + q] * delta;
        }
        self.value[entering] += delta;
        self.value[leaving] = target;
        self.at_upper[leaving] = to_upper;

        let inv = 1.0 / alpha;
        let mut prow: Vec<f64> = self.trow(r).iter().map(|v| v * inv).collect();
        prow[q] = inv;
        for (i, row) in self.tableau.chunks_exact_mut(n).enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                row[q] = 0.0;
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= f * p;
                }
            }
        }
        let dq = self.reduced[q];
        if dq != 0.0 {
            self.reduced[q] = 0.0;
            for (d, p) in self.reduced.iter_mut().zip(&prow) {
                *d -= dq * p;
            }
        }
        self.tableau[r * n..(r + 1) * n].copy_from_slice(&prow);
        self.basis[r] = entering;
        self.nonbasic[q] = leaving;
        self.slot[entering] = Slot::Basic(r);
        self.slot[leaving] = Slot::Nonbasic(q);
    }

    // Entry of column `v` of [A I] in row `i`.
    fn column(&self, v: usize, i: usize) -> f64 {
        if v < self.n {
            self.rows[i][v]
        } else if v - self.n == i {
            1.0
        } else {
            0.0
        }
    }

    /// Rebuilds the tableau, basic values, and reduced costs from the
    /// original rows and the current basis.
    ///
    /// With `k` basic structurals, exactly `k` rows have a nonbasic slack and
    /// the basis reduces to the `k × k` block of `A` on those rows and columns.
    pub fn refactor(&mut self) -> Result<(), LpError> {
        let (n, m) = (self.n, self.rows.len());
        self.since_refactor = 0;
        if m == 0 {
            self.reduced = self.nonbasic.iter().map(|&v| self.cost[v]).collect();
            return Ok(());
        }
        let basic_struct: Vec<usize> = self.basis.iter().copied().filter(|&b| b < n).collect();
        let tight_rows: Vec<usize> = self.nonbasic.iter().filter(|&&v| v >= n).map(|&v| v - n).collect();
        let k = basic_struct.len();
        if tight_rows.len() != k {
            return Err(LpError::Singular);
        }
        let block = DMatrix::from_fn(k, k, |a, b| self.rows[tight_rows[a]][basic_struct[b]]);
        let lu = block.lu();
        if k > 0 {
            let u = lu.u();
            let scale = u.diagonal().iter().fold(0.0f64, |s, v| s.max(v.abs()));
            let small = u.diagonal().iter().fold(f64::INFINITY, |s, v| s.min(v.abs()));
            if small.is_nan() || small <= 1e-13 * scale.max(1.0) {
                return Err(LpError::Singular);
            }
        }
        let solve = |rhs: Vec<f64>| -> Vec<f64> {
            if k == 0 {
                return Vec::new();
            }
            let v = nalgebra::DVector::from_vec(rhs);
            lu.solve(&v).expect("checked nonsingular").iter().copied().collect()
        };
        // B^-1 applied to a column of [A I]: structural basics from the block,
        // basic slacks from their own rows.
        let basis_solve = |col: &dyn Fn(usize) -> f64| -> Vec<f64> {
            let w = solve(tight_rows.iter().map(|&i| col(i)).collect());
            let mut out = vec![0.0; m];
            let mut struct_pos = 0;
            let wmap: Vec<(usize, f64)> = basic_struct.iter().copied().zip(w.iter().copied()).collect();
            for (i, &b) in self.basis.iter().enumerate() {
                if b < n {
                    out[i] = w[struct_pos];
                    struct_pos += 1;
                } else {
                    let row = b - n;
                    let inner: f64 = wmap.iter().map(|&(j, wj)| self.rows[row][j] * wj).sum();
                    out[i] = col(row) - inner;
                }
            }
            out
        };
        // basis order of structurals must match basic_struct order
        let mut tableau = vec![0.0; m * n];
        for (q, &v) in self.nonbasic.iter().enumerate() {
            let w = basis_solve(&|i| self.column(v, i));
            for i in 0..m {
                tableau[i * n + q] = w[i];
            }
        }
        // right-hand side net of nonbasic values
        let mut net = self.rhs.clone();
        for &v in &self.nonbasic {
            let x = self.value[v];
            if x != 0.0 {
                for (i, slot) in net.iter_mut().enumerate() {
                    *slot -= self.column(v, i) * x;
                }
            }
        }
        let beta = basis_solve(&|i| net[i]);
        for (i, &b) in self.basis.iter().enumerate() {
            self.value[b] = beta[i];
        }
        let cb: Vec<f64> = self.basis.iter().map(|&b| if b < n { self.cost[b] } else { 0.0 }).collect();
        self.reduced = self
            .nonbasic
            .iter()
            .enumerate()
            .map(|(q, &v)| {
                let c = if v < n { self.cost[v] } else { 0.0 };
                c - (0..m).map(|i| cb[i] * tableau[i * n + q]).sum::<f64>()
            })
            .collect();
        self.tableau = tableau;
        self.flip_dual_infeasible();
        Ok(())
    }

    // Nonbasic columns whose reduced cost drifted to the wrong sign are moved
    // to the opposite bound when it is finite; basic values follow.
    fn flip_dual_infeasible(&mut self) {
        let tol = 1e-11;
        let n = self.n;
        for q in 0..n {
            let v = self.nonbasic[q];
            let d = self.reduced[q];
            let (wrong, target) = if self.at_upper[v] { (d < -tol, self.lower[v]) } else { (d > tol, self.upper[v]) };
            if wrong && target.is_finite() {
                let delta = target - self.value[v];
                for (i, &b) in self.basis.iter().enumerate() {
                    self.value[b] -= self.tableau[i * n + q] * delta;
                }
                self.value[v] = target;
                self.at_upper[v] = !self.at_upper[v];
            }
        }
    }

    /// Structural variable values.
    pub fn primal(&self) -> &[f64] {
        &self.value[..self.n]
    }

    pub fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.value).map(|(c, x)| c * x).sum()
    }

    /// Row duals `y_i >= 0` read off the slack reduced costs.
    pub fn duals(&self) -> Vec<f64> {
        (0..self.rows.len())
            .map(|i| match self.slot[self.n + i] {
                Slot::Nonbasic(q) => -self.reduced[q],
                Slot::Basic(_) => 0.0,
            })
            .collect()
    }

    /// Upper bound on the optimum from the (clamped) row duals, recomputed
    /// from the original data: `b·y + sum_j max(d_j,0) u_j - max(-d_j,0) l_j`
    /// with `d = c - A^T y`.
    pub fn dual_bound(&self) -> f64 {
        let y: Vec<f64> = self.duals().into_iter().map(|v| v.max(0.0)).collect();
        let mut d = self.cost.clone();
        for (row, &yi) in self.rows.iter().zip(&y) {
            if yi != 0.0 {
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= yi * a;
                }
            }
        }
        let mut bound: f64 = self.rhs.iter().zip(&y).map(|(b, y)| b * y).sum();
        for ((dj, lo), hi) in d.iter().zip(&self.lower).zip(&self.upper) {
            if *dj > 0.0 {
                bound += dj * hi;
            } else if *dj < 0.0 {
                bound += dj * lo;
            }
        }
        bound
    }

    /// Largest violation of a row or bound by the current structural values,
    /// recomputed from the original data.
    pub fn max_primal_violation(&self) -> f64 {
        let x = self.primal();
        let mut worst: f64 = 0.0;
        for (row, b) in self.rows.iter().zip(&self.rhs) {
            let act: f64 = row.iter().zip(x).map(|(a, x)| a * x).sum();
            worst = worst.max(act - b);
        }
        for ((xj, lo), hi) in x.iter().zip(&self.lower).zip(&self.upper) {
            worst = worst.max(lo - xj).max(xj - hi);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(cost: &[f64], lo: &[f64], hi: &[f64], rows: &[(&[f64], f64)]) -> Result<DualSimplex, LpError> {
        let mut s = DualSimplex::new(cost.to_vec(), lo.to_vec(), hi.to_vec(), SimplexOptions::default())?;
        for (a, b) in rows {
            s.add_row(a, *b)?;
        }
        s.solve()?;
        Ok(s)
    }

    #[test]
    fn small_maximization() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, 0 <= x,y <= 3 -> x=3, y=1, value 11
        let s = lp(&[3.0, 2.0], &[0.0, 0.0], &[3.0, 3.0], &[(&[1.0, 1.0], 4.0), (&[1.0, 3.0], 6.0)]).unwrap();
        assert!((s.objective() - 11.0).abs() < 1e-12);
        assert!((s.primal()[0] - 3.0).abs() < 1e-12);
        assert!((s.primal()[1] - 1.0).abs() < 1e-12);
        assert!((s.dual_bound() - 11.0).abs() < 1e-9);
    }

    #[test]
    fn negative_lower_bounds_and_negative_costs() {
        // max x - y, x - y <= 1, -1 <= x,y <= 1 -> value 1
        let s = lp(&[1.0, -1.0], &[-1.0, -1.0], &[1.0, 1.0], &[(&[1.0, -1.0], 1.0)]).unwrap();
        assert!((s.objective() - 1.0).abs() < 1e-12);
        assert!(s.max_primal_violation() <= 1e-12);
    }

    #[test]
    fn detects_infeasibility() {
        // x >= 2 written as -x <= -2 with x <= 1
        let err = lp(&[1.0], &[0.0], &[1.0], &[(&[-1.0], -2.0)]).unwrap_err();
        assert!(matches!(err, LpError::Infeasible { .. }));
    }

    #[test]
    fn rows_added_after_solve_warm_start() {
        let mut s =
            DualSimplex::new(vec![1.0, 1.0], vec![0.0, 0.0], vec![5.0, 5.0], SimplexOptions::default()).unwrap();
        s.add_row(&[1.0, 2.0], 6.0).unwrap();
        s.solve().unwrap();
        let first = s.objective();
        s.add_row(&[2.0, 1.0], 6.0).unwrap();
        s.solve().unwrap();
        let second = s.objective();
        assert!(second <= first + 1e-12);
        assert!((second - 4.0).abs() < 1e-12, "{second}");
    }

    #[test]
    fn matches_vertex_enumeration_on_random_problems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let cost: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let rows: Vec<([f64; 2], f64)> = (0..4)
                .map(|_| ([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], rng.gen_range(0.1..1.0)))
                .collect();
            let mut s = DualSimplex::new(cost.clone(), vec![-1.0; 2], vec![1.0; 2], SimplexOptions::default()).unwrap();
            for (a, b) in &rows {
                s.add_row(a, *b).unwrap();
            }
            s.solve().unwrap();
            // brute force over all pairwise intersections of constraint lines
            let mut lines: Vec<([f64; 2], f64)> = rows.clone();
            lines.extend([([1.0, 0.0], 1.0), ([-1.0, 0.0], 1.0), ([0.0, 1.0], 1.0), ([0.0, -1.0], 1.0)]);
            let mut best = f64::NEG_INFINITY;
            for p in 0..lines.len() {
                for q in p + 1..lines.len() {
                    let (a, b) = (lines[p], lines[q]);
                    let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let x = (a.1 * b.0[1] - a.0[1] * b.1) / det;
                    let y = (a.0[0] * b.1 - a.1 * b.0[0]) / det;
                    if lines.iter().all(|(n, c)| n[0] * x + n[1] * y <= c + 1e-9) {
                        best = best.max(cost[0] * x + cost[1] * y);
                    }
                }
            }
            assert!((s.objective() - best).abs() < 1e-9, "{} vs {}", s.objective(), best);
            assert!(s.dual_bound() - s.objective() < 1e-9);
        }
    }

    #[test]
    fn pricing_rules_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = 6;
            let cost: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let rows: Vec<(Vec<f64>, f64)> = (0..12)
                .map(|_| ((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(), rng.gen_range(0.1..1.0)))
                .collect();
            let run = |pricing| {
                let opts = SimplexOptions { pricing, ..SimplexOptions::default() };
                let mut s = DualSimplex::new(cost.clone(), vec![-1.0; n], vec![1.0; n], opts).unwrap();
                for (a, b) in &rows[..6] {
                    s.add_row(a, *b).unwrap();
                }
                s.solve().unwrap();
                for (a, b) in &rows[6..] {
                    s.add_row(a, *b).unwrap();
                }
                s.solve().unwrap();
                s.objective()
            };
            assert!((run(Pricing::Bland) - run(Pricing::Dantzig)).abs() < 1e-9);
        }
    }

    #[test]
    fn refactor_reproduces_the_tableau() {
        let mut s =
            DualSimplex::new(vec![1.0, 2.0, -0.5], vec![-1.0; 3], vec![1.0; 3], SimplexOptions::default()).unwrap();
        s.add_row(&[1.0, 1.0, 1.0], 1.0).unwrap();
        s.add_row(&[1.0, -1.0, 2.0], 0.5).unwrap();
        s.add_row(&[-1.0, 2.0, 0.0], 1.5).unwrap();
        s.solve().unwrap();
        let before = (s.tableau.clone(), s.value.clone(), s.reduced.clone());
        s.refactor().unwrap();
        for (a, b) in before.0.iter().zip(&s.tableau) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in before.1.iter().zip(&s.value) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in before.2.iter().zip(&s.reduced) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_problem_terminates() {
        // many redundant rows through the optimal vertex
        let mut s =
            DualSimplex::new(vec![1.0, 1.0, 1.0], vec![0.0; 3], vec![1.0; 3], SimplexOptions::default()).unwrap();
        for k in 0..20 {
            let t = k as f64 / 20.0;
            s.add_row(&[1.0, t, 1.0 - t], 1.0).unwrap();
            s.add_row(&[t, 1.0, 1.0 - t], 1.0).unwrap();
        }
        s.solve().unwrap();
        assert!(s.max_primal_violation() < 1e-10);
        assert!((s.dual_bound() - s.objective()).abs() < 1e-9);
        let opts = SimplexOptions { pricing: Pricing::Bland, ..SimplexOptions::default() };
        let mut b = DualSimplex::new(vec![1.0, 1.0, 1.0], vec![0.0; 3], vec![1.0; 3], opts).unwrap();
        for k in 0..20 {
            let t = k as f64 / 20.0;
            b.add_row(&[1.0, t, 1.0 - t], 1.0).unwrap();
            b.add_row(&[t, 1.0, 1.0 - t], 1.0).unwrap();
        }
        b.solve().unwrap();
        assert!((b.objective() - s.objective()).abs() < 1e-12);
    }
}
