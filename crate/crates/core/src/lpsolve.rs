//! Self-contained dense linear-program solver.
//!
//! Two-phase primal simplex on a dense tableau. Rows are stored sparsely on
//! the problem and densified once into the tableau; equality constraints are
//! expanded into two inequalities so the tableau code stays single-path.
//! Dantzig pricing with a switch to Bland's rule after a run of degenerate
//! pivots, which guarantees termination on degenerate instances.
//!
//! Scale: adequate for the regression programs this crate builds (thousands
//! of rows/columns). Revised/sparse simplex is a possible future
//! optimization, not needed at this size.

use rayon::prelude::*;

use crate::num::{cast, Real};
use crate::{Error, Result};

/// Reduced-cost tolerance for optimality.
const COST_TOL: f64 = 1e-9;
/// Minimum usable pivot magnitude.
const PIVOT_TOL: f64 = 1e-8;
/// Ratio-test tolerance.
const RATIO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Linear program in the form
///   minimize c.v  subject to  A.v <= b,  E.v = g,  lower <= v <= upper.
#[derive(Debug, Clone)]
pub struct LpProblem<F: Real> {
    objective: Vec<F>,
    ineq: Vec<(Vec<(usize, F)>, F)>,
    eq: Vec<(Vec<(usize, F)>, F)>,
    lower: Vec<F>,
    upper: Vec<F>,
}

impl<F: Real> LpProblem<F> {
    /// New problem over `n` variables with default bounds `0 <= v`.
    pub fn new(objective: Vec<F>) -> Self {
        let n = objective.len();
        LpProblem {
            objective,
            ineq: Vec::new(),
            eq: Vec::new(),
            lower: vec![F::zero(); n],
            upper: vec![F::infinity(); n],
        }
    }

    /// Feasibility problem (zero objective) over `n` variables.
    pub fn feasibility(n: usize) -> Self {
        Self::new(vec![F::zero(); n])
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_ineq(&self) -> usize {
        self.ineq.len()
    }

    pub fn n_eq(&self) -> usize {
        self.eq.len()
    }

    /// Set bounds for variable `j`; use `-inf`/`inf` for unbounded sides.
    pub fn set_bounds(&mut self, j: usize, lower: F, upper: F) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    /// Mark variable `j` as free.
    pub fn set_free(&mut self, j: usize) {
        self.set_bounds(j, F::neg_infinity(), F::infinity());
    }

    /// Add a sparse inequality row `sum coeff_j v_j <= rhs`.
    pub fn add_ineq(&mut self, coeffs: Vec<(usize, F)>, rhs: F) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.n_vars()));
        self.ineq.push((coeffs, rhs));
    }

    /// Add a sparse equality row `sum coeff_j v_j = rhs`.
    pub fn add_eq(&mut self, coeffs: Vec<(usize, F)>, rhs: F) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.n_vars()));
        self.eq.push((coeffs, rhs));
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::LpShape("bounds length != objective length".into()));
        }
        for (_, b) in self.ineq.iter().chain(self.eq.iter()) {
            if !b.is_finite() {
                return Err(Error::LpShape("non-finite right-hand side".into()));
            }
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(Error::LpShape(format!("bounds crossed at variable {j}")));
            }
        }
        Ok(())
    }

    /// Plain-text dump in an LP-interchange style, for external cross-checks.
    pub fn to_lp_format(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "Minimize");
        let mut line = String::from(" obj:");
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                let _ = write!(line, " {:+} v{}", c, j);
            }
        }
        let _ = writeln!(s, "{line}");
        let _ = writeln!(s, "Subject To");
        for (r, (coeffs, b)) in self.ineq.iter().enumerate() {
            let mut line = format!(" c{r}:");
            for (j, a) in coeffs {
                let _ = write!(line, " {:+} v{}", a, j);
            }
            let _ = writeln!(s, "{line} <= {b}");
        }
        for (r, (coeffs, b)) in self.eq.iter().enumerate() {
            let mut line = format!(" e{r}:");
            for (j, a) in coeffs {
                let _ = write!(line, " {:+} v{}", a, j);
            }
            let _ = writeln!(s, "{line} = {b}");
        }
        let _ = writeln!(s, "Bounds");
        for j in 0..self.n_vars() {
            let _ = writeln!(s, " {} <= v{} <= {}", self.lower[j], j, self.upper[j]);
        }
        let _ = writeln!(s, "End");
        s
    }
}

/// Solver output.
#[derive(Debug, Clone)]
pub struct LpSolution<F: Real> {
    pub status: LpStatus,
    /// Variable values in the original space (empty unless optimal).
    pub v: Vec<F>,
    /// Objective value (meaningful only when optimal).
    pub objective: F,
    /// Pivot count across both phases.
    pub pivots: usize,
    /// Dual multipliers (>= 0) for the inequality rows, such that
    /// `c + A^T mu >= 0` and `-b.mu` lower-bounds the optimum.
    pub ineq_duals: Vec<F>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_pivots: usize,
    /// Consecutive degenerate pivots before Bland's rule engages.
    pub bland_after: usize,
    /// Cap on rows * columns of the dense tableau.
    pub max_tableau_entries: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_pivots: 1_000_000,
            bland_after: 50,
            max_tableau_entries: 200_000_000,
        }
    }
}

/// Solve with default options.
pub fn solve<F: Real>(problem: &LpProblem<F>) -> Result<LpSolution<F>> {
    solve_with(problem, &SolverOptions::default())
}

/// Solve ignoring the objective (any feasible point accepted).
pub fn solve_feasibility<F: Real>(problem: &LpProblem<F>) -> Result<LpSolution<F>> {
    let mut p = problem.clone();
    p.objective = vec![F::zero(); problem.n_vars()];
    solve_with(&p, &SolverOptions::default())
}

#[derive(Debug, Clone, Copy)]
enum ColKind {
    /// Internal column = original variable shifted by its lower bound.
    Shifted(usize),
    /// Positive part of a free variable.
    Pos(usize),
    /// Negative part of a free variable.
    Neg(usize),
    Slack(usize),
    Artificial,
}

pub fn solve_with<F: Real>(problem: &LpProblem<F>, opts: &SolverOptions) -> Result<LpSolution<F>> {
    problem.validate()?;
    Tableau::build(problem, opts)?.run(problem, opts)
}

struct Tableau<F: Real> {
    /// Row-major tableau; each row has `cols + 1` entries, RHS last.
    rows: Vec<Vec<F>>,
    /// Phase-2 objective row (reduced costs, then -z).
    obj: Vec<F>,
    /// Phase-1 objective row, present while artificials remain.
    obj1: Option<Vec<F>>,
    /// Basic column of each row.
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    /// Columns banned from entering (artificials in phase 2).
    banned: Vec<bool>,
    cols: usize,
    n_art: usize,
    /// Map from internal inequality-row order to slack column.
    slack_col_of_ineq: Vec<usize>,
    pivots: usize,
    degenerate_run: usize,
}

impl<F: Real> Tableau<F> {
    fn build(p: &LpProblem<F>, opts: &SolverOptions) -> Result<Self> {
        let n = p.n_vars();

        // Internal structural columns: shift finite lower bounds, split free
        // variables into positive and negative parts.
        let mut kinds: Vec<ColKind> = Vec::new();
        let mut col_of_var: Vec<usize> = vec![usize::MAX; n];
        for j in 0..n {
            col_of_var[j] = kinds.len();
            if p.lower[j].is_finite() {
                kinds.push(ColKind::Shifted(j));
            } else {
                kinds.push(ColKind::Pos(j));
                kinds.push(ColKind::Neg(j));
            }
        }
        let n_struct = kinds.len();

        // Assemble all rows as `a.x_internal <= rhs`.
        // Upper bounds become explicit rows; equalities become two rows.
        struct RawRow<F> {
            coeffs: Vec<(usize, F)>,
            rhs: F,
        }
        let shift = |j: usize| {
            if p.lower[j].is_finite() {
                p.lower[j]
            } else {
                F::zero()
            }
        };
        let to_internal = |coeffs: &[(usize, F)], rhs: F, negate: bool| -> RawRow<F> {
            let sgn = if negate { -F::one() } else { F::one() };
            let mut out: Vec<(usize, F)> = Vec::with_capacity(coeffs.len() + 2);
            let mut b = rhs * sgn;
            for &(j, a) in coeffs {
                let a = a * sgn;
                b -= a * shift(j);
                match kinds[col_of_var[j]] {
                    ColKind::Shifted(_) => out.push((col_of_var[j], a)),
                    _ => {
                        out.push((col_of_var[j], a));
                        out.push((col_of_var[j] + 1, -a));
                    }
                }
            }
            RawRow { coeffs: out, rhs: b }
        };

        let mut raw: Vec<RawRow<F>> = Vec::new();
        let mut ineq_row_index: Vec<usize> = Vec::new();
        for (coeffs, b) in &p.ineq {
            ineq_row_index.push(raw.len());
            raw.push(to_internal(coeffs, *b, false));
        }
        for j in 0..n {
            if p.upper[j].is_finite() {
                let b = p.upper[j];
                raw.push(to_internal(&[(j, F::one())], b, false));
            }
        }
        for (coeffs, b) in &p.eq {
            raw.push(to_internal(coeffs, *b, false));
            raw.push(to_internal(coeffs, *b, true));
        }

        let n_rows = raw.len();
        let n_art = raw.iter().filter(|r| r.rhs < F::zero()).count();
        let cols = n_struct + n_rows + n_art;
        if n_rows
            .checked_mul(cols + 1)
            .map(|e| e > opts.max_tableau_entries)
            .unwrap_or(true)
        {
            return Err(Error::LpTooLarge {
                rows: n_rows,
                cols,
            });
        }

        for _ in 0..n_rows {
            kinds.push(ColKind::Slack(0));
        }
        let mut slack_col_of_ineq = vec![0usize; p.ineq.len()];

        let mut rows: Vec<Vec<F>> = Vec::with_capacity(n_rows);
        let mut basis = vec![0usize; n_rows];
        let mut next_art = n_struct + n_rows;
        for (r, rr) in raw.iter().enumerate() {
            let mut row = vec![F::zero(); cols + 1];
            let negate = rr.rhs < F::zero();
            let sgn = if negate { -F::one() } else { F::one() };
            for &(c, a) in &rr.coeffs {
                row[c] += a * sgn;
            }
            let slack = n_struct + r;
            kinds[slack] = ColKind::Slack(r);
            row[slack] = sgn;
            row[cols] = rr.rhs * sgn;
            if negate {
                row[next_art] = F::one();
                basis[r] = next_art;
                next_art += 1;
            } else {
                basis[r] = slack;
            }
            rows.push(row);
        }
        for (i, &r) in ineq_row_index.iter().enumerate() {
            slack_col_of_ineq[i] = n_struct + r;
        }
        for _ in 0..n_art {
            kinds.push(ColKind::Artificial);
        }

        // Phase-2 objective: internal costs, eliminated against the basis
        // lazily (initial basic slacks have zero cost; basic artificials are
        // handled after phase 1 by re-elimination).
        let mut obj = vec![F::zero(); cols + 1];
        for j in 0..n {
            let c = p.objective[j];
            if c.is_zero() {
                continue;
            }
            match kinds[col_of_var[j]] {
                ColKind::Shifted(_) => obj[col_of_var[j]] += c,
                _ => {
                    obj[col_of_var[j]] += c;
                    obj[col_of_var[j] + 1] -= c;
                }
            }
            // Account for the lower-bound shift in the reported objective
            // later (solution is mapped back to original space).
        }

        // Phase-1 objective: sum of artificials, eliminated against the rows
        // where artificials are basic.
        let obj1 = if n_art > 0 {
            let mut o = vec![F::zero(); cols + 1];
            for (r, row) in rows.iter().enumerate() {
                if matches!(kinds[basis[r]], ColKind::Artificial) {
                    for c in 0..=cols {
                        o[c] -= row[c];
                    }
                }
            }
            for c in n_struct + n_rows..cols {
                o[c] = F::zero();
            }
            Some(o)
        } else {
            None
        };

        let banned = vec![false; cols];
        Ok(Tableau {
            rows,
            obj,
            obj1,
            basis,
            kinds,
            banned,
            cols,
            n_art,
            slack_col_of_ineq,
            pivots: 0,
            degenerate_run: 0,
        })
    }

    /// Entering column, or None at optimality for the active objective row.
    fn entering(&self, bland: bool) -> Option<usize> {
        let row = self.obj1.as_ref().unwrap_or(&self.obj);
        let tol = cast::<F>(-COST_TOL);
        if bland {
            (0..self.cols).find(|&c| !self.banned[c] && row[c] < tol)
        } else {
            let mut best: Option<(usize, F)> = None;
            for c in 0..self.cols {
                if self.banned[c] {
                    continue;
                }
                let v = row[c];
                if v < tol && best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((c, v));
                }
            }
            best.map(|(c, _)| c)
        }
    }

    /// Leaving row by ratio test; None means unbounded direction.
    fn leaving(&self, col: usize, bland: bool) -> Option<usize> {
        let ptol = cast::<F>(PIVOT_TOL);
        let rtol = cast::<F>(RATIO_TOL);
        let mut best: Option<(usize, F)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            let a = row[col];
            if a <= ptol {
                continue;
            }
            let ratio = (row[self.cols].max(F::zero())) / a;
            match best {
                None => best = Some((r, ratio)),
                Some((br, bratio)) => {
                    if ratio < bratio - rtol {
                        best = Some((r, ratio));
                    } else if (ratio - bratio).abs() <= rtol {
                        let better = if bland {
                            self.basis[r] < self.basis[br]
                        } else {
                            a > self.rows[br][col]
                        };
                        if better {
                            best = Some((r, ratio));
                        }
                    }
                }
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let cols = self.cols;
        // Normalize pivot row.
        let inv = self.rows[row][col].recip();
        {
            let pr = &mut self.rows[row];
            for v in pr.iter_mut() {
                *v = *v * inv;
            }
            pr[col] = F::one();
        }
        let pivot_row = std::mem::take(&mut self.rows[row]);
        let eliminate = |target: &mut Vec<F>| {
            let f = target[col];
            if f.abs() > cast::<F>(1e-13) {
                for (t, &p) in target.iter_mut().zip(pivot_row.iter()) {
                    *t = *t - f * p;
                }
                target[col] = F::zero();
            }
        };
        self.rows.par_iter_mut().for_each(|r| {
            if !r.is_empty() {
                let f = r[col];
                if f.abs() > cast::<F>(1e-13) {
                    for (t, &p) in r.iter_mut().zip(pivot_row.iter()) {
                        *t = *t - f * p;
                    }
                    r[col] = F::zero();
                }
            }
        });
        eliminate(&mut self.obj);
        if let Some(o1) = self.obj1.as_mut() {
            eliminate(o1);
        }
        self.rows[row] = pivot_row;
        self.basis[row] = col;
        let _ = cols;
        self.pivots += 1;
    }

    fn iterate(&mut self, opts: &SolverOptions) -> Result<LpStatus> {
        loop {
            if self.pivots >= opts.max_pivots {
                return Err(Error::LpStalled {
                    pivots: self.pivots,
                });
            }
            let bland = self.degenerate_run >= opts.bland_after;
            let Some(col) = self.entering(bland) else {
                return Ok(LpStatus::Optimal);
            };
            let Some(row) = self.leaving(col, bland) else {
                return Ok(LpStatus::Unbounded);
            };
            let theta = self.rows[row][self.cols].max(F::zero()) / self.rows[row][col];
            if theta <= cast(1e-12) {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(row, col);
        }
    }

    fn run(mut self, p: &LpProblem<F>, opts: &SolverOptions) -> Result<LpSolution<F>> {
        if self.obj1.is_some() {
            let status = self.iterate(opts)?;
            let infeas = -self.obj1.as_ref().unwrap()[self.cols];
            let bscale = F::one()
                + self
                    .rows
                    .iter()
                    .map(|r| r[self.cols].abs())
                    .fold(F::zero(), F::max);
            if status != LpStatus::Optimal || infeas > cast::<F>(1e-7) * bscale {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    v: Vec::new(),
                    objective: F::nan(),
                    pivots: self.pivots,
                    ineq_duals: Vec::new(),
                });
            }
            // Drive leftover basic artificials out, or drop redundant rows.
            let mut r = 0;
            while r < self.rows.len() {
                if matches!(self.kinds[self.basis[r]], ColKind::Artificial) {
                    let pivot_col = (0..self.cols).find(|&c| {
                        !matches!(self.kinds[c], ColKind::Artificial)
                            && self.rows[r][c].abs() > cast(PIVOT_TOL)
                    });
                    match pivot_col {
                        Some(c) => self.pivot(r, c),
                        None => {
                            // Redundant row: remove it.
                            self.rows.swap_remove(r);
                            self.basis.swap_remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
            for c in 0..self.cols {
                if matches!(self.kinds[c], ColKind::Artificial) {
                    self.banned[c] = true;
                }
            }
            self.obj1 = None;
            // Re-eliminate the phase-2 objective against the current basis.
            let mut obj = self.obj.clone();
            for (r, row) in self.rows.iter().enumerate() {
                let f = obj[self.basis[r]];
                if !f.is_zero() {
                    for c in 0..=self.cols {
                        obj[c] = obj[c] - f * row[c];
                    }
                }
            }
            self.obj = obj;
            self.degenerate_run = 0;
        }

        let status = self.iterate(opts)?;
        if status == LpStatus::Unbounded {
            return Ok(LpSolution {
                status,
                v: Vec::new(),
                objective: F::neg_infinity(),
                pivots: self.pivots,
                ineq_duals: Vec::new(),
            });
        }

        // Map the basic solution back to original variables.
        let mut v = vec![F::zero(); p.n_vars()];
        for j in 0..p.n_vars() {
            if p.lower[j].is_finite() {
                v[j] = p.lower[j];
            }
        }
        for (r, &bc) in self.basis.iter().enumerate() {
            let val = self.rows[r][self.cols];
            match self.kinds[bc] {
                ColKind::Shifted(j) => v[j] += val,
                ColKind::Pos(j) => v[j] += val,
                ColKind::Neg(j) => v[j] -= val,
                _ => {}
            }
        }
        let mut objective = F::zero();
        for j in 0..p.n_vars() {
            objective += p.objective[j] * v[j];
        }
        let ineq_duals = self
            .slack_col_of_ineq
            .iter()
            .map(|&c| self.obj[c].max(F::zero()))
            .collect();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            v,
            objective,
            pivots: self.pivots,
            ineq_duals,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DetRng;

    fn dense(coeffs: &[f64]) -> Vec<(usize, f64)> {
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| (j, *c))
            .collect()
    }

    #[test]
    fn minimize_with_lower_row() {
        // minimize v1 s.t. v1 >= 2  ->  v1 = 2.
        let mut p = LpProblem::new(vec![1.0]);
        p.add_ineq(dense(&[-1.0]), -2.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.v[0] - 2.0).abs() < 1e-9);
        assert!((s.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        // v1 <= -1 with v1 >= 0.
        let mut p = LpProblem::new(vec![0.0]);
        p.add_ineq(dense(&[1.0]), -1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut p = LpProblem::new(vec![-1.0]);
        p.add_ineq(dense(&[-1.0]), 0.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn feasibility_simplex_weights() {
        // sum w = 1, w >= 0, w1 <= 0.5 -> some feasible w.
        let mut p = LpProblem::<f64>::feasibility(3);
        p.add_eq(dense(&[1.0, 1.0, 1.0]), 1.0);
        p.add_ineq(dense(&[1.0, 0.0, 0.0]), 0.5);
        let s = solve_feasibility(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        let sum: f64 = s.v.iter().sum();
        assert!((sum - 1.0).abs() < 1e-7);
        assert!(s.v[0] <= 0.5 + 1e-7);
        assert!(s.v.iter().all(|&w| w >= -1e-9));
    }

    #[test]
    fn feasibility_contradiction() {
        // sum w = 1, w >= 0, 2 sum w <= 1.
        let mut p = LpProblem::<f64>::feasibility(4);
        p.add_eq(dense(&[1.0, 1.0, 1.0, 1.0]), 1.0);
        p.add_ineq(dense(&[2.0, 2.0, 2.0, 2.0]), 1.0);
        let s = solve_feasibility(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_free_variables() {
        // minimize x + y s.t. x + 2y = 4, x free, y >= 0  -> x = 4 - 2y;
        // objective = 4 - y, unbounded? y >= 0 grows => obj -> -inf? c = (1,1):
        // obj = x + y = 4 - 2y + y = 4 - y -> unbounded below.
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.set_free(0);
        p.add_eq(dense(&[1.0, 2.0]), 4.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);

        // With y <= 3 it becomes bounded: optimum at y = 3, x = -2, obj = 1.
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.set_free(0);
        p.set_bounds(1, 0.0, 3.0);
        p.add_eq(dense(&[1.0, 2.0]), 4.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-7, "obj {}", s.objective);
        assert!((s.v[0] + 2.0).abs() < 1e-7);
        assert!((s.v[1] - 3.0).abs() < 1e-7);
    }

    /// Brute-force oracle: enumerate all triples of tight constraints among
    /// the 6 rows, solve the 3x3 systems, keep feasible points, and take the
    /// best objective.
    fn vertex_oracle(a: &[[f64; 3]; 6], b: &[f64; 6], c: &[f64; 3]) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..6 {
            for j in (i + 1)..6 {
                for k in (j + 1)..6 {
                    let m = [a[i], a[j], a[k]];
                    let rhs = [b[i], b[j], b[k]];
                    if let Some(x) = solve3(&m, &rhs) {
                        let feasible = (0..6).all(|r| {
                            a[r][0] * x[0] + a[r][1] * x[1] + a[r][2] * x[2] <= b[r] + 1e-7
                        });
                        if feasible {
                            let obj = c[0] * x[0] + c[1] * x[1] + c[2] * x[2];
                            best = Some(best.map_or(obj, |b2: f64| b2.min(obj)));
                        }
                    }
                }
            }
        }
        best
    }

    fn solve3(m: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
        let det = |m: &[[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det(m);
        if d.abs() < 1e-9 {
            return None;
        }
        let mut x = [0.0; 3];
        for col in 0..3 {
            let mut mc = *m;
            for r in 0..3 {
                mc[r][col] = b[r];
            }
            x[col] = det(&mc) / d;
        }
        Some(x)
    }

    /// Random bounded-feasible 3-var LP: four rows positively span R^3 (a
    /// perturbed simplex) so the polytope is bounded, plus two random rows;
    /// all rows pass on the positive side of a known interior point.
    fn random_lp(rng: &mut DetRng) -> ([[f64; 3]; 6], [f64; 6], [f64; 3]) {
        let base = [
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, -1.0],
            [1.0, 1.0, 1.0],
        ];
        let interior = [
            rng.next_range(-1.0, 1.0),
            rng.next_range(-1.0, 1.0),
            rng.next_range(-1.0, 1.0),
        ];
        let mut a = [[0.0; 3]; 6];
        let mut b = [0.0; 6];
        for r in 0..6 {
            let row: [f64; 3] = if r < 4 {
                let mut row = base[r];
                for v in row.iter_mut() {
                    *v += rng.next_range(-0.2, 0.2);
                }
                row
            } else {
                [
                    rng.next_range(-1.0, 1.0),
                    rng.next_range(-1.0, 1.0),
                    rng.next_range(-1.0, 1.0),
                ]
            };
            a[r] = row;
            let at_interior = row[0] * interior[0] + row[1] * interior[1] + row[2] * interior[2];
            b[r] = at_interior + rng.next_range(0.1, 2.0);
        }
        let c = [
            rng.next_range(-1.0, 1.0),
            rng.next_range(-1.0, 1.0),
            rng.next_range(-1.0, 1.0),
        ];
        (a, b, c)
    }

    #[test]
    fn matches_vertex_enumeration_oracle() {
        let mut rng = DetRng::new(1234);
        let mut checked = 0;
        while checked < 200 {
            let (a, b, c) = random_lp(&mut rng);
            let Some(oracle) = vertex_oracle(&a, &b, &c) else {
                continue;
            };
            let mut p = LpProblem::new(c.to_vec());
            for j in 0..3 {
                p.set_free(j);
            }
            for r in 0..6 {
                p.add_ineq(dense(&a[r]), b[r]);
            }
            let s = solve(&p).unwrap();
            assert_eq!(s.status, LpStatus::Optimal, "lp #{checked}");
            assert!(
                (s.objective - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()),
                "lp #{checked}: simplex {} vs oracle {}",
                s.objective,
                oracle
            );
            checked += 1;
        }
    }

    #[test]
    fn duality_gap_on_random_feasible_lps() {
        let mut rng = DetRng::new(777);
        for trial in 0..100 {
            let (a, b, c) = random_lp(&mut rng);
            // Nonnegative variables here so the dual certificate has the
            // documented form c + A^T mu >= 0.
            let mut p = LpProblem::new(c.to_vec());
            for r in 0..6 {
                p.add_ineq(dense(&a[r]), b[r]);
            }
            let s = solve(&p).unwrap();
            if s.status != LpStatus::Optimal {
                continue;
            }
            let mu = &s.ineq_duals;
            for j in 0..3 {
                let mut red = c[j];
                for r in 0..6 {
                    red += mu[r] * a[r][j];
                }
                assert!(red >= -1e-7, "trial {trial}: dual infeasible at {j}");
            }
            let bound: f64 = -(0..6).map(|r| mu[r] * b[r]).sum::<f64>();
            assert!(
                s.objective - bound <= 1e-5,
                "trial {trial}: primal {} dual bound {}",
                s.objective,
                bound
            );
        }
    }

    #[test]
    fn degenerate_fuzz_terminates() {
        let mut rng = DetRng::new(4242);
        for _ in 0..1000 {
            let n = 2 + (rng.next_u64() % 3) as usize;
            let m = 2 + (rng.next_u64() % 4) as usize;
            let c: Vec<f64> = (0..n).map(|_| rng.next_range(-1.0, 1.0)).collect();
            let mut p = LpProblem::new(c);
            let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
            for _ in 0..m {
                let coeffs: Vec<f64> = (0..n).map(|_| rng.next_range(-1.0, 1.0)).collect();
                // Zero RHS everywhere: the origin is feasible and every basic
                // solution is maximally degenerate.
                rows.push((dense(&coeffs), 0.0));
            }
            // Duplicate a row to force ties in the ratio test.
            rows.push(rows[0].clone());
            for (coeffs, b) in rows {
                p.add_ineq(coeffs, b);
            }
            let s = solve(&p).expect("must terminate without stalling");
            assert!(matches!(
                s.status,
                LpStatus::Optimal | LpStatus::Unbounded | LpStatus::Infeasible
            ));
        }
    }

    #[test]
    fn solution_respects_feasibility_tolerances() {
        let mut rng = DetRng::new(31);
        for _ in 0..50 {
            let (a, b, c) = random_lp(&mut rng);
            let mut p = LpProblem::new(c.to_vec());
            for r in 0..6 {
                p.add_ineq(dense(&a[r]), b[r]);
            }
            let s = solve(&p).unwrap();
            if s.status != LpStatus::Optimal {
                continue;
            }
            let bmax = b.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            for r in 0..6 {
                let lhs: f64 = (0..3).map(|j| a[r][j] * s.v[j]).sum();
                assert!(lhs <= b[r] + 1e-7 * (1.0 + bmax));
            }
            for j in 0..3 {
                assert!(s.v[j] >= -1e-9);
            }
        }
    }

    #[test]
    fn lp_format_dump_mentions_all_sections() {
        let mut p = LpProblem::new(vec![1.0, 0.0]);
        p.add_ineq(dense(&[1.0, 1.0]), 2.0);
        p.add_eq(dense(&[1.0, -1.0]), 0.0);
        let text = p.to_lp_format();
        for section in ["Minimize", "Subject To", "Bounds", "End"] {
            assert!(text.contains(section), "missing {section}:\n{text}");
        }
    }
}
