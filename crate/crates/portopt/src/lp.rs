//! Continuous LP solver: revised simplex over bounded variables.
//!
//! The solver returns primal values, one dual value per row, and a status.
//! Sign convention for a minimization problem: duals of `<=` rows are
//! nonpositive, duals of `>=` rows are nonnegative, duals of `=` rows are
//! free. Solves are deterministic: entering ties break on the lowest column
//! index, leaving ties on the largest pivot magnitude then lowest index.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::Error;

pub const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
    pub name: String,
}

/// A minimization LP in computational form: `min c'x` subject to row
/// constraints and variable bounds (lower defaults to 0, upper to +inf).
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub col_lower: Vec<f64>,
    pub col_upper: Vec<f64>,
    pub col_names: Vec<String>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_col(&mut self, cost: f64, lower: f64, upper: f64, name: impl Into<String>) -> usize {
        self.objective.push(cost);
        self.col_lower.push(lower);
        self.col_upper.push(upper);
        self.col_names.push(name.into());
        self.objective.len() - 1
    }

    pub fn add_row(
        &mut self,
        coeffs: Vec<(usize, f64)>,
        sense: RowSense,
        rhs: f64,
        name: impl Into<String>,
    ) -> usize {
        self.rows.push(Row {
            coeffs,
            sense,
            rhs,
            name: name.into(),
        });
        self.rows.len() - 1
    }

    pub fn validate(&self) -> Result<(), Error> {
        let n = self.num_cols();
        for j in 0..n {
            if !self.objective[j].is_finite() {
                return Err(Error::Lp(format!("non-finite cost on column {j}")));
            }
            if self.col_lower[j] > self.col_upper[j] {
                return Err(Error::Lp(format!(
                    "column {} has lower bound {} above upper bound {}",
                    self.col_names[j], self.col_lower[j], self.col_upper[j]
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::Lp(format!("non-finite rhs on row {i}")));
            }
            if row.coeffs.is_empty() {
                return Err(Error::Lp(format!("empty row {} ({})", i, row.name)));
            }
            for &(j, v) in &row.coeffs {
                if j >= n {
                    return Err(Error::Lp(format!("row {} references column {}", row.name, j)));
                }
                if !v.is_finite() {
                    return Err(Error::Lp(format!("non-finite coefficient in row {}", row.name)));
                }
            }
        }
        Ok(())
    }

    /// Text dump in a fixed LP-interchange layout for cross-checking against
    /// external solvers.
    pub fn write_lp_text(&self) -> String {
        let mut out = String::new();
        out.push_str("Minimize\n obj:");
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                let _ = write!(out, " {:+} {}", c, self.col_names[j]);
            }
        }
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", row.name);
            for &(j, v) in &row.coeffs {
                let _ = write!(out, " {:+} {}", v, self.col_names[j]);
            }
            let op = match row.sense {
                RowSense::Le => "<=",
                RowSense::Eq => "=",
                RowSense::Ge => ">=",
            };
            let _ = writeln!(out, " {} {}", op, row.rhs);
        }
        out.push_str("Bounds\n");
        for j in 0..self.num_cols() {
            let _ = writeln!(
                out,
                " {} <= {} <= {}",
                self.col_lower[j], self.col_names[j], self.col_upper[j]
            );
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One dual value per row.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Basic variable index per row, for warm starts.
    pub basis: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub feas_tol: f64,
    pub pivot_tol: f64,
    /// Pivot budget; defaults to `50 * (rows + cols)` when `None`.
    pub max_pivots: Option<usize>,
    pub refactor_every: usize,
    /// Consecutive degenerate pivots before Bland's rule engages.
    pub bland_threshold: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            pivot_tol: 1e-9,
            max_pivots: None,
            refactor_every: 100,
            bland_threshold: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarStatus {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    FreeZero,
}

struct Worker {
    m: usize,
    /// Sparse columns over rows, structural then slack then artificial.
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    status: Vec<VarStatus>,
    values: Vec<f64>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    opts: SimplexOptions,
    pivots: usize,
    degenerate_streak: usize,
    bland: bool,
}

enum StepOutcome {
    Optimal,
    Unbounded,
    Progress,
}

impl Worker {
    fn binv_row(&self, i: usize) -> &[f64] {
        &self.binv[i * self.m..(i + 1) * self.m]
    }

    /// w = Binv * a_j using column sparsity.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut w = vec![0.0; self.m];
        for &(r, v) in &self.cols[j] {
            for i in 0..self.m {
                w[i] += self.binv[i * self.m + r] * v;
            }
        }
        w
    }

    fn dual_vector(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for i in 0..m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = self.binv_row(i);
                for r in 0..m {
                    y[r] += cb * row[r];
                }
            }
        }
        y
    }

    /// Rebuild the explicit inverse from the basis columns and recompute the
    /// basic values from the nonbasic ones.
    fn refactor(&mut self) -> Result<(), Error> {
        let m = self.m;
        // Gauss-Jordan with partial pivoting on [B | I].
        let mut mat = vec![0.0; m * m];
        for (i, &bj) in self.basis.iter().enumerate() {
            for &(r, v) in &self.cols[bj] {
                mat[r * m + i] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            let mut best = mat[col * m + col].abs();
            for r in col + 1..m {
                let a = mat[r * m + col].abs();
                if a > best {
                    best = a;
                    piv = r;
                }
            }
            if best < 1e-12 {
                return Err(Error::Lp("singular basis during refactorization".into()));
            }
            if piv != col {
                for k in 0..m {
                    mat.swap(piv * m + k, col * m + k);
                    inv.swap(piv * m + k, col * m + k);
                }
            }
            let p = mat[col * m + col];
            for k in 0..m {
                mat[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for r in 0..m {
                if r != col {
                    let f = mat[r * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            mat[r * m + k] -= f * mat[col * m + k];
                            inv[r * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.recompute_basic_values();
        Ok(())
    }

    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut eff = self.rhs.clone();
        for j in 0..self.cols.len() {
            match self.status[j] {
                VarStatus::Basic(_) => {}
                _ => {
                    let v = self.values[j];
                    if v != 0.0 {
                        for &(r, a) in &self.cols[j] {
                            eff[r] -= a * v;
                        }
                    }
                }
            }
        }
        for i in 0..m {
            let row = self.binv_row(i);
            let mut x = 0.0;
            for r in 0..m {
                x += row[r] * eff[r];
            }
            self.values[self.basis[i]] = x;
        }
    }

    fn step(&mut self, phase_cost: &[f64]) -> Result<StepOutcome, Error> {
        let m = self.m;
        // Near-degenerate crawls can keep Dantzig pricing busy forever while
        // each step clears the degeneracy test by a hair. Once the pivot
        // count passes a generous multiple of the problem size, stay on
        // Bland's rule for the remainder of the solve.
        if self.pivots >= 5 * (m + self.cols.len()).max(100) {
            self.bland = true;
        }
        // Pricing.
        let mut y = vec![0.0; m];
        for i in 0..m {
            let cb = phase_cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for r in 0..m {
                    y[r] += cb * row[r];
                }
            }
        }
        let tol = self.opts.feas_tol;
        let mut enter: Option<(usize, f64, f64)> = None; // (col, |d|, dir)
        for j in 0..self.cols.len() {
            let (can_inc, can_dec) = match self.status[j] {
                VarStatus::Basic(_) => continue,
                VarStatus::AtLower => (true, false),
                VarStatus::AtUpper => (false, true),
                VarStatus::FreeZero => (true, true),
            };
            let mut d = phase_cost[j];
            for &(r, v) in &self.cols[j] {
                d -= y[r] * v;
            }
            let dir = if can_inc && d < -tol {
                1.0
            } else if can_dec && d > tol {
                -1.0
            } else {
                continue;
            };
            if self.bland {
                enter = Some((j, d.abs(), dir));
                break;
            }
            match enter {
                Some((_, best, _)) if d.abs() <= best => {}
                _ => enter = Some((j, d.abs(), dir)),
            }
        }
        let Some((j, _, dir)) = enter else {
            return Ok(StepOutcome::Optimal);
        };

        let w = self.ftran(j);
        let range_j = self.upper[j] - self.lower[j];
        let mut t = if range_j.is_finite() { range_j } else { INF };
        let mut leave: Option<(usize, f64, bool)> = None; // (row, |pivot|, to_upper)
        for i in 0..m {
            let delta = -dir * w[i]; // change in basic i per unit step
            let bi = self.basis[i];
            if delta < -self.opts.pivot_tol {
                if self.lower[bi].is_finite() {
                    let room = self.values[bi] - self.lower[bi];
                    let ratio = (room.max(0.0)) / (-delta);
                    if ratio < t - 1e-12
                        || (ratio < t + 1e-12 && self.better_leave(&leave, w[i], bi))
                    {
                        t = ratio;
                        leave = Some((i, w[i].abs(), false));
                    }
                }
            } else if delta > self.opts.pivot_tol && self.upper[bi].is_finite() {
                let room = self.upper[bi] - self.values[bi];
                let ratio = (room.max(0.0)) / delta;
                if ratio < t - 1e-12
                    || (ratio < t + 1e-12 && self.better_leave(&leave, w[i], bi))
                {
                    t = ratio;
                    leave = Some((i, w[i].abs(), true));
                }
            }
        }
        if !t.is_finite() {
            return Ok(StepOutcome::Unbounded);
        }
        let t = t.max(0.0);

        // Apply the step to basic values.
        if t > 0.0 {
            for i in 0..m {
                let bi = self.basis[i];
                self.values[bi] -= w[i] * dir * t;
            }
        }
        match leave {
            None => {
                // Bound flip of the entering variable.
                self.values[j] += dir * t;
                self.status[j] = if dir > 0.0 {
                    VarStatus::AtUpper
                } else {
                    VarStatus::AtLower
                };
            }
            Some((row, _, to_upper)) => {
                let old_basic = self.basis[row];
                self.values[j] += dir * t;
                self.status[j] = VarStatus::Basic(row);
                self.status[old_basic] = if to_upper {
                    self.values[old_basic] = self.upper[old_basic];
                    VarStatus::AtUpper
                } else {
                    self.values[old_basic] = self.lower[old_basic];
                    VarStatus::AtLower
                };
                self.basis[row] = j;
                self.update_binv(row, &w)?;
            }
        }

        self.pivots += 1;
        if t <= self.opts.feas_tol {
            self.degenerate_streak += 1;
            if self.degenerate_streak >= self.opts.bland_threshold {
                self.bland = true;
            }
        } else {
            self.degenerate_streak = 0;
            self.bland = false;
        }
        if self.pivots % self.opts.refactor_every == 0 {
            self.refactor()?;
        }
        Ok(StepOutcome::Progress)
    }

    fn better_leave(&self, cur: &Option<(usize, f64, bool)>, wi: f64, bi: usize) -> bool {
        match cur {
            None => true,
            Some((ci, cm, _)) => {
                if self.bland {
                    bi < self.basis[*ci]
                } else {
                    let a = wi.abs();
                    a > *cm + 1e-12 || (a > *cm - 1e-12 && bi < self.basis[*ci])
                }
            }
        }
    }

    /// Product-form update of the explicit inverse after pivoting in row `r`.
    fn update_binv(&mut self, r: usize, w: &[f64]) -> Result<(), Error> {
        let m = self.m;
        let piv = w[r];
        if piv.abs() < 1e-12 {
            return Err(Error::Lp("near-zero pivot element".into()));
        }
        for k in 0..m {
            self.binv[r * m + k] /= piv;
        }
        for i in 0..m {
            if i != r {
                let f = w[i];
                if f != 0.0 {
                    for k in 0..m {
                        self.binv[i * m + k] -= f * self.binv[r * m + k];
                    }
                }
            }
        }
        Ok(())
    }
}

/// Solve a bounded-variable LP. Infeasible and unbounded problems are
/// reported through the status, not as errors.
pub fn solve_lp(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution, Error> {
    solve_lp_with_basis(lp, opts, None)
}

fn is_numerical_breakdown(err: &Error) -> bool {
    matches!(err, Error::Lp(msg)
        if msg.contains("singular basis") || msg.contains("near-zero pivot"))
}

/// Solve with an optional starting basis (one variable index per row, over
/// structural-then-slack numbering). A basis that cannot be factorized or
/// that is bound-infeasible falls back to the crash start.
///
/// Accumulated round-off in the product-form inverse can occasionally let a
/// pivot through that leaves the basis matrix singular; when a clean
/// refactorization detects that, the solve restarts cold with stricter pivot
/// acceptance and more frequent refactorization before giving up.
pub fn solve_lp_with_basis(
    lp: &LinearProgram,
    opts: &SimplexOptions,
    warm_basis: Option<&[usize]>,
) -> Result<LpSolution, Error> {
    match solve_lp_attempt(lp, opts, warm_basis) {
        Err(e) if is_numerical_breakdown(&e) => {
            let mut safer = *opts;
            safer.pivot_tol = opts.pivot_tol.max(1e-7);
            safer.refactor_every = opts.refactor_every.min(40);
            match solve_lp_attempt(lp, &safer, None) {
                Err(e2) if is_numerical_breakdown(&e2) => {
                    // Last resort: Bland's rule from the first pivot.
                    safer.bland_threshold = 0;
                    solve_lp_attempt(lp, &safer, None)
                }
                other => other,
            }
        }
        other => other,
    }
}

/// Equilibrate rows and columns with power-of-two factors (exact in binary
/// floating point) so pivot magnitudes are comparable across the matrix.
/// Returns the scaled problem plus row factors R and column factors C with
/// `A_scaled = R A C`; primal unscales as `x = C x'` and duals as `y = R y'`.
fn scale_problem(lp: &LinearProgram) -> (LinearProgram, Vec<f64>, Vec<f64>) {
    let n = lp.num_cols();
    let m = lp.num_rows();
    let pow2 = |v: f64| -> f64 {
        if v <= 0.0 || !v.is_finite() {
            1.0
        } else {
            let e = (-v.log2()).round().clamp(-40.0, 40.0);
            e.exp2()
        }
    };
    let mut rscale = vec![1.0f64; m];
    let mut cscale = vec![1.0f64; n];
    for _ in 0..2 {
        for (i, row) in lp.rows.iter().enumerate() {
            let mut mx = 0.0f64;
            for &(j, v) in &row.coeffs {
                mx = mx.max((v * cscale[j]).abs());
            }
            rscale[i] = pow2(mx);
        }
        let mut colmax = vec![0.0f64; n];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, v) in &row.coeffs {
                colmax[j] = colmax[j].max((v * rscale[i]).abs());
            }
        }
        for j in 0..n {
            cscale[j] = pow2(colmax[j]);
        }
    }
    let mut scaled = LinearProgram::new();
    for j in 0..n {
        let inv = 1.0 / cscale[j];
        scaled.add_col(
            lp.objective[j] * cscale[j],
            lp.col_lower[j] * inv,
            lp.col_upper[j] * inv,
            lp.col_names[j].clone(),
        );
    }
    for (i, row) in lp.rows.iter().enumerate() {
        let coeffs = row
            .coeffs
            .iter()
            .map(|&(j, v)| (j, v * rscale[i] * cscale[j]))
            .collect();
        scaled.add_row(coeffs, row.sense, row.rhs * rscale[i], row.name.clone());
    }
    (scaled, rscale, cscale)
}

fn solve_lp_attempt(
    lp: &LinearProgram,
    opts: &SimplexOptions,
    warm_basis: Option<&[usize]>,
) -> Result<LpSolution, Error> {
    let (scaled, rscale, cscale) = scale_problem(lp);
    let mut sol = solve_lp_core(&scaled, opts, warm_basis)?;
    for (x, c) in sol.primal.iter_mut().zip(&cscale) {
        *x *= c;
    }
    for (y, r) in sol.duals.iter_mut().zip(&rscale) {
        *y *= r;
    }
    if sol.status == LpStatus::Optimal || sol.status == LpStatus::IterationLimit {
        sol.objective = sol
            .primal
            .iter()
            .zip(lp.objective.iter())
            .map(|(x, c)| x * c)
            .sum();
    }
    Ok(sol)
}

fn solve_lp_core(
    lp: &LinearProgram,
    opts: &SimplexOptions,
    warm_basis: Option<&[usize]>,
) -> Result<LpSolution, Error> {
    lp.validate()?;
    let n = lp.num_cols();
    let m = lp.num_rows();
    if m == 0 {
        return Ok(trivial_solution(lp));
    }
    let max_pivots = opts.max_pivots.unwrap_or(50 * (m + n).max(20));

    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in lp.rows.iter().enumerate() {
        for &(j, v) in &row.coeffs {
            cols[j].push((i, v));
        }
    }
    let mut lower = lp.col_lower.clone();
    let mut upper = lp.col_upper.clone();
    let mut cost = vec![0.0; n];
    cost.copy_from_slice(&lp.objective);
    // Slack per row.
    for (i, row) in lp.rows.iter().enumerate() {
        cols.push(vec![(i, 1.0)]);
        cost.push(0.0);
        match row.sense {
            RowSense::Le => {
                lower.push(0.0);
                upper.push(INF);
            }
            RowSense::Ge => {
                lower.push(-INF);
                upper.push(0.0);
            }
            RowSense::Eq => {
                lower.push(0.0);
                upper.push(0.0);
            }
        }
    }
    let rhs: Vec<f64> = lp.rows.iter().map(|r| r.rhs).collect();

    let mut w = Worker {
        m,
        cols,
        lower,
        upper,
        cost,
        rhs,
        status: Vec::new(),
        values: Vec::new(),
        basis: Vec::new(),
        binv: Vec::new(),
        opts: *opts,
        pivots: 0,
        degenerate_streak: 0,
        bland: false,
    };

    let warm_ok = warm_basis
        .map(|b| try_warm_start(&mut w, b))
        .unwrap_or(false);
    if !warm_ok {
        crash_start(&mut w);
    }

    // Phase 1: drive artificial variables (and any bound violations absorbed
    // by them) to zero.
    let total_infeas = |w: &Worker| -> f64 {
        w.cols
            .iter()
            .enumerate()
            .skip(n + m)
            .map(|(j, _)| w.values[j].abs())
            .sum()
    };
    if w.cols.len() > n + m {
        let mut p1_cost = vec![0.0; w.cols.len()];
        for item in p1_cost.iter_mut().skip(n + m) {
            *item = 1.0;
        }
        loop {
            if w.pivots >= max_pivots {
                return Ok(limit_solution(lp, &w, n));
            }
            match w.step(&p1_cost)? {
                StepOutcome::Optimal => break,
                StepOutcome::Unbounded => {
                    return Err(Error::Lp("phase-1 objective unbounded".into()))
                }
                StepOutcome::Progress => {}
            }
        }
        let scale = 1.0 + w.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if total_infeas(&w) > opts.feas_tol * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                primal: vec![0.0; n],
                duals: vec![0.0; m],
                objective: 0.0,
                iterations: w.pivots,
                basis: w.basis.clone(),
            });
        }
        // Freeze artificials at zero for phase 2.
        for j in n + m..w.cols.len() {
            w.lower[j] = 0.0;
            w.upper[j] = 0.0;
            if !matches!(w.status[j], VarStatus::Basic(_)) {
                w.values[j] = 0.0;
                w.status[j] = VarStatus::AtLower;
            }
        }
        w.degenerate_streak = 0;
        w.bland = false;
    }

    // Phase 2.
    let p2_cost = {
        let mut c = vec![0.0; w.cols.len()];
        c[..n].copy_from_slice(&lp.objective);
        c
    };
    loop {
        if w.pivots >= max_pivots {
            return Ok(limit_solution(lp, &w, n));
        }
        match w.step(&p2_cost)? {
            StepOutcome::Optimal => break,
            StepOutcome::Unbounded => {
                return Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    primal: vec![0.0; n],
                    duals: vec![0.0; m],
                    objective: -INF,
                    iterations: w.pivots,
                    basis: w.basis.clone(),
                });
            }
            StepOutcome::Progress => {}
        }
    }

    // Clean extraction from a fresh factorization.
    w.refactor()?;
    w.cost = p2_cost;
    let y = w.dual_vector();
    let primal: Vec<f64> = (0..n).map(|j| w.values[j]).collect();
    let objective: f64 = primal
        .iter()
        .zip(lp.objective.iter())
        .map(|(x, c)| x * c)
        .sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        duals: y,
        objective,
        iterations: w.pivots,
        basis: w.basis.clone(),
    })
}

fn trivial_solution(lp: &LinearProgram) -> LpSolution {
    // No rows: each column sits at whichever bound its cost prefers.
    let n = lp.num_cols();
    let mut primal = vec![0.0; n];
    let mut unbounded = false;
    for j in 0..n {
        let c = lp.objective[j];
        primal[j] = if c > 0.0 {
            if lp.col_lower[j].is_finite() {
                lp.col_lower[j]
            } else {
                unbounded = true;
                0.0
            }
        } else if c < 0.0 {
            if lp.col_upper[j].is_finite() {
                lp.col_upper[j]
            } else {
                unbounded = true;
                0.0
            }
        } else if lp.col_lower[j].is_finite() {
            lp.col_lower[j]
        } else if lp.col_upper[j].is_finite() {
            lp.col_upper[j]
        } else {
            0.0
        };
    }
    let status = if unbounded {
        LpStatus::Unbounded
    } else {
        LpStatus::Optimal
    };
    let objective = primal
        .iter()
        .zip(lp.objective.iter())
        .map(|(x, c)| x * c)
        .sum();
    LpSolution {
        status,
        primal,
        duals: Vec::new(),
        objective,
        iterations: 0,
        basis: Vec::new(),
    }
}

fn limit_solution(lp: &LinearProgram, w: &Worker, n: usize) -> LpSolution {
    let primal: Vec<f64> = (0..n).map(|j| w.values[j]).collect();
    let objective = primal
        .iter()
        .zip(lp.objective.iter())
        .map(|(x, c)| x * c)
        .sum();
    LpSolution {
        status: LpStatus::IterationLimit,
        primal,
        duals: vec![0.0; w.m],
        objective,
        iterations: w.pivots,
        basis: w.basis.clone(),
    }
}

/// Slack-basis crash with artificials for rows whose slack bounds cannot
/// absorb the residual.
fn crash_start(w: &mut Worker) {
    let m = w.m;
    let n_struct = w.cols.len() - m;
    w.status = Vec::with_capacity(w.cols.len());
    w.values = vec![0.0; w.cols.len()];
    for j in 0..n_struct {
        let (st, v) = nonbasic_rest(w.lower[j], w.upper[j]);
        w.status.push(st);
        w.values[j] = v;
    }
    // Residual with all structurals at rest.
    let mut resid = w.rhs.clone();
    for j in 0..n_struct {
        let v = w.values[j];
        if v != 0.0 {
            for &(r, a) in &w.cols[j] {
                resid[r] -= a * v;
            }
        }
    }
    w.basis = vec![0; m];
    let mut artificial_rows = Vec::new();
    for i in 0..m {
        let sj = n_struct + i;
        let r = resid[i];
        if r >= w.lower[sj] - 1e-12 && r <= w.upper[sj] + 1e-12 {
            w.status.push(VarStatus::Basic(i));
            w.values[sj] = r;
            w.basis[i] = sj;
        } else {
            let (st, v) = nonbasic_rest(w.lower[sj], w.upper[sj]);
            w.status.push(st);
            w.values[sj] = v;
            artificial_rows.push((i, r - v));
        }
    }
    for (i, short) in artificial_rows {
        let a = w.cols.len();
        let sign = if short >= 0.0 { 1.0 } else { -1.0 };
        w.cols.push(vec![(i, sign)]);
        w.lower.push(0.0);
        w.upper.push(INF);
        w.cost.push(0.0);
        w.status.push(VarStatus::Basic(i));
        w.values.push(short.abs());
        w.basis[i] = a;
    }
    // Slack basis inverse is the identity (artificial columns are +/- unit;
    // a -1 column flips one inverse row).
    w.binv = vec![0.0; m * m];
    for i in 0..m {
        let col = &w.cols[w.basis[i]];
        let sign = col[0].1;
        w.binv[i * m + i] = 1.0 / sign;
    }
    w.recompute_basic_values();
}

fn try_warm_start(w: &mut Worker, basis: &[usize]) -> bool {
    let m = w.m;
    let n_all = w.cols.len();
    if basis.len() != m {
        return false;
    }
    let mut seen = vec![false; n_all];
    for &j in basis {
        if j >= n_all || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    w.basis = basis.to_vec();
    w.status = Vec::with_capacity(n_all);
    w.values = vec![0.0; n_all];
    for j in 0..n_all {
        if seen[j] {
            w.status.push(VarStatus::Basic(0)); // row fixed below
        } else {
            let (st, v) = nonbasic_rest(w.lower[j], w.upper[j]);
            w.status.push(st);
            w.values[j] = v;
        }
    }
    for (i, &j) in basis.iter().enumerate() {
        w.status[j] = VarStatus::Basic(i);
    }
    if w.refactor().is_err() {
        return false;
    }
    // Basic values outside bounds would need a fresh phase 1; punt to the
    // crash start which attaches artificials.
    for i in 0..m {
        let bi = w.basis[i];
        let v = w.values[bi];
        if v < w.lower[bi] - w.opts.feas_tol || v > w.upper[bi] + w.opts.feas_tol {
            return false;
        }
    }
    true
}

fn nonbasic_rest(lower: f64, upper: f64) -> (VarStatus, f64) {
    if lower.is_finite() {
        (VarStatus::AtLower, lower)
    } else if upper.is_finite() {
        (VarStatus::AtUpper, upper)
    } else {
        (VarStatus::FreeZero, 0.0)
    }
}

/// Group row duals by the tag family before the first `/` in the row name.
pub fn extract_row_duals(
    sol: &LpSolution,
    row_names: &[String],
) -> Result<BTreeMap<String, Vec<(String, f64)>>, Error> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp("duals requested from a non-optimal solution".into()));
    }
    if row_names.len() != sol.duals.len() {
        return Err(Error::Lp("row tag count does not match dual count".into()));
    }
    let mut map: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for (name, &y) in row_names.iter().zip(sol.duals.iter()) {
        let family = name.split('/').next().unwrap_or("").to_string();
        map.entry(family).or_default().push((name.clone(), y));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(lp: &LinearProgram) -> LpSolution {
        solve_lp(lp, &SimplexOptions::default()).unwrap()
    }

    #[test]
    fn single_variable_ge() {
        let mut lp = LinearProgram::new();
        let x = lp.add_col(1.0, 0.0, INF, "x");
        lp.add_row(vec![(x, 1.0)], RowSense::Ge, 3.0, "r0");
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[x] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!((sol.duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_vertex() {
        let mut lp = LinearProgram::new();
        let x = lp.add_col(-1.0, 0.0, 1.0, "x");
        let y = lp.add_col(-1.0, 0.0, 1.0, "y");
        lp.add_row(vec![(x, 1.0), (y, 1.0)], RowSense::Le, 1.0, "cap");
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-9);
        assert!((sol.duals[0] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_free_variable() {
        let mut lp = LinearProgram::new();
        let x = lp.add_col(2.0, -INF, INF, "x");
        let y = lp.add_col(1.0, 0.0, INF, "y");
        lp.add_row(vec![(x, 1.0), (y, 1.0)], RowSense::Eq, 4.0, "bal");
        lp.add_row(vec![(x, 1.0)], RowSense::Ge, -10.0, "lo");
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        // Push x to its effective lower limit -10, y picks up the rest.
        assert!((sol.primal[x] + 10.0).abs() < 1e-7);
        assert!((sol.primal[y] - 14.0).abs() < 1e-7);
    }

    #[test]
    fn infeasible_rows() {
        let mut lp = LinearProgram::new();
        let x = lp.add_col(1.0, 0.0, INF, "x");
        lp.add_row(vec![(x, 1.0)], RowSense::Le, 1.0, "a");
        lp.add_row(vec![(x, 1.0)], RowSense::Ge, 2.0, "b");
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new();
        let x = lp.add_col(-1.0, 0.0, INF, "x");
        let y = lp.add_col(0.0, 0.0, INF, "y");
        lp.add_row(vec![(x, 1.0), (y, -1.0)], RowSense::Le, 1.0, "r");
        assert_eq!(solve(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn upper_bounded_transport() {
        // Two routes with capacities, cheapest fills first.
        let mut lp = LinearProgram::new();
        let a = lp.add_col(1.0, 0.0, 5.0, "a");
        let b = lp.add_col(3.0, 0.0, INF, "b");
        lp.add_row(vec![(a, 1.0), (b, 1.0)], RowSense::Eq, 8.0, "demand");
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[a] - 5.0).abs() < 1e-9);
        assert!((sol.primal[b] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 14.0).abs() < 1e-9);
        // Equality dual equals the marginal cost of one more unit.
        assert!((sol.duals[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_basis() {
        let mut lp = LinearProgram::new();
        for j in 0..4 {
            lp.add_col(if j % 2 == 0 { 1.0 } else { 2.0 }, 0.0, 10.0, format!("x{j}"));
        }
        lp.add_row(vec![(0, 1.0), (1, 1.0), (2, 1.0)], RowSense::Ge, 4.0, "r0");
        lp.add_row(vec![(1, 1.0), (2, 2.0), (3, 1.0)], RowSense::Le, 9.0, "r1");
        let s1 = solve(&lp);
        let s2 = solve(&lp);
        assert_eq!(s1.basis, s2.basis);
        assert_eq!(s1.primal, s2.primal);
    }

    #[test]
    fn duals_group_by_family() {
        let mut lp = LinearProgram::new();
        let x = lp.add_col(1.0, 0.0, INF, "x");
        lp.add_row(vec![(x, 1.0)], RowSense::Ge, 1.0, "supply/j=0");
        lp.add_row(vec![(x, 1.0)], RowSense::Le, 9.0, "proc/i=0");
        let sol = solve(&lp);
        let names: Vec<String> = lp.rows.iter().map(|r| r.name.clone()).collect();
        let groups = extract_row_duals(&sol, &names).unwrap();
        assert!(groups.contains_key("supply"));
        assert!(groups.contains_key("proc"));
        assert_eq!(groups["supply"].len(), 1);
    }
}
