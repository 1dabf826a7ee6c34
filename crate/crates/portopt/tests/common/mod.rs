//! Helpers shared by the integration tests: small random LPs, a brute-force
//! vertex-enumeration oracle, and optimality-certificate residuals. The
//! oracle is independent of the simplex path: it enumerates all candidate
//! vertices as intersections of n active constraints and takes the best
//! feasible one.
#![allow(dead_code)]

use portopt::lp::{LinearProgram, LpSolution, RowSense};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Dense Gaussian elimination; returns None when the system is singular.
fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&r1, &r2| {
            m[r1][col].abs().partial_cmp(&m[r2][col].abs()).unwrap()
        })?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for k in col..n {
                        m[r][k] -= f * m[col][k];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Enumerate all vertices of the LP polytope and return the best objective,
/// or None when no feasible vertex exists.
pub fn vertex_enumeration_optimum(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_cols();
    // Candidate active constraints: each row as equality, each finite bound.
    let mut cands: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &lp.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coeffs {
            a[j] += v;
        }
        cands.push((a, row.rhs));
    }
    for j in 0..n {
        if lp.col_lower[j].is_finite() {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            cands.push((a, lp.col_lower[j]));
        }
        if lp.col_upper[j].is_finite() {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            cands.push((a, lp.col_upper[j]));
        }
    }
    let mut best: Option<f64> = None;
    let k = cands.len();
    let mut picks = vec![0usize; n];
    // Iterate over all n-subsets of candidates.
    fn rec(
        picks: &mut Vec<usize>,
        depth: usize,
        start: usize,
        k: usize,
        n: usize,
        cands: &[(Vec<f64>, f64)],
        lp: &LinearProgram,
        best: &mut Option<f64>,
    ) {
        if depth == n {
            let a: Vec<Vec<f64>> = picks.iter().map(|&i| cands[i].0.clone()).collect();
            let b: Vec<f64> = picks.iter().map(|&i| cands[i].1).collect();
            if let Some(x) = solve_dense(&a, &b) {
                if feasible_within(lp, &x, 1e-7) {
                    let obj: f64 = x.iter().zip(lp.objective.iter()).map(|(x, c)| x * c).sum();
                    if best.map(|b| obj < b).unwrap_or(true) {
                        *best = Some(obj);
                    }
                }
            }
            return;
        }
        for i in start..k {
            picks[depth] = i;
            rec(picks, depth + 1, i + 1, k, n, cands, lp, best);
        }
    }
    rec(&mut picks, 0, 0, k, n, &cands, lp, &mut best);
    best
}

/// Whether `x` satisfies all bounds and rows of `lp` within `tol`.
pub fn feasible_within(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
    for j in 0..lp.num_cols() {
        if x[j] < lp.col_lower[j] - tol || x[j] > lp.col_upper[j] + tol {
            return false;
        }
    }
    for row in &lp.rows {
        let lhs: f64 = row.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
        let ok = match row.sense {
            RowSense::Le => lhs <= row.rhs + tol,
            RowSense::Ge => lhs >= row.rhs - tol,
            RowSense::Eq => (lhs - row.rhs).abs() <= tol,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// A random dense LP with at most 6 columns and 4 rows; a healthy mix of
/// feasible and infeasible instances.
pub fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=4);
    let mut lp = LinearProgram::new();
    for j in 0..n {
        let lo = rng.gen_range(-5.0..0.0);
        let hi = rng.gen_range(0.5..5.0);
        let c = rng.gen_range(-4.0..4.0);
        lp.add_col(c, lo, hi, format!("x{j}"));
    }
    for i in 0..m {
        let mut coeffs = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.8) {
                let v: f64 = rng.gen_range(-3.0..3.0);
                if v.abs() > 0.05 {
                    coeffs.push((j, v));
                }
            }
        }
        if coeffs.is_empty() {
            coeffs.push((rng.gen_range(0..n), 1.0));
        }
        let sense = match rng.gen_range(0..4) {
            0 => RowSense::Ge,
            1 => RowSense::Eq,
            _ => RowSense::Le,
        };
        let rhs = rng.gen_range(-6.0..6.0);
        lp.add_row(coeffs, sense, rhs, format!("r{i}"));
    }
    lp
}

/// Worst normalized residual of the optimality certificate for a solved LP:
/// dual sign violations, the strong-duality gap, and complementary
/// slackness, each scaled to be comparable against a single tolerance.
pub fn certificate_residual(lp: &LinearProgram, sol: &LpSolution) -> f64 {
    let scale = 1.0 + lp.rows.iter().fold(0.0f64, |a, r| a.max(r.rhs.abs()));
    let mut worst = 0.0f64;
    // Dual sign convention.
    for (row, &y) in lp.rows.iter().zip(sol.duals.iter()) {
        match row.sense {
            RowSense::Le => worst = worst.max(y),
            RowSense::Ge => worst = worst.max(-y),
            RowSense::Eq => {}
        }
    }
    // Strong duality: c'x = y'b + sum of reduced costs times primal values.
    let mut lagrangian = 0.0;
    for (row, &y) in lp.rows.iter().zip(sol.duals.iter()) {
        lagrangian += y * row.rhs;
    }
    for j in 0..lp.num_cols() {
        let mut red = lp.objective[j];
        for (row, &y) in lp.rows.iter().zip(sol.duals.iter()) {
            for &(cj, v) in &row.coeffs {
                if cj == j {
                    red -= y * v;
                }
            }
        }
        lagrangian += red * sol.primal[j];
    }
    worst = worst.max((sol.objective - lagrangian).abs() / (1.0 + sol.objective.abs()));
    // Complementary slackness per row.
    for (row, &y) in lp.rows.iter().zip(sol.duals.iter()) {
        let lhs: f64 = row.coeffs.iter().map(|&(j, v)| v * sol.primal[j]).sum();
        let slack = row.rhs - lhs;
        worst = worst.max((y * slack).abs() / (scale * (1.0 + y.abs())));
    }
    worst
}
