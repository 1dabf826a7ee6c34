//! Branch-and-bound over LP relaxations.
//!
//! Best-bound node selection, most-fractional branching with ties broken on
//! the lowest column index, child nodes warm-started from the parent basis.
//! Rows can be appended between solves so a master problem keeps its cuts.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Error;
use crate::lp::{solve_lp_with_basis, LinearProgram, LpStatus, SimplexOptions};

#[derive(Debug, Clone)]
pub struct MixedIntegerProgram {
    pub lp: LinearProgram,
    /// Columns constrained to integer values; must have finite bounds.
    pub integer_cols: Vec<usize>,
}

impl MixedIntegerProgram {
    pub fn validate(&self) -> Result<(), Error> {
        self.lp.validate().map_err(|e| Error::Milp(e.to_string()))?;
        for &j in &self.integer_cols {
            if j >= self.lp.num_cols() {
                return Err(Error::Milp(format!("integer column {j} out of range")));
            }
            if !self.lp.col_lower[j].is_finite() || !self.lp.col_upper[j].is_finite() {
                return Err(Error::Milp(format!(
                    "integer column {} must have finite bounds",
                    self.lp.col_names[j]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    GapLimit,
    NodeLimit,
}

#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub best_bound: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct MilpOptions {
    pub rel_gap: f64,
    pub int_tol: f64,
    pub max_nodes: Option<usize>,
    pub lp: SimplexOptions,
}

impl Default for MilpOptions {
    fn default() -> Self {
        Self {
            rel_gap: 1e-6,
            int_tol: 1e-6,
            max_nodes: None,
            lp: SimplexOptions::default(),
        }
    }
}

struct Node {
    bound: f64,
    id: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    basis: Option<Vec<usize>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap: best (lowest) bound first, then oldest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then(other.id.cmp(&self.id))
    }
}

pub fn solve_milp(mip: &MixedIntegerProgram, opts: &MilpOptions) -> Result<MilpSolution, Error> {
    solve_milp_seeded(mip, opts, None)
}

/// Branch and bound with an optional starting incumbent. The seed must be a
/// feasible integral point together with its true objective value; it only
/// prunes the tree, the returned solution can still improve on it.
pub fn solve_milp_seeded(
    mip: &MixedIntegerProgram,
    opts: &MilpOptions,
    seed: Option<(f64, Vec<f64>)>,
) -> Result<MilpSolution, Error> {
    mip.validate()?;
    // Until the first incumbent exists nothing can be pruned, so best-bound
    // selection just grows the frontier; dive depth-first (LIFO) to find an
    // integral point quickly, then switch to best-bound for the proof.
    let mut heap = BinaryHeap::new();
    let mut dive: Vec<Node> = Vec::new();
    let mut next_id = 0usize;
    let mut nodes = 0usize;
    let mut incumbent: Option<(f64, Vec<f64>)> =
        seed.filter(|(_, values)| values.len() == mip.lp.num_cols());

    dive.push(Node {
        bound: f64::NEG_INFINITY,
        id: 0,
        lower: mip.lp.col_lower.clone(),
        upper: mip.lp.col_upper.clone(),
        basis: None,
    });
    next_id += 1;

    let gap_closed = |inc: f64, bound: f64, rel: f64| -> bool {
        inc - bound <= rel * (1.0 + inc.abs())
    };
    let open_min = |heap: &BinaryHeap<Node>, dive: &[Node]| -> f64 {
        heap.iter()
            .chain(dive.iter())
            .map(|n| n.bound)
            .fold(f64::INFINITY, f64::min)
    };

    loop {
        if incumbent.is_some() && !dive.is_empty() {
            for n in dive.drain(..) {
                heap.push(n);
            }
        }
        let node = match if incumbent.is_none() {
            dive.pop().or_else(|| heap.pop())
        } else {
            heap.pop()
        } {
            Some(n) => n,
            None => break,
        };
        if let Some((inc, _)) = &incumbent {
            if node.bound >= *inc - opts.rel_gap * (1.0 + inc.abs()) {
                // Best-bound order: everything remaining is dominated.
                break;
            }
        }
        if let Some(maxn) = opts.max_nodes {
            if nodes >= maxn {
                let bound = open_min(&heap, &dive).min(node.bound);
                let (obj, values) = incumbent.unwrap_or((f64::INFINITY, Vec::new()));
                return Ok(MilpSolution {
                    status: MilpStatus::NodeLimit,
                    values,
                    objective: obj,
                    best_bound: if bound.is_finite() { bound } else { f64::NEG_INFINITY },
                    nodes,
                });
            }
        }
        nodes += 1;

        let mut lp = mip.lp.clone();
        lp.col_lower = node.lower.clone();
        lp.col_upper = node.upper.clone();
        let sol = solve_lp_with_basis(&lp, &opts.lp, node.basis.as_deref())?;
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Err(Error::Milp("relaxation unbounded below".into()));
            }
            LpStatus::IterationLimit => {
                return Err(Error::Milp("lp pivot limit exceeded inside branch-and-bound".into()));
            }
            LpStatus::Optimal => {}
        }
        if let Some((inc, _)) = &incumbent {
            if sol.objective >= *inc - opts.rel_gap * (1.0 + inc.abs()) {
                continue;
            }
        }
        // Branch on the fractional variable with the largest objective
        // stake (cost-weighted fractionality), so expensive decisions are
        // fixed before cheap ones; ties break on the lowest column index.
        let mut branch: Option<(usize, f64, f64)> = None; // (col, value, score)
        for &j in &mip.integer_cols {
            // The LP can sit a hair outside the node bounds; clamp so the
            // child bounds stay consistent.
            let v = sol.primal[j].clamp(node.lower[j], node.upper[j]);
            let frac = (v - v.round()).abs();
            if frac > opts.int_tol {
                let dist = (v - v.floor()).min(v.ceil() - v);
                let score = dist * (1.0 + mip.lp.objective[j].abs());
                let better = match branch {
                    None => true,
                    Some((_, _, best)) => score > best + 1e-12,
                };
                if better {
                    branch = Some((j, v, score));
                }
            }
        }
        match branch {
            None => {
                // Integral solution.
                let mut values = sol.primal.clone();
                for &j in &mip.integer_cols {
                    values[j] = values[j].round().clamp(node.lower[j], node.upper[j]);
                }
                if incumbent
                    .as_ref()
                    .map(|(inc, _)| sol.objective < *inc)
                    .unwrap_or(true)
                {
                    incumbent = Some((sol.objective, values));
                }
            }
            Some((j, v, _)) => {
                let mut up = node.upper.clone();
                up[j] = v.floor();
                let down_child = Node {
                    bound: sol.objective,
                    id: next_id,
                    lower: node.lower.clone(),
                    upper: up,
                    basis: Some(sol.basis.clone()),
                };
                next_id += 1;
                let mut lo = node.lower.clone();
                lo[j] = v.ceil();
                let up_child = Node {
                    bound: sol.objective,
                    id: next_id,
                    lower: lo,
                    upper: node.upper.clone(),
                    basis: Some(sol.basis.clone()),
                };
                next_id += 1;
                if incumbent.is_none() {
                    // Dive toward the nearest integer: that child goes on top.
                    if v - v.floor() < 0.5 {
                        dive.push(up_child);
                        dive.push(down_child);
                    } else {
                        dive.push(down_child);
                        dive.push(up_child);
                    }
                } else {
                    heap.push(down_child);
                    heap.push(up_child);
                }
            }
        }
        if dive.is_empty() {
            if let (Some((inc, _)), Some(top)) = (&incumbent, heap.peek()) {
                if gap_closed(*inc, top.bound, opts.rel_gap) {
                    break;
                }
            }
        }
    }

    match incumbent {
        Some((obj, values)) => {
            let open = open_min(&heap, &dive);
            let open_bound = if open.is_finite() { open } else { obj };
            Ok(MilpSolution {
                status: MilpStatus::Optimal,
                values,
                objective: obj,
                best_bound: open_bound.min(obj),
                nodes,
            })
        }
        None => Ok(MilpSolution {
            status: MilpStatus::Infeasible,
            values: Vec::new(),
            objective: f64::INFINITY,
            best_bound: f64::INFINITY,
            nodes,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{RowSense, INF};

    #[test]
    fn one_variable_knapsack() {
        // A 300,000-per-unit purchase under a 500,000 cap buys exactly one.
        let mut lp = LinearProgram::new();
        let z = lp.add_col(-1.0, 0.0, INF, "z");
        lp.add_row(vec![(z, 300_000.0)], RowSense::Le, 500_000.0, "budget");
        lp.col_upper[z] = (500_000.0f64 / 300_000.0).floor();
        let mip = MixedIntegerProgram {
            lp,
            integer_cols: vec![z],
        };
        let sol = solve_milp(&mip, &MilpOptions::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Optimal);
        assert!((sol.values[z] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn integral_relaxation_needs_one_node() {
        let mut lp = LinearProgram::new();
        let x = lp.add_col(1.0, 0.0, 5.0, "x");
        lp.add_row(vec![(x, 1.0)], RowSense::Ge, 3.0, "r");
        let mip = MixedIntegerProgram {
            lp,
            integer_cols: vec![x],
        };
        let sol = solve_milp(&mip, &MilpOptions::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Optimal);
        assert_eq!(sol.nodes, 1);
        assert!((sol.values[x] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_mip() {
        let mut lp = LinearProgram::new();
        let x = lp.add_col(1.0, 0.0, 2.0, "x");
        lp.add_row(vec![(x, 1.0)], RowSense::Ge, 5.0, "r");
        let mip = MixedIntegerProgram {
            lp,
            integer_cols: vec![x],
        };
        let sol = solve_milp(&mip, &MilpOptions::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Infeasible);
    }

    #[test]
    fn matches_lattice_enumeration() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for case in 0..30 {
            let n = rng.gen_range(2..=4);
            let mut lp = LinearProgram::new();
            for j in 0..n {
                lp.add_col(rng.gen_range(-5.0..5.0), 0.0, rng.gen_range(1..4) as f64, format!("x{j}"));
            }
            for i in 0..rng.gen_range(1..=3) {
                let coeffs: Vec<(usize, f64)> =
                    (0..n).map(|j| (j, rng.gen_range(-2.0..3.0))).collect();
                let rhs = rng.gen_range(0.0..8.0);
                lp.add_row(coeffs, RowSense::Le, rhs, format!("r{i}"));
            }
            let mip = MixedIntegerProgram {
                lp: lp.clone(),
                integer_cols: (0..n).collect(),
            };
            let sol = solve_milp(&mip, &MilpOptions::default()).unwrap();

            // Exhaustive lattice oracle.
            let mut best: Option<f64> = None;
            let ubs: Vec<i64> = (0..n).map(|j| lp.col_upper[j] as i64).collect();
            let mut point = vec![0i64; n];
            'outer: loop {
                let feasible = lp.rows.iter().all(|row| {
                    let lhs: f64 = row.coeffs.iter().map(|&(j, v)| v * point[j] as f64).sum();
                    lhs <= row.rhs + 1e-9
                });
                if feasible {
                    let obj: f64 = (0..n).map(|j| lp.objective[j] * point[j] as f64).sum();
                    if best.map(|b| obj < b).unwrap_or(true) {
                        best = Some(obj);
                    }
                }
                for j in 0..n {
                    point[j] += 1;
                    if point[j] <= ubs[j] {
                        continue 'outer;
                    }
                    point[j] = 0;
                }
                break;
            }
            match (sol.status, best) {
                (MilpStatus::Optimal, Some(b)) => assert!(
                    (sol.objective - b).abs() <= 1e-6 * (1.0 + b.abs()),
                    "case {case}: milp {} vs lattice {b}",
                    sol.objective
                ),
                (MilpStatus::Infeasible, None) => {}
                (st, b) => panic!("case {case}: {st:?} vs oracle {b:?}"),
            }
        }
    }
}
