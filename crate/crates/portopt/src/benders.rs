//! Decomposition solver for the two-stage investment model. The plain
//! variant alternates a master MILP with per-scenario recourse LPs and
//! per-scenario optimality cuts. The accelerated variant additionally
//! maintains a lower-bound inequality on the master objective and, when
//! requested, Pareto-improving cuts priced at a core point that tracks the
//! incumbent plans.

use std::time::Instant;

use rayon::prelude::*;

use crate::builders::{
    build_subproblem, make_optimality_cut, solve_subproblem_at_plan, Cut, MasterProblem,
    ScenarioShape,
};
use crate::error::Error;
use crate::lp::{solve_lp, LpSolution, LpStatus, SimplexOptions};
use crate::milp::MilpOptions;
use crate::model::{investment_cost, Instance, InvestmentPlan, RecourseSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceleration {
    /// Plain multi-cut decomposition.
    None,
    /// Plus the master-objective lower-bound inequality.
    Knapsack,
    /// Plus core-point (Pareto) cuts on top of the bound inequality.
    KnapsackPareto,
}

#[derive(Debug, Clone)]
pub struct BendersOptions {
    /// Relative optimality gap at which to stop.
    pub epsilon: f64,
    pub max_iterations: usize,
    pub time_limit_secs: f64,
    pub acceleration: Acceleration,
    /// Core-point smoothing weight on the previous core.
    pub core_lambda: f64,
    /// Enforce minimum storage-per-equipment ratios in the master.
    pub link_storage_to_equipment: bool,
    pub lp: SimplexOptions,
    pub milp: MilpOptions,
}

impl Default for BendersOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            max_iterations: 500,
            time_limit_secs: 12_600.0,
            acceleration: Acceleration::None,
            core_lambda: 0.5,
            link_storage_to_equipment: false,
            lp: SimplexOptions::default(),
            milp: MilpOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    GapReached,
    IterationLimit,
    TimeLimit,
}

/// One line of the convergence trace.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub gap: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct BendersResult {
    pub plan: InvestmentPlan,
    /// Validated total cost of `plan` (investment + expected recourse),
    /// recomputed from fresh subproblem solves at termination.
    pub objective: f64,
    pub lower_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub reason: TerminationReason,
    pub trace: Vec<IterationRecord>,
    /// Recourse cost per scenario at the returned plan.
    pub scenario_costs: Vec<f64>,
    /// Nonzero second-stage flows per scenario at the returned plan.
    pub recourse: Vec<RecourseSolution>,
}

/// Relative gap, falling back to the absolute difference at a zero upper
/// bound.
pub fn relative_gap(lower: f64, upper: f64) -> f64 {
    if upper == 0.0 {
        (upper - lower).abs()
    } else {
        (upper - lower) / upper.abs()
    }
}

fn validate_options(opts: &BendersOptions) -> Result<(), Error> {
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) {
        return Err(Error::Config("epsilon must be in (0,1)".into()));
    }
    if opts.max_iterations == 0 {
        return Err(Error::Config("max_iterations must be positive".into()));
    }
    if !(0.0..1.0).contains(&opts.core_lambda) {
        return Err(Error::Config("core_lambda must be in [0,1)".into()));
    }
    Ok(())
}

/// Solve every scenario at a plan in parallel; results come back in
/// scenario order so runs are deterministic.
fn solve_all_scenarios(
    inst: &Instance,
    shapes: &[ScenarioShape],
    plan: &InvestmentPlan,
    lp_opts: &SimplexOptions,
) -> Result<Vec<LpSolution>, Error> {
    shapes
        .par_iter()
        .map(|shape| solve_subproblem_at_plan(inst, shape, plan, lp_opts))
        .collect()
}

fn plan_levels(plan: &InvestmentPlan) -> (Vec<f64>, Vec<f64>) {
    let e = plan.new_equipment.data.iter().map(|&v| v as f64).collect();
    let f = plan.new_storage.data.iter().map(|&v| v as f64).collect();
    (e, f)
}

/// Run the decomposition. Complete recourse is assumed (the model always
/// admits shortage), so only optimality cuts are generated.
pub fn solve(inst: &Instance, opts: &BendersOptions) -> Result<BendersResult, Error> {
    validate_options(opts)?;
    let violations = crate::model::validate_instance(inst);
    if !violations.is_empty() {
        return Err(Error::InvalidInstance(
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    let start = Instant::now();
    let shapes: Vec<ScenarioShape> = (0..inst.num_scenarios())
        .map(|s| build_subproblem(inst, s))
        .collect::<Result<_, _>>()?;
    let mut master = MasterProblem::new(inst, opts.link_storage_to_equipment)?;

    let pareto = opts.acceleration == Acceleration::KnapsackPareto;
    let knapsack = opts.acceleration != Acceleration::None;

    // Core point lives in new-unit space, one entry per master Z/Y column.
    let ne_total = inst.num_ports() * inst.num_equipment();
    let nf_total = inst.num_ports() * inst.num_storage();
    let mut core_e = vec![0.0; ne_total];
    let mut core_f = vec![0.0; nf_total];
    let mut core_initialized = false;

    let mut best_plan: Option<InvestmentPlan> = None;
    let mut best_upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut reason = TerminationReason::IterationLimit;
    let mut iterations = 0;

    // The master only needs to be resolved finely enough that its own gap
    // is negligible against the Benders tolerance; proving master
    // optimality to 1e-6 every iteration is wasted work at loose epsilon.
    let mut master_opts = opts.milp;
    master_opts.rel_gap = master_opts.rel_gap.max(opts.epsilon / 4.0);
    // A node-limited master still yields a feasible incumbent plan and a
    // valid best bound, both of which keep the outer loop sound.
    master_opts.max_nodes = master_opts.max_nodes.or(Some(100_000));

    let mut prev_plan: Option<InvestmentPlan> = None;
    for iter in 1..=opts.max_iterations {
        iterations = iter;
        let msol = master.solve_seeded(&master_opts, prev_plan.as_ref())?;
        prev_plan = Some(msol.plan.clone());
        if std::env::var_os("PORTOPT_DEBUG").is_some() {
            eprintln!(
                "DBG iter {iter} master nodes {} obj {:.1} elapsed {:.1}s",
                msol.nodes,
                msol.objective,
                start.elapsed().as_secs_f64()
            );
        }
        lower = lower.max(msol.best_bound);

        let subsols = solve_all_scenarios(inst, &shapes, &msol.plan, &opts.lp)?;
        let invest = investment_cost(&msol.plan, &inst.costs)?;
        let expected: f64 = subsols
            .iter()
            .zip(inst.scenarios.iter())
            .map(|(sol, sc)| sc.probability * sol.objective)
            .sum();
        let upper_candidate = invest + expected;
        if upper_candidate < best_upper {
            best_upper = upper_candidate;
            best_plan = Some(msol.plan.clone());
        }

        let gap = relative_gap(lower, best_upper);
        trace.push(IterationRecord {
            iteration: iter,
            lower_bound: lower,
            upper_bound: best_upper,
            gap,
            seconds: start.elapsed().as_secs_f64(),
        });
        if gap <= opts.epsilon {
            reason = TerminationReason::GapReached;
            break;
        }
        if start.elapsed().as_secs_f64() > opts.time_limit_secs {
            reason = TerminationReason::TimeLimit;
            break;
        }

        // Standard cuts priced at the integer plan, only where violated.
        let (lv_e, lv_f) = plan_levels(&msol.plan);
        for (s, sol) in subsols.iter().enumerate() {
            if msol.thetas[s] < sol.objective - 1e-7 {
                let cut = make_optimality_cut(inst, &shapes[s], sol, &lv_e, &lv_f)?;
                master.add_cut(&cut);
            }
        }
        if knapsack {
            master.set_knapsack_bound(lower);
        }
        if pareto {
            // Move the core toward the incumbent plan, then price cuts at
            // the core's capacity levels. A degenerate all-zero core is
            // pushed to the middle of the investment box first.
            for (c, &v) in core_e.iter_mut().zip(lv_e.iter()) {
                *c = opts.core_lambda * *c + (1.0 - opts.core_lambda) * v;
            }
            for (c, &v) in core_f.iter_mut().zip(lv_f.iter()) {
                *c = opts.core_lambda * *c + (1.0 - opts.core_lambda) * v;
            }
            if !core_initialized
                && core_e.iter().chain(core_f.iter()).all(|&v| v == 0.0)
            {
                for (k, c) in core_e.iter_mut().enumerate() {
                    let ub = master.mip.lp.col_upper[master.z_cols[k]];
                    *c = 0.5 * if ub.is_finite() { ub } else { 1.0 };
                }
                for (k, c) in core_f.iter_mut().enumerate() {
                    let ub = master.mip.lp.col_upper[master.y_cols[k]];
                    *c = 0.5 * if ub.is_finite() { ub } else { 1.0 };
                }
            }
            core_initialized = true;

            let core_levels =
                crate::builders::CapacityLevels::from_fractional(inst, &core_e, &core_f);
            let mw_sols: Vec<(usize, LpSolution)> = shapes
                .par_iter()
                .map(|shape| {
                    let mut sh = shape.clone();
                    sh.set_levels(inst, &core_levels);
                    solve_lp(&sh.lp, &opts.lp).map(|sol| (shape.scenario, sol))
                })
                .collect::<Result<_, _>>()?;
            for (s, sol) in &mw_sols {
                if sol.status == LpStatus::Optimal {
                    let cut: Cut =
                        make_optimality_cut(inst, &shapes[*s], sol, &core_e, &core_f)?;
                    master.add_cut(&cut);
                }
            }
        }
    }

    let plan = best_plan.ok_or_else(|| Error::Solver("no incumbent plan found".into()))?;

    // Re-validate the returned bound with fresh subproblem solves.
    let final_sols = solve_all_scenarios(inst, &shapes, &plan, &opts.lp)?;
    let scenario_costs: Vec<f64> = final_sols.iter().map(|s| s.objective).collect();
    let recourse: Vec<RecourseSolution> = shapes
        .iter()
        .zip(final_sols.iter())
        .map(|(shape, sol)| crate::builders::extract_recourse(shape, sol))
        .collect();
    let objective = investment_cost(&plan, &inst.costs)?
        + scenario_costs
            .iter()
            .zip(inst.scenarios.iter())
            .map(|(h, sc)| sc.probability * h)
            .sum::<f64>();
    let gap = relative_gap(lower, objective);

    Ok(BendersResult {
        plan,
        objective,
        lower_bound: lower,
        gap,
        iterations,
        reason,
        trace,
        scenario_costs,
        recourse,
    })
}

/// Render the trace in `iteration,lower,upper,gap,seconds` CSV form.
pub fn trace_to_csv(trace: &[IterationRecord]) -> String {
    let mut out = String::from("iteration,lower_bound,upper_bound,gap,seconds\n");
    for r in trace {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.8},{:.3}\n",
            r.iteration, r.lower_bound, r.upper_bound, r.gap, r.seconds
        ));
    }
    out
}
