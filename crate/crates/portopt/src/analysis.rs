//! Decision-analysis tooling on top of the solver: value of the stochastic
//! solution, expected value of perfect information, budget sweeps, and
//! mode/commodity flow reports with ton-mile accounting.

use crate::benders::{solve, BendersOptions};
use crate::builders::{build_subproblem, solve_subproblem_at_plan};
use crate::error::Error;
use crate::model::{investment_cost, FlowVar, Instance, InvestmentPlan, RecourseSolution};

/// Transport modes tallied in flow reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Truck,
    Rail,
    Barge,
}

pub const MODES: [Mode; 3] = [Mode::Truck, Mode::Rail, Mode::Barge];

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Truck => "truck",
            Mode::Rail => "rail",
            Mode::Barge => "barge",
        }
    }
}

/// Probability-weighted tonnage and ton-miles by mode and commodity.
#[derive(Debug, Clone)]
pub struct FlowReport {
    pub commodities: Vec<String>,
    /// `tons[mode][commodity]`, in `MODES` order.
    pub tons: Vec<Vec<f64>>,
    pub ton_miles: Vec<Vec<f64>>,
    /// Unmet demand per commodity.
    pub shortage_tons: Vec<f64>,
    /// Port inventory carried per commodity (period-tons).
    pub inventory_tons: Vec<f64>,
    /// Demand delivered per commodity (excludes shortage).
    pub delivered_tons: Vec<f64>,
}

impl FlowReport {
    pub fn total_tons(&self, mode: Mode) -> f64 {
        self.tons[mode as usize].iter().sum()
    }

    pub fn total_ton_miles(&self, mode: Mode) -> f64 {
        self.ton_miles[mode as usize].iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("mode,commodity,tons,ton_miles\n");
        for (mi, mode) in MODES.iter().enumerate() {
            for (ci, c) in self.commodities.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{:.3},{:.3}\n",
                    mode.name(),
                    c,
                    self.tons[mi][ci],
                    self.ton_miles[mi][ci]
                ));
            }
        }
        for (ci, c) in self.commodities.iter().enumerate() {
            out.push_str(&format!("shortage,{},{:.3},\n", c, self.shortage_tons[ci]));
            out.push_str(&format!("inventory,{},{:.3},\n", c, self.inventory_tons[ci]));
        }
        out
    }
}

/// Aggregate recourse flows across scenarios, weighting each scenario by
/// its probability. `recourse` must be indexed by scenario.
pub fn expected_flow_report(
    inst: &Instance,
    recourse: &[RecourseSolution],
) -> Result<FlowReport, Error> {
    let nc = inst.num_commodities();
    let mut tons = vec![vec![0.0; nc]; MODES.len()];
    let mut ton_miles = vec![vec![0.0; nc]; MODES.len()];
    let mut shortage_tons = vec![0.0; nc];
    let mut inventory_tons = vec![0.0; nc];
    let mut delivered_tons = vec![0.0; nc];
    for rec in recourse {
        if rec.scenario >= inst.num_scenarios() {
            return Err(Error::Model(format!(
                "recourse references scenario {} outside the instance",
                rec.scenario
            )));
        }
        let w = inst.scenarios[rec.scenario].probability;
        for &(var, v) in &rec.flows {
            let wv = w * v;
            match var {
                FlowVar::TruckToPort { j, i, c, .. } => {
                    tons[Mode::Truck as usize][c] += wv;
                    ton_miles[Mode::Truck as usize][c] += wv * inst.distances.county_port.at(j, i);
                }
                FlowVar::RailToPort { j, i, c, .. } => {
                    tons[Mode::Rail as usize][c] += wv;
                    ton_miles[Mode::Rail as usize][c] += wv * inst.distances.county_port.at(j, i);
                }
                FlowVar::Barge { i, k, c, .. } => {
                    tons[Mode::Barge as usize][c] += wv;
                    ton_miles[Mode::Barge as usize][c] += wv * inst.distances.port_port.at(i, k);
                }
                FlowVar::TruckFromPort { i, j, c, .. } => {
                    tons[Mode::Truck as usize][c] += wv;
                    ton_miles[Mode::Truck as usize][c] += wv * inst.distances.county_port.at(j, i);
                    delivered_tons[c] += wv;
                }
                FlowVar::RailFromPort { i, j, c, .. } => {
                    tons[Mode::Rail as usize][c] += wv;
                    ton_miles[Mode::Rail as usize][c] += wv * inst.distances.county_port.at(j, i);
                    delivered_tons[c] += wv;
                }
                FlowVar::TruckDirect { j, m, c, .. } => {
                    tons[Mode::Truck as usize][c] += wv;
                    ton_miles[Mode::Truck as usize][c] +=
                        wv * inst.distances.county_county.at(j, m);
                    delivered_tons[c] += wv;
                }
                FlowVar::RailDirect { j, m, c, .. } => {
                    tons[Mode::Rail as usize][c] += wv;
                    ton_miles[Mode::Rail as usize][c] +=
                        wv * inst.distances.county_county.at(j, m);
                    delivered_tons[c] += wv;
                }
                FlowVar::OriginInventory { c, .. } | FlowVar::DestInventory { c, .. } => {
                    inventory_tons[c] += wv;
                }
                FlowVar::Shortage { c, .. } => {
                    shortage_tons[c] += wv;
                }
            }
        }
    }
    Ok(FlowReport {
        commodities: inst.sets.commodities.clone(),
        tons,
        ton_miles,
        shortage_tons,
        inventory_tons,
        delivered_tons,
    })
}

/// Stochastic-programming quality metrics for one instance.
#[derive(Debug, Clone)]
pub struct StochasticValueReport {
    /// Optimal value of the stochastic program.
    pub sp: f64,
    /// Cost of the mean-value plan evaluated against all scenarios.
    pub eev: f64,
    /// Value of the stochastic solution: `eev - sp` (>= 0).
    pub vss: f64,
    /// Wait-and-see optimum per scenario.
    pub wait_and_see: Vec<f64>,
    /// Probability-weighted wait-and-see value.
    pub expected_ws: f64,
    /// Expected value of perfect information: `sp - expected_ws` (>= 0).
    pub evpi: f64,
    /// The stochastic plan itself.
    pub plan: InvestmentPlan,
}

/// Value of the stochastic solution from its two ingredients: the cost of
/// the mean-value plan under uncertainty minus the stochastic optimum.
pub fn value_of_stochastic_solution(sp: f64, eev: f64) -> f64 {
    eev - sp
}

/// Probability-weighted wait-and-see value.
pub fn expected_wait_and_see(wait_and_see: &[f64], probabilities: &[f64]) -> f64 {
    wait_and_see
        .iter()
        .zip(probabilities.iter())
        .map(|(ws, p)| p * ws)
        .sum()
}

/// Expected value of perfect information: what the decision maker would pay
/// for a perfect demand forecast.
pub fn expected_value_of_perfect_information(sp: f64, expected_ws: f64) -> f64 {
    sp - expected_ws
}

/// Evaluate a fixed first-stage plan against every scenario of `inst`.
pub fn evaluate_plan(
    inst: &Instance,
    plan: &InvestmentPlan,
    opts: &BendersOptions,
) -> Result<f64, Error> {
    let mut total = investment_cost(plan, &inst.costs)?;
    for s in 0..inst.num_scenarios() {
        let shape = build_subproblem(inst, s)?;
        let sol = solve_subproblem_at_plan(inst, &shape, plan, &opts.lp)?;
        total += inst.scenarios[s].probability * sol.objective;
    }
    Ok(total)
}

/// Compute SP, EEV/VSS and WS/EVPI. Every sub-solve goes through the same
/// decomposition path so single-scenario instances give exact zeros.
pub fn stochastic_values(
    inst: &Instance,
    opts: &BendersOptions,
) -> Result<StochasticValueReport, Error> {
    let sp_res = solve(inst, opts)?;
    let sp = sp_res.objective;

    // Mean-value plan, then its cost against the full scenario set.
    let mean_inst = inst.mean_scenario_instance();
    let mean_res = solve(&mean_inst, opts)?;
    let eev = evaluate_plan(inst, &mean_res.plan, opts)?;

    let mut wait_and_see = Vec::with_capacity(inst.num_scenarios());
    for s in 0..inst.num_scenarios() {
        let single = inst.single_scenario_instance(s);
        wait_and_see.push(solve(&single, opts)?.objective);
    }
    let probs: Vec<f64> = inst.scenarios.iter().map(|sc| sc.probability).collect();
    let expected_ws = expected_wait_and_see(&wait_and_see, &probs);

    Ok(StochasticValueReport {
        sp,
        eev,
        vss: value_of_stochastic_solution(sp, eev),
        wait_and_see,
        expected_ws,
        evpi: expected_value_of_perfect_information(sp, expected_ws),
        plan: sp_res.plan,
    })
}

/// One point of a budget sweep.
#[derive(Debug, Clone)]
pub struct BudgetPoint {
    pub budget: f64,
    pub objective: f64,
    pub investment: f64,
    pub gap: f64,
    pub plan: InvestmentPlan,
    pub report: FlowReport,
}

/// Re-solve the instance at each budget level and report cost, plan, and
/// expected flows. Budgets are processed in the order given.
pub fn budget_sweep(
    inst: &Instance,
    budgets: &[f64],
    opts: &BendersOptions,
) -> Result<Vec<BudgetPoint>, Error> {
    let mut out = Vec::with_capacity(budgets.len());
    for &b in budgets {
        if b < 0.0 {
            return Err(Error::Config(format!("budget must be >= 0, got {b}")));
        }
        let mut scoped = inst.clone();
        scoped.costs.budget = b;
        let res = solve(&scoped, opts)?;
        let report = expected_flow_report(&scoped, &res.recourse)?;
        out.push(BudgetPoint {
            budget: b,
            objective: res.objective,
            investment: investment_cost(&res.plan, &scoped.costs)?,
            gap: res.gap,
            plan: res.plan,
            report,
        });
    }
    Ok(out)
}

/// Render a sweep as CSV.
pub fn sweep_to_csv(points: &[BudgetPoint]) -> String {
    let mut out = String::from(
        "budget,objective,investment,gap,truck_ton_miles,rail_ton_miles,barge_ton_miles\n",
    );
    for p in points {
        out.push_str(&format!(
            "{:.2},{:.6},{:.2},{:.8},{:.3},{:.3},{:.3}\n",
            p.budget,
            p.objective,
            p.investment,
            p.gap,
            p.report.total_ton_miles(Mode::Truck),
            p.report.total_ton_miles(Mode::Rail),
            p.report.total_ton_miles(Mode::Barge),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_instance, GeneratorConfig};

    fn opts() -> BendersOptions {
        BendersOptions {
            epsilon: 1e-6,
            ..BendersOptions::default()
        }
    }

    fn inst() -> Instance {
        let mut inst = generate_instance(&GeneratorConfig {
            num_ports: 2,
            num_counties: 4,
            num_commodities: 1,
            num_periods: 2,
            num_scenarios: 3,
            num_equipment_kinds: 1,
            num_storage_kinds: 1,
            budget: 300_000.0,
            demand_spread: 0.6,
            seed: 21,
            ..GeneratorConfig::default()
        })
        .unwrap();
        inst.costs.equipment_cost = vec![25_000.0];
        inst.costs.storage_cost = vec![40_000.0];
        inst
    }

    #[test]
    fn vss_and_evpi_are_nonnegative() {
        let report = stochastic_values(&inst(), &opts()).unwrap();
        assert!(report.vss >= -1e-6, "vss {}", report.vss);
        assert!(report.evpi >= -1e-6, "evpi {}", report.evpi);
        // EEV >= SP >= expected WS by construction.
        assert!(report.eev >= report.sp - 1e-6);
        assert!(report.sp >= report.expected_ws - 1e-6);
    }

    #[test]
    fn single_scenario_collapses_both_values_to_zero() {
        let single = inst().single_scenario_instance(0);
        let report = stochastic_values(&single, &opts()).unwrap();
        assert!(report.vss.abs() < 1e-6, "vss {}", report.vss);
        assert!(report.evpi.abs() < 1e-6, "evpi {}", report.evpi);
    }

    #[test]
    fn flow_report_conserves_demand() {
        let instance = inst();
        let res = solve(&instance, &opts()).unwrap();
        let report = expected_flow_report(&instance, &res.recourse).unwrap();
        let expected_demand: f64 = instance
            .scenarios
            .iter()
            .map(|sc| sc.probability * sc.demand.iter().sum::<f64>())
            .sum();
        let served: f64 =
            report.delivered_tons.iter().sum::<f64>() + report.shortage_tons.iter().sum::<f64>();
        assert!(
            (served - expected_demand).abs() < 1e-5,
            "served {served} vs demand {expected_demand}"
        );
    }

    #[test]
    fn budget_sweep_is_monotone_in_cost() {
        let instance = inst();
        let budgets = [0.0, 100_000.0, 300_000.0];
        let points = budget_sweep(&instance, &budgets, &opts()).unwrap();
        assert_eq!(points.len(), 3);
        for pair in points.windows(2) {
            assert!(
                pair[1].objective <= pair[0].objective + 1e-6,
                "objective must not rise with budget: {} -> {}",
                pair[0].objective,
                pair[1].objective
            );
        }
        // Zero budget forbids any purchase.
        assert!(points[0].plan.is_zero());
        assert_eq!(points[0].investment, 0.0);
    }

    #[test]
    fn csv_outputs_have_headers() {
        let instance = inst();
        let res = solve(&instance, &opts()).unwrap();
        let report = expected_flow_report(&instance, &res.recourse).unwrap();
        assert!(report.to_csv().starts_with("mode,commodity,tons,ton_miles"));
        let points = budget_sweep(&instance, &[0.0], &opts()).unwrap();
        assert!(sweep_to_csv(&points).starts_with("budget,"));
    }
}
