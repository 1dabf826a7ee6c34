//! Builders that turn an `Instance` into concrete LP/MILP stages: the
//! first-stage master, per-scenario recourse subproblems (primal and
//! explicit dual form), and the monolithic extensive form. Also the cut
//! types the decomposition loop appends to the master.
//!
//! Row names use semantic family tags (`supply/`, `demand/`, `obal/`,
//! `dbal/`, `proc/`, `stor/`) so duals can be grouped by constraint family.

use crate::error::Error;
use crate::lp::{LinearProgram, LpSolution, LpStatus, Row, RowSense, SimplexOptions, INF};
use crate::milp::{MixedIntegerProgram, MilpOptions, MilpSolution, MilpStatus};
use crate::model::{FlowVar, Instance, InvestmentPlan, RecourseSolution, ScenarioData};

/// Hard cap on extensive-form columns before we refuse to build it.
pub const EXTENSIVE_FORM_COLUMN_LIMIT: usize = 200_000;

/// Continuous capacity levels (possibly fractional) used when pricing a
/// subproblem: per-(port, kind) unit counts including existing stock.
#[derive(Debug, Clone)]
pub struct CapacityLevels {
    /// Equipment units per (port, kind), port-major.
    pub equipment: Vec<f64>,
    /// Storage units per (port, kind), port-major.
    pub storage: Vec<f64>,
}

impl CapacityLevels {
    /// Existing stock plus an integer plan.
    pub fn from_plan(inst: &Instance, plan: &InvestmentPlan) -> Self {
        let ni = inst.num_ports();
        let ne = inst.num_equipment();
        let nf = inst.num_storage();
        let mut equipment = vec![0.0; ni * ne];
        let mut storage = vec![0.0; ni * nf];
        for i in 0..ni {
            for e in 0..ne {
                equipment[i * ne + e] =
                    (inst.caps.existing_equipment.at(i, e) + plan.new_equipment.at(i, e)) as f64;
            }
            for f in 0..nf {
                storage[i * nf + f] =
                    (inst.caps.existing_storage.at(i, f) + plan.new_storage.at(i, f)) as f64;
            }
        }
        Self { equipment, storage }
    }

    /// Fractional first-stage values plus existing stock (used for
    /// core-point pricing, where counts need not be integral).
    pub fn from_fractional(inst: &Instance, new_equipment: &[f64], new_storage: &[f64]) -> Self {
        let ni = inst.num_ports();
        let ne = inst.num_equipment();
        let nf = inst.num_storage();
        let mut equipment = vec![0.0; ni * ne];
        let mut storage = vec![0.0; ni * nf];
        for i in 0..ni {
            for e in 0..ne {
                equipment[i * ne + e] =
                    inst.caps.existing_equipment.at(i, e) as f64 + new_equipment[i * ne + e];
            }
            for f in 0..nf {
                storage[i * nf + f] =
                    inst.caps.existing_storage.at(i, f) as f64 + new_storage[i * nf + f];
            }
        }
        Self { equipment, storage }
    }
}

/// One scenario's recourse LP with enough metadata to re-price it for a
/// new first-stage plan by touching only capacity right-hand sides.
#[derive(Debug, Clone)]
pub struct ScenarioShape {
    pub scenario: usize,
    pub lp: LinearProgram,
    /// Semantic meaning of every column, parallel to `lp` columns.
    pub columns: Vec<FlowVar>,
    /// (row, port, equipment kind, period) for each processing row.
    pub proc_rows: Vec<(usize, usize, usize, usize)>,
    /// (row, port, storage kind, period) for each storage row.
    pub stor_rows: Vec<(usize, usize, usize, usize)>,
}

impl ScenarioShape {
    /// Point the capacity rows at an integer plan.
    pub fn set_plan(&mut self, inst: &Instance, plan: &InvestmentPlan) {
        self.set_levels(inst, &CapacityLevels::from_plan(inst, plan));
    }

    /// Point the capacity rows at arbitrary (possibly fractional) levels.
    pub fn set_levels(&mut self, inst: &Instance, levels: &CapacityLevels) {
        let ne = inst.num_equipment();
        let nf = inst.num_storage();
        for &(row, i, e, _p) in &self.proc_rows {
            self.lp.rows[row].rhs = inst.caps.equip_capacity[e] * levels.equipment[i * ne + e];
        }
        for &(row, i, f, _p) in &self.stor_rows {
            self.lp.rows[row].rhs = inst.caps.storage_capacity[f] * levels.storage[i * nf + f];
        }
    }
}

fn flow_cost(inst: &Instance, var: &FlowVar) -> f64 {
    match *var {
        FlowVar::TruckToPort { j, i, .. } => inst.costs.truck_port_rate.at(j, i),
        FlowVar::RailToPort { j, i, .. } => inst.costs.rail_port_rate.at(j, i),
        FlowVar::Barge { i, k, .. } => inst.costs.barge_rate.at(i, k),
        FlowVar::TruckFromPort { i, j, .. } => inst.costs.truck_port_rate.at(j, i),
        FlowVar::RailFromPort { i, j, .. } => inst.costs.rail_port_rate.at(j, i),
        FlowVar::TruckDirect { j, m, .. } => inst.costs.county_truck_rate.at(j, m),
        FlowVar::RailDirect { j, m, .. } => inst.costs.county_rail_rate.at(j, m),
        FlowVar::OriginInventory { c, .. } | FlowVar::DestInventory { c, .. } => {
            inst.costs.holding_cost[c]
        }
        FlowVar::Shortage { .. } => inst.costs.shortage_penalty,
    }
}

fn flow_name(inst: &Instance, var: &FlowVar) -> String {
    let p_ = |i: usize| &inst.sets.ports[i];
    let c_ = |j: usize| &inst.sets.counties[j];
    let e_ = |e: usize| &inst.sets.equipment_kinds[e];
    let f_ = |f: usize| &inst.sets.storage_kinds[f];
    let cm = |c: usize| &inst.sets.commodities[c];
    match *var {
        FlowVar::TruckToPort { j, i, c, p, e } => {
            format!("xt/{}/{}/{}/{}/{}", c_(j), p_(i), cm(c), p + 1, e_(e))
        }
        FlowVar::RailToPort { j, i, c, p, e } => {
            format!("xr/{}/{}/{}/{}/{}", c_(j), p_(i), cm(c), p + 1, e_(e))
        }
        FlowVar::Barge { i, k, c, p, e } => {
            format!("w/{}/{}/{}/{}/{}", p_(i), p_(k), cm(c), p + 1, e_(e))
        }
        FlowVar::TruckFromPort { i, j, c, p, e } => {
            format!("yt/{}/{}/{}/{}/{}", p_(i), c_(j), cm(c), p + 1, e_(e))
        }
        FlowVar::RailFromPort { i, j, c, p, e } => {
            format!("yr/{}/{}/{}/{}/{}", p_(i), c_(j), cm(c), p + 1, e_(e))
        }
        FlowVar::TruckDirect { j, m, c, p } => {
            format!("ot/{}/{}/{}/{}", c_(j), c_(m), cm(c), p + 1)
        }
        FlowVar::RailDirect { j, m, c, p } => {
            format!("or/{}/{}/{}/{}", c_(j), c_(m), cm(c), p + 1)
        }
        FlowVar::OriginInventory { i, c, p, f } => {
            format!("u/{}/{}/{}/{}", p_(i), cm(c), p + 1, f_(f))
        }
        FlowVar::DestInventory { i, c, p, f } => {
            format!("v/{}/{}/{}/{}", p_(i), cm(c), p + 1, f_(f))
        }
        FlowVar::Shortage { j, c, p } => format!("q/{}/{}/{}", c_(j), cm(c), p + 1),
    }
}

/// Enumerate every admissible second-stage column for one scenario, in a
/// fixed deterministic order.
fn enumerate_columns(inst: &Instance) -> Vec<FlowVar> {
    let nc = inst.num_commodities();
    let np = inst.num_periods();
    let mut cols = Vec::new();
    let compat_e =
        |e: usize, c: usize| inst.caps.equip_compat.at(e, c) == 1.0;
    let compat_f =
        |f: usize, c: usize| inst.caps.storage_compat.at(f, c) == 1.0;

    for &j in &inst.origin_county_idx {
        for &i in &inst.origin_port_idx {
            for c in 0..nc {
                for p in 0..np {
                    for e in 0..inst.num_equipment() {
                        if !compat_e(e, c) {
                            continue;
                        }
                        if inst.costs.truck_port_rate.at(j, i).is_finite() {
                            cols.push(FlowVar::TruckToPort { j, i, c, p, e });
                        }
                        if inst.rail_arc_allowed_port(j, i)
                            && inst.costs.rail_port_rate.at(j, i).is_finite()
                        {
                            cols.push(FlowVar::RailToPort { j, i, c, p, e });
                        }
                    }
                }
            }
        }
    }
    for &i in &inst.origin_port_idx {
        for &k in &inst.destination_port_idx {
            if !inst.barge_arc_allowed(i, k) || !inst.costs.barge_rate.at(i, k).is_finite() {
                continue;
            }
            for c in 0..nc {
                for p in 0..np {
                    for e in 0..inst.num_equipment() {
                        if compat_e(e, c) {
                            cols.push(FlowVar::Barge { i, k, c, p, e });
                        }
                    }
                }
            }
        }
    }
    for &i in &inst.destination_port_idx {
        for &j in &inst.destination_county_idx {
            for c in 0..nc {
                for p in 0..np {
                    for e in 0..inst.num_equipment() {
                        if !compat_e(e, c) {
                            continue;
                        }
                        if inst.costs.truck_port_rate.at(j, i).is_finite() {
                            cols.push(FlowVar::TruckFromPort { i, j, c, p, e });
                        }
                        if inst.rail_arc_allowed_port(j, i)
                            && inst.costs.rail_port_rate.at(j, i).is_finite()
                        {
                            cols.push(FlowVar::RailFromPort { i, j, c, p, e });
                        }
                    }
                }
            }
        }
    }
    for &j in &inst.origin_county_idx {
        for &m in &inst.destination_county_idx {
            for c in 0..nc {
                for p in 0..np {
                    if inst.costs.county_truck_rate.at(j, m).is_finite() {
                        cols.push(FlowVar::TruckDirect { j, m, c, p });
                    }
                    if inst.rail_arc_allowed_county(j, m)
                        && inst.costs.county_rail_rate.at(j, m).is_finite()
                    {
                        cols.push(FlowVar::RailDirect { j, m, c, p });
                    }
                }
            }
        }
    }
    for &i in &inst.origin_port_idx {
        for c in 0..nc {
            for p in 0..np {
                for f in 0..inst.num_storage() {
                    if compat_f(f, c) {
                        cols.push(FlowVar::OriginInventory { i, c, p, f });
                    }
                }
            }
        }
    }
    for &i in &inst.destination_port_idx {
        for c in 0..nc {
            for p in 0..np {
                for f in 0..inst.num_storage() {
                    if compat_f(f, c) {
                        cols.push(FlowVar::DestInventory { i, c, p, f });
                    }
                }
            }
        }
    }
    for &m in &inst.destination_county_idx {
        for c in 0..nc {
            for p in 0..np {
                cols.push(FlowVar::Shortage { j: m, c, p });
            }
        }
    }
    cols
}

/// Build the recourse LP for scenario `s`. Capacity rows start at the
/// zero-investment level; call `set_plan` / `set_levels` to re-price.
pub fn build_subproblem(inst: &Instance, s: usize) -> Result<ScenarioShape, Error> {
    build_subproblem_scaled(inst, s, 1.0)
}

/// Same as `build_subproblem` but with every flow cost multiplied by
/// `cost_scale` (the extensive form uses the scenario probability here).
fn build_subproblem_scaled(inst: &Instance, s: usize, cost_scale: f64) -> Result<ScenarioShape, Error> {
    if s >= inst.num_scenarios() {
        return Err(Error::Model(format!("scenario index {s} out of range")));
    }
    let sc = &inst.scenarios[s];
    let nc = inst.num_commodities();
    let np = inst.num_periods();
    let ne = inst.num_equipment();
    let nf = inst.num_storage();
    let columns = enumerate_columns(inst);

    let mut lp = LinearProgram::new();
    for var in &columns {
        let cost = flow_cost(inst, var);
        debug_assert!(cost.is_finite(), "column admitted with infinite rate");
        lp.add_col(cost_scale * cost, 0.0, INF, flow_name(inst, var));
    }

    // Row scaffolding: map semantic keys to row indices, then fill
    // coefficients in one pass over the columns.
    let mut supply_row = vec![usize::MAX; inst.num_counties() * nc * np];
    let mut demand_row = vec![usize::MAX; inst.num_counties() * nc * np];
    let mut obal_row = vec![usize::MAX; inst.num_ports() * nc * np];
    let mut dbal_row = vec![usize::MAX; inst.num_ports() * nc * np];
    let mut proc_row = vec![usize::MAX; inst.num_ports() * ne * np];
    let mut stor_row = vec![usize::MAX; inst.num_ports() * nf * np];
    let key3 = |a: usize, b: usize, c: usize, nb: usize, ncc: usize| (a * nb + b) * ncc + c;

    let mut rows: Vec<Row> = Vec::new();
    for (jj, &j) in inst.origin_county_idx.iter().enumerate() {
        for c in 0..nc {
            for p in 0..np {
                supply_row[key3(j, c, p, nc, np)] = rows.len();
                rows.push(Row {
                    coeffs: Vec::new(),
                    sense: RowSense::Le,
                    rhs: sc.supply[ScenarioData::idx(nc, np, jj, c, p)],
                    name: format!(
                        "supply/{}/{}/{}",
                        inst.sets.counties[j], inst.sets.commodities[c], p + 1
                    ),
                });
            }
        }
    }
    for (mm, &m) in inst.destination_county_idx.iter().enumerate() {
        for c in 0..nc {
            for p in 0..np {
                demand_row[key3(m, c, p, nc, np)] = rows.len();
                rows.push(Row {
                    coeffs: Vec::new(),
                    sense: RowSense::Eq,
                    rhs: sc.demand[ScenarioData::idx(nc, np, mm, c, p)],
                    name: format!(
                        "demand/{}/{}/{}",
                        inst.sets.counties[m], inst.sets.commodities[c], p + 1
                    ),
                });
            }
        }
    }
    for &i in &inst.origin_port_idx {
        for c in 0..nc {
            for p in 0..np {
                obal_row[key3(i, c, p, nc, np)] = rows.len();
                rows.push(Row {
                    coeffs: Vec::new(),
                    sense: RowSense::Eq,
                    rhs: 0.0,
                    name: format!(
                        "obal/{}/{}/{}",
                        inst.sets.ports[i], inst.sets.commodities[c], p + 1
                    ),
                });
            }
        }
    }
    for &k in &inst.destination_port_idx {
        for c in 0..nc {
            for p in 0..np {
                dbal_row[key3(k, c, p, nc, np)] = rows.len();
                rows.push(Row {
                    coeffs: Vec::new(),
                    sense: RowSense::Eq,
                    rhs: 0.0,
                    name: format!(
                        "dbal/{}/{}/{}",
                        inst.sets.ports[k], inst.sets.commodities[c], p + 1
                    ),
                });
            }
        }
    }
    let mut proc_rows = Vec::new();
    for i in 0..inst.num_ports() {
        for e in 0..ne {
            for p in 0..np {
                proc_row[key3(i, e, p, ne, np)] = rows.len();
                proc_rows.push((rows.len(), i, e, p));
                rows.push(Row {
                    coeffs: Vec::new(),
                    sense: RowSense::Le,
                    rhs: inst.caps.equip_capacity[e]
                        * inst.caps.existing_equipment.at(i, e) as f64,
                    name: format!(
                        "proc/{}/{}/{}",
                        inst.sets.ports[i], inst.sets.equipment_kinds[e], p + 1
                    ),
                });
            }
        }
    }
    let mut stor_rows = Vec::new();
    for i in 0..inst.num_ports() {
        for f in 0..nf {
            for p in 0..np {
                stor_row[key3(i, f, p, nf, np)] = rows.len();
                stor_rows.push((rows.len(), i, f, p));
                rows.push(Row {
                    coeffs: Vec::new(),
                    sense: RowSense::Le,
                    rhs: inst.caps.storage_capacity[f]
                        * inst.caps.existing_storage.at(i, f) as f64,
                    name: format!(
                        "stor/{}/{}/{}",
                        inst.sets.ports[i], inst.sets.storage_kinds[f], p + 1
                    ),
                });
            }
        }
    }

    let add = |row: usize, col: usize, v: f64, rows: &mut Vec<Row>| {
        rows[row].coeffs.push((col, v));
    };
    for (col, var) in columns.iter().enumerate() {
        match *var {
            FlowVar::TruckToPort { j, i, c, p, e } | FlowVar::RailToPort { j, i, c, p, e } => {
                add(supply_row[key3(j, c, p, nc, np)], col, 1.0, &mut rows);
                add(obal_row[key3(i, c, p, nc, np)], col, 1.0, &mut rows);
                add(
                    proc_row[key3(i, e, p, ne, np)],
                    col,
                    inst.caps.processing_norm.at(e, c),
                    &mut rows,
                );
            }
            FlowVar::Barge { i, k, c, p, e } => {
                add(obal_row[key3(i, c, p, nc, np)], col, -1.0, &mut rows);
                add(dbal_row[key3(k, c, p, nc, np)], col, 1.0, &mut rows);
                let norm = inst.caps.processing_norm.at(e, c);
                add(proc_row[key3(i, e, p, ne, np)], col, norm, &mut rows);
                add(proc_row[key3(k, e, p, ne, np)], col, norm, &mut rows);
            }
            FlowVar::TruckFromPort { i, j, c, p, e } | FlowVar::RailFromPort { i, j, c, p, e } => {
                add(dbal_row[key3(i, c, p, nc, np)], col, -1.0, &mut rows);
                add(demand_row[key3(j, c, p, nc, np)], col, 1.0, &mut rows);
                add(
                    proc_row[key3(i, e, p, ne, np)],
                    col,
                    inst.caps.processing_norm.at(e, c),
                    &mut rows,
                );
            }
            FlowVar::TruckDirect { j, m, c, p } | FlowVar::RailDirect { j, m, c, p } => {
                add(supply_row[key3(j, c, p, nc, np)], col, 1.0, &mut rows);
                add(demand_row[key3(m, c, p, nc, np)], col, 1.0, &mut rows);
            }
            FlowVar::OriginInventory { i, c, p, f } => {
                // Carried out of period p's balance, into period p+1's.
                add(obal_row[key3(i, c, p, nc, np)], col, -1.0, &mut rows);
                if p + 1 < np {
                    add(obal_row[key3(i, c, p + 1, nc, np)], col, 1.0, &mut rows);
                }
                add(
                    stor_row[key3(i, f, p, nf, np)],
                    col,
                    inst.caps.storage_norm.at(f, c),
                    &mut rows,
                );
            }
            FlowVar::DestInventory { i, c, p, f } => {
                add(dbal_row[key3(i, c, p, nc, np)], col, -1.0, &mut rows);
                if p + 1 < np {
                    add(dbal_row[key3(i, c, p + 1, nc, np)], col, 1.0, &mut rows);
                }
                add(
                    stor_row[key3(i, f, p, nf, np)],
                    col,
                    inst.caps.storage_norm.at(f, c),
                    &mut rows,
                );
            }
            FlowVar::Shortage { j, c, p } => {
                add(demand_row[key3(j, c, p, nc, np)], col, 1.0, &mut rows);
            }
        }
    }
    lp.rows = rows;
    lp.validate()?;
    Ok(ScenarioShape {
        scenario: s,
        lp,
        columns,
        proc_rows,
        stor_rows,
    })
}

/// Pull the nonzero flows out of a solved subproblem.
pub fn extract_recourse(shape: &ScenarioShape, sol: &LpSolution) -> RecourseSolution {
    let flows = shape
        .columns
        .iter()
        .zip(sol.primal.iter())
        .filter(|(_, &v)| v > 1e-9)
        .map(|(var, &v)| (*var, v))
        .collect();
    RecourseSolution {
        scenario: shape.scenario,
        objective: sol.objective,
        flows,
    }
}

/// A Benders optimality cut: `theta_s >= constant + z_coef . Z + y_coef . Y`.
#[derive(Debug, Clone)]
pub struct Cut {
    pub scenario: usize,
    pub constant: f64,
    /// Per (port, equipment kind), port-major.
    pub z_coef: Vec<f64>,
    /// Per (port, storage kind), port-major.
    pub y_coef: Vec<f64>,
}

impl Cut {
    /// Value of the cut's right-hand side at an integer plan.
    pub fn eval(&self, inst: &Instance, plan: &InvestmentPlan) -> f64 {
        let ne = inst.num_equipment();
        let nf = inst.num_storage();
        let mut v = self.constant;
        for i in 0..inst.num_ports() {
            for e in 0..ne {
                v += self.z_coef[i * ne + e] * plan.new_equipment.at(i, e) as f64;
            }
            for f in 0..nf {
                v += self.y_coef[i * nf + f] * plan.new_storage.at(i, f) as f64;
            }
        }
        v
    }
}

/// Turn a solved subproblem into an optimality cut. `priced_at` must be the
/// *new-unit* levels the capacity rows were set to when `sol` was obtained
/// (integer plan counts or fractional core-point values).
pub fn make_optimality_cut(
    inst: &Instance,
    shape: &ScenarioShape,
    sol: &LpSolution,
    priced_at_equipment: &[f64],
    priced_at_storage: &[f64],
) -> Result<Cut, Error> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!(
            "cannot build a cut from a subproblem with status {:?}",
            sol.status
        )));
    }
    let ne = inst.num_equipment();
    let nf = inst.num_storage();
    let mut z_coef = vec![0.0; inst.num_ports() * ne];
    let mut y_coef = vec![0.0; inst.num_ports() * nf];
    for &(row, i, e, _p) in &shape.proc_rows {
        z_coef[i * ne + e] += sol.duals[row] * inst.caps.equip_capacity[e];
    }
    for &(row, i, f, _p) in &shape.stor_rows {
        y_coef[i * nf + f] += sol.duals[row] * inst.caps.storage_capacity[f];
    }
    // By strong duality the subproblem value equals the full dual
    // expression at the priced levels, so the plan-independent part is the
    // objective minus the new-unit capacity terms.
    let mut constant = sol.objective;
    for (k, &coef) in z_coef.iter().enumerate() {
        constant -= coef * priced_at_equipment[k];
    }
    for (k, &coef) in y_coef.iter().enumerate() {
        constant -= coef * priced_at_storage[k];
    }
    Ok(Cut {
        scenario: shape.scenario,
        constant,
        z_coef,
        y_coef,
    })
}

/// The first-stage MILP: integer investment counts, one recourse-value
/// variable per scenario, the budget row, and appended cuts.
#[derive(Debug, Clone)]
pub struct MasterProblem {
    pub mip: MixedIntegerProgram,
    /// Column of Z for each (port, equipment kind), port-major.
    pub z_cols: Vec<usize>,
    /// Column of Y for each (port, storage kind), port-major.
    pub y_cols: Vec<usize>,
    /// Column of theta for each scenario.
    pub theta_cols: Vec<usize>,
    knapsack_row: Option<usize>,
    cuts: Vec<Cut>,
    num_ports: usize,
    num_equipment: usize,
    num_storage: usize,
}

/// Result of one master solve.
#[derive(Debug, Clone)]
pub struct MasterSolution {
    pub plan: InvestmentPlan,
    pub thetas: Vec<f64>,
    /// Optimal master objective: investment cost + weighted thetas.
    pub objective: f64,
    /// Proven lower bound on the master optimum; equals `objective` up to
    /// the branch-and-bound gap tolerance, but stays valid under early
    /// termination.
    pub best_bound: f64,
    pub status: MilpStatus,
    pub nodes: usize,
}

impl MasterProblem {
    /// `link_storage_to_equipment` additionally enforces the configured
    /// minimum storage-per-equipment ratios as first-stage rows.
    pub fn new(inst: &Instance, link_storage_to_equipment: bool) -> Result<Self, Error> {
        let ni = inst.num_ports();
        let ne = inst.num_equipment();
        let nf = inst.num_storage();
        let b = inst.costs.budget;
        let mut lp = LinearProgram::new();
        let mut z_cols = Vec::with_capacity(ni * ne);
        let mut y_cols = Vec::with_capacity(ni * nf);
        for i in 0..ni {
            for e in 0..ne {
                // No plan can afford more units than the budget allows.
                let cost = inst.costs.equipment_cost[e];
                let ub = if cost > 0.0 { (b / cost).floor() } else { INF };
                z_cols.push(lp.add_col(
                    cost,
                    0.0,
                    ub,
                    format!("z/{}/{}", inst.sets.ports[i], inst.sets.equipment_kinds[e]),
                ));
            }
        }
        for i in 0..ni {
            for f in 0..nf {
                let cost = inst.costs.storage_cost[f];
                let ub = if cost > 0.0 { (b / cost).floor() } else { INF };
                y_cols.push(lp.add_col(
                    cost,
                    0.0,
                    ub,
                    format!("y/{}/{}", inst.sets.ports[i], inst.sets.storage_kinds[f]),
                ));
            }
        }
        let mut theta_cols = Vec::with_capacity(inst.num_scenarios());
        for (s, sc) in inst.scenarios.iter().enumerate() {
            theta_cols.push(lp.add_col(
                sc.probability,
                0.0,
                INF,
                format!("theta/{}", inst.sets.scenarios[s]),
            ));
        }
        let mut budget_coeffs = Vec::new();
        for i in 0..ni {
            for e in 0..ne {
                budget_coeffs.push((z_cols[i * ne + e], inst.costs.equipment_cost[e]));
            }
            for f in 0..nf {
                budget_coeffs.push((y_cols[i * nf + f], inst.costs.storage_cost[f]));
            }
        }
        lp.add_row(budget_coeffs, RowSense::Le, b, "budget".to_string());
        // Interchangeable-kind symmetry breaking: when two kinds have
        // identical purchase cost, unit capacity, commodity norms, and
        // compatibility, new units of either contribute identically to every
        // recourse row, so only their per-port sum matters. Ordering the
        // counts keeps at least one optimum per symmetry class and spares
        // the branch-and-bound an exponential family of equivalent plans.
        let nc = inst.num_commodities();
        for e2 in 1..ne {
            let twin = (0..e2).rev().find(|&e1| {
                inst.costs.equipment_cost[e1] == inst.costs.equipment_cost[e2]
                    && inst.caps.equip_capacity[e1] == inst.caps.equip_capacity[e2]
                    && (0..nc).all(|c| {
                        inst.caps.equip_compat.at(e1, c) == inst.caps.equip_compat.at(e2, c)
                            && inst.caps.processing_norm.at(e1, c)
                                == inst.caps.processing_norm.at(e2, c)
                    })
                    && (0..nf).all(|f| {
                        inst.caps.min_storage_equipment_ratio.at(f, e1)
                            == inst.caps.min_storage_equipment_ratio.at(f, e2)
                    })
            });
            if let Some(e1) = twin {
                for i in 0..ni {
                    lp.add_row(
                        vec![(z_cols[i * ne + e1], 1.0), (z_cols[i * ne + e2], -1.0)],
                        RowSense::Ge,
                        0.0,
                        format!(
                            "sym/{}/{}/{}",
                            inst.sets.ports[i],
                            inst.sets.equipment_kinds[e1],
                            inst.sets.equipment_kinds[e2]
                        ),
                    );
                }
            }
        }
        for f2 in 1..nf {
            let twin = (0..f2).rev().find(|&f1| {
                inst.costs.storage_cost[f1] == inst.costs.storage_cost[f2]
                    && inst.caps.storage_capacity[f1] == inst.caps.storage_capacity[f2]
                    && (0..nc).all(|c| {
                        inst.caps.storage_compat.at(f1, c) == inst.caps.storage_compat.at(f2, c)
                            && inst.caps.storage_norm.at(f1, c)
                                == inst.caps.storage_norm.at(f2, c)
                    })
                    && (0..ne).all(|e| {
                        inst.caps.min_storage_equipment_ratio.at(f1, e)
                            == inst.caps.min_storage_equipment_ratio.at(f2, e)
                    })
            });
            if let Some(f1) = twin {
                for i in 0..ni {
                    lp.add_row(
                        vec![(y_cols[i * nf + f1], 1.0), (y_cols[i * nf + f2], -1.0)],
                        RowSense::Ge,
                        0.0,
                        format!(
                            "sym/{}/{}/{}",
                            inst.sets.ports[i],
                            inst.sets.storage_kinds[f1],
                            inst.sets.storage_kinds[f2]
                        ),
                    );
                }
            }
        }
        if link_storage_to_equipment {
            for i in 0..ni {
                for f in 0..nf {
                    for e in 0..ne {
                        let ratio = inst.caps.min_storage_equipment_ratio.at(f, e);
                        if ratio > 0.0 {
                            lp.add_row(
                                vec![
                                    (y_cols[i * nf + f], 1.0),
                                    (z_cols[i * ne + e], -ratio),
                                ],
                                RowSense::Ge,
                                ratio * inst.caps.existing_equipment.at(i, e) as f64
                                    - inst.caps.existing_storage.at(i, f) as f64,
                                format!(
                                    "link/{}/{}/{}",
                                    inst.sets.ports[i],
                                    inst.sets.storage_kinds[f],
                                    inst.sets.equipment_kinds[e]
                                ),
                            );
                        }
                    }
                }
            }
        }
        let integer_cols = z_cols.iter().chain(y_cols.iter()).copied().collect();
        let mip = MixedIntegerProgram { lp, integer_cols };
        mip.validate()?;
        Ok(Self {
            mip,
            z_cols,
            y_cols,
            theta_cols,
            knapsack_row: None,
            cuts: Vec::new(),
            num_ports: ni,
            num_equipment: ne,
            num_storage: nf,
        })
    }

    /// Append an optimality cut row: theta_s - coef.Z - coef.Y >= constant.
    pub fn add_cut(&mut self, cut: &Cut) {
        let mut coeffs = vec![(self.theta_cols[cut.scenario], 1.0)];
        for (k, &v) in cut.z_coef.iter().enumerate() {
            if v != 0.0 {
                coeffs.push((self.z_cols[k], -v));
            }
        }
        for (k, &v) in cut.y_coef.iter().enumerate() {
            if v != 0.0 {
                coeffs.push((self.y_cols[k], -v));
            }
        }
        let n = self.mip.lp.num_rows();
        self.mip.lp.add_row(
            coeffs,
            RowSense::Ge,
            cut.constant,
            format!("cut/{}/{}", cut.scenario, n),
        );
        self.cuts.push(cut.clone());
    }

    /// Install or tighten the lower-bound inequality: the master objective
    /// expression must be at least `lb`. A later call replaces the earlier
    /// bound instead of stacking a new row.
    pub fn set_knapsack_bound(&mut self, lb: f64) {
        match self.knapsack_row {
            Some(row) => self.mip.lp.rows[row].rhs = lb,
            None => {
                let coeffs: Vec<(usize, f64)> = self
                    .mip
                    .lp
                    .objective
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0.0)
                    .map(|(j, &c)| (j, c))
                    .collect();
                self.knapsack_row =
                    Some(self.mip.lp.add_row(coeffs, RowSense::Ge, lb, "knapsack".to_string()));
            }
        }
    }

    pub fn solve(&self, opts: &MilpOptions) -> Result<MasterSolution, Error> {
        self.solve_seeded(opts, None)
    }

    /// Build a feasible starting incumbent from a known plan: thetas are
    /// lifted onto the current cut set (and the knapsack row if present), so
    /// the point stays feasible as cuts accumulate across iterations.
    fn seed_from_plan(&self, plan: &InvestmentPlan) -> Option<(f64, Vec<f64>)> {
        let lp = &self.mip.lp;
        let mut x = vec![0.0; lp.num_cols()];
        for i in 0..self.num_ports {
            for e in 0..self.num_equipment {
                let col = self.z_cols[i * self.num_equipment + e];
                let v = plan.new_equipment.at(i, e) as f64;
                if v > lp.col_upper[col] + 1e-9 {
                    return None;
                }
                x[col] = v;
            }
            for f in 0..self.num_storage {
                let col = self.y_cols[i * self.num_storage + f];
                let v = plan.new_storage.at(i, f) as f64;
                if v > lp.col_upper[col] + 1e-9 {
                    return None;
                }
                x[col] = v;
            }
        }
        for (s, &tcol) in self.theta_cols.iter().enumerate() {
            let mut theta = 0.0f64;
            for cut in self.cuts.iter().filter(|c| c.scenario == s) {
                let mut v = cut.constant;
                for (k, &c) in cut.z_coef.iter().enumerate() {
                    v += c * x[self.z_cols[k]];
                }
                for (k, &c) in cut.y_coef.iter().enumerate() {
                    v += c * x[self.y_cols[k]];
                }
                theta = theta.max(v);
            }
            x[tcol] = theta;
        }
        if let Some(row) = self.knapsack_row {
            let r = &lp.rows[row];
            let lhs: f64 = r.coeffs.iter().map(|&(j, c)| c * x[j]).sum();
            if lhs < r.rhs {
                // Any theta increase keeps the cut rows satisfied.
                let w = lp.objective[self.theta_cols[0]];
                if w <= 0.0 {
                    return None;
                }
                x[self.theta_cols[0]] += (r.rhs - lhs) / w;
            }
        }
        let objective = x
            .iter()
            .zip(lp.objective.iter())
            .map(|(v, c)| v * c)
            .sum();
        Some((objective, x))
    }

    /// Like `solve`, but primes branch and bound with `warm_plan` (typically
    /// the previous iteration's plan) as the starting incumbent.
    pub fn solve_seeded(
        &self,
        opts: &MilpOptions,
        warm_plan: Option<&InvestmentPlan>,
    ) -> Result<MasterSolution, Error> {
        let seed = warm_plan.and_then(|p| self.seed_from_plan(p));
        let sol: MilpSolution = crate::milp::solve_milp_seeded(&self.mip, opts, seed)?;
        if sol.status == MilpStatus::Infeasible {
            return Err(Error::Solver(
                "master problem infeasible; check budget and cut data".into(),
            ));
        }
        if sol.values.len() != self.mip.lp.num_cols() {
            return Err(Error::Solver(
                "master terminated without an incumbent plan".into(),
            ));
        }
        let mut plan = InvestmentPlan {
            new_equipment: crate::model::CountMatrix::new(self.num_ports, self.num_equipment),
            new_storage: crate::model::CountMatrix::new(self.num_ports, self.num_storage),
        };
        for i in 0..self.num_ports {
            for e in 0..self.num_equipment {
                let v = sol.values[self.z_cols[i * self.num_equipment + e]];
                plan.new_equipment.set(i, e, v.round() as u64);
            }
            for f in 0..self.num_storage {
                let v = sol.values[self.y_cols[i * self.num_storage + f]];
                plan.new_storage.set(i, f, v.round() as u64);
            }
        }
        let thetas = self.theta_cols.iter().map(|&c| sol.values[c]).collect();
        Ok(MasterSolution {
            plan,
            thetas,
            objective: sol.objective,
            best_bound: sol.best_bound.min(sol.objective),
            status: sol.status,
            nodes: sol.nodes,
        })
    }
}

/// Explicit dual of a scenario subproblem at the given capacity levels,
/// built by mechanical transposition. The returned LP minimizes the
/// negated dual objective, so the dual optimum is `-solution.objective`.
pub fn build_dual_subproblem(
    inst: &Instance,
    shape: &ScenarioShape,
    levels: &CapacityLevels,
) -> Result<LinearProgram, Error> {
    let mut shape = shape.clone();
    shape.set_levels(inst, levels);
    let primal = &shape.lp;
    let mut dual = LinearProgram::new();
    for row in &primal.rows {
        let (lo, hi) = match row.sense {
            RowSense::Le => (-INF, 0.0),
            RowSense::Eq => (-INF, INF),
            RowSense::Ge => (0.0, INF),
        };
        // Maximize rhs.y == minimize -rhs.y.
        dual.add_col(-row.rhs, lo, hi, format!("dual/{}", row.name));
    }
    // One dual row per primal column: sum_i a_ij y_i <= c_j.
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); primal.num_cols()];
    for (r, row) in primal.rows.iter().enumerate() {
        for &(j, v) in &row.coeffs {
            by_col[j].push((r, v));
        }
    }
    for (j, coeffs) in by_col.into_iter().enumerate() {
        dual.add_row(
            coeffs,
            RowSense::Le,
            primal.objective[j],
            format!("dc/{}", primal.col_names[j]),
        );
    }
    dual.validate()?;
    Ok(dual)
}

/// Re-point a shape's capacity rows at a core point and return it ready to
/// solve; the duals of the solved LP price the cut at those levels.
pub fn build_mw_subproblem(
    inst: &Instance,
    shape: &ScenarioShape,
    core_equipment: &[f64],
    core_storage: &[f64],
) -> ScenarioShape {
    let mut mw = shape.clone();
    mw.set_levels(
        inst,
        &CapacityLevels::from_fractional(inst, core_equipment, core_storage),
    );
    mw
}

/// The full deterministic-equivalent MILP with every scenario inlined.
#[derive(Debug)]
pub struct ExtensiveForm {
    pub mip: MixedIntegerProgram,
    pub z_cols: Vec<usize>,
    pub y_cols: Vec<usize>,
    /// Column offset and shape of each scenario block.
    pub scenario_offsets: Vec<usize>,
    pub shapes: Vec<ScenarioShape>,
}

pub fn build_extensive_form(inst: &Instance) -> Result<ExtensiveForm, Error> {
    let ni = inst.num_ports();
    let ne = inst.num_equipment();
    let nf = inst.num_storage();
    let master = MasterProblem::new(inst, false)?;
    // Start from the master's Z/Y columns and the budget row, but drop the
    // theta columns (the scenario blocks replace them).
    let mut lp = LinearProgram::new();
    let mut z_cols = Vec::new();
    let mut y_cols = Vec::new();
    for &c in &master.z_cols {
        z_cols.push(lp.add_col(
            master.mip.lp.objective[c],
            master.mip.lp.col_lower[c],
            master.mip.lp.col_upper[c],
            master.mip.lp.col_names[c].clone(),
        ));
    }
    for &c in &master.y_cols {
        y_cols.push(lp.add_col(
            master.mip.lp.objective[c],
            master.mip.lp.col_lower[c],
            master.mip.lp.col_upper[c],
            master.mip.lp.col_names[c].clone(),
        ));
    }
    let mut budget_coeffs = Vec::new();
    for i in 0..ni {
        for e in 0..ne {
            budget_coeffs.push((z_cols[i * ne + e], inst.costs.equipment_cost[e]));
        }
        for f in 0..nf {
            budget_coeffs.push((y_cols[i * nf + f], inst.costs.storage_cost[f]));
        }
    }
    lp.add_row(budget_coeffs, RowSense::Le, inst.costs.budget, "budget".to_string());

    let mut scenario_offsets = Vec::new();
    let mut shapes = Vec::new();
    for s in 0..inst.num_scenarios() {
        let shape = build_subproblem_scaled(inst, s, inst.scenarios[s].probability)?;
        let offset = lp.num_cols();
        if offset + shape.lp.num_cols() > EXTENSIVE_FORM_COLUMN_LIMIT {
            return Err(Error::Model(format!(
                "extensive form would exceed {EXTENSIVE_FORM_COLUMN_LIMIT} columns; \
                 use the decomposition solver instead"
            )));
        }
        scenario_offsets.push(offset);
        for j in 0..shape.lp.num_cols() {
            lp.add_col(
                shape.lp.objective[j],
                shape.lp.col_lower[j],
                shape.lp.col_upper[j],
                format!("s{}::{}", s, shape.lp.col_names[j]),
            );
        }
        for row in &shape.lp.rows {
            let coeffs: Vec<(usize, f64)> =
                row.coeffs.iter().map(|&(j, v)| (offset + j, v)).collect();
            lp.add_row(coeffs, row.sense, row.rhs, format!("s{}::{}", s, row.name));
        }
        // Tie capacity rows to the investment columns:
        // row' = flows - m_e Z <= m_e n  (and likewise for storage).
        for &(row, i, e, _p) in &shape.proc_rows {
            let global = lp.num_rows() - shape.lp.num_rows() + row;
            let m = inst.caps.equip_capacity[e];
            lp.rows[global].coeffs.push((z_cols[i * ne + e], -m));
            lp.rows[global].rhs = m * inst.caps.existing_equipment.at(i, e) as f64;
        }
        for &(row, i, f, _p) in &shape.stor_rows {
            let global = lp.num_rows() - shape.lp.num_rows() + row;
            let l = inst.caps.storage_capacity[f];
            lp.rows[global].coeffs.push((y_cols[i * nf + f], -l));
            lp.rows[global].rhs = l * inst.caps.existing_storage.at(i, f) as f64;
        }
        shapes.push(shape);
    }
    lp.validate()?;
    let integer_cols = z_cols.iter().chain(y_cols.iter()).copied().collect();
    let mip = MixedIntegerProgram { lp, integer_cols };
    mip.validate()?;
    Ok(ExtensiveForm {
        mip,
        z_cols,
        y_cols,
        scenario_offsets,
        shapes,
    })
}

/// Solve one scenario subproblem at a plan and return both the solution
/// and the LP it was solved on.
pub fn solve_subproblem_at_plan(
    inst: &Instance,
    shape: &ScenarioShape,
    plan: &InvestmentPlan,
    opts: &SimplexOptions,
) -> Result<LpSolution, Error> {
    let mut sh = shape.clone();
    sh.set_plan(inst, plan);
    let sol = crate::lp::solve_lp(&sh.lp, opts)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!(
            "recourse subproblem for scenario {} returned {:?}; the model \
             should have complete recourse",
            shape.scenario, sol.status
        )));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_lp;
    use crate::model::{
        CapacityParameters, CostParameters, CountMatrix, DistanceTable, IndexSets, Matrix,
        ScenarioData,
    };

    /// One origin county/port, one destination port/county, one commodity,
    /// one period, one scenario. Costs chosen so the port route is cheap
    /// and the direct truck route expensive but finite.
    pub fn micro(existing_equipment: u64, supply: f64, demand: f64) -> Instance {
        let sets = IndexSets {
            ports: vec!["p1".into(), "p2".into()],
            counties: vec!["a".into(), "b".into()],
            origin_ports: vec!["p1".into()],
            destination_ports: vec!["p2".into()],
            origin_counties: vec!["a".into()],
            destination_counties: vec!["b".into()],
            commodities: vec!["grain".into()],
            equipment_kinds: vec!["crane".into()],
            storage_kinds: vec!["shed".into()],
            periods: vec![1],
            scenarios: vec!["s1".into()],
        };
        let mut truck_port_rate = Matrix::new(2, 2, 0.0);
        truck_port_rate.set(0, 0, 2.0); // a -> p1
        truck_port_rate.set(1, 1, 3.0); // p2 -> b
        let mut barge_rate = Matrix::new(2, 2, crate::lp::INF);
        barge_rate.set(0, 1, 1.0);
        let mut county_truck_rate = Matrix::new(2, 2, crate::lp::INF);
        county_truck_rate.set(0, 1, 50.0);
        let mut existing = CountMatrix::new(2, 1);
        existing.set(0, 0, existing_equipment);
        existing.set(1, 0, existing_equipment);
        Instance::new(
            sets,
            CostParameters {
                equipment_cost: vec![100_000.0],
                storage_cost: vec![200_000.0],
                truck_port_rate,
                rail_port_rate: Matrix::new(2, 2, crate::lp::INF),
                barge_rate,
                county_truck_rate,
                county_rail_rate: Matrix::new(2, 2, crate::lp::INF),
                holding_cost: vec![1.0],
                shortage_penalty: 500.0,
                budget: 1_000_000.0,
            },
            CapacityParameters {
                equip_compat: Matrix::new(1, 1, 1.0),
                storage_compat: Matrix::new(1, 1, 1.0),
                port_rail: vec![false, false],
                county_rail: vec![false, false],
                min_storage_equipment_ratio: Matrix::new(1, 1, 0.0),
                processing_norm: Matrix::new(1, 1, 1.0),
                storage_norm: Matrix::new(1, 1, 1.0),
                equip_capacity: vec![100.0],
                storage_capacity: vec![50.0],
                existing_equipment: existing,
                existing_storage: CountMatrix::new(2, 1),
            },
            DistanceTable {
                county_port: Matrix::new(2, 2, 10.0),
                port_port: Matrix::new(2, 2, 100.0),
                county_county: Matrix::new(2, 2, 200.0),
            },
            vec![ScenarioData {
                probability: 1.0,
                supply: vec![supply],
                demand: vec![demand],
            }],
        )
        .unwrap()
    }

    #[test]
    fn zero_plan_uses_direct_or_shortage() {
        // No equipment anywhere: port route unusable, direct truck at 50
        // beats shortage at 500, supply covers demand.
        let inst = micro(0, 100.0, 80.0);
        let shape = build_subproblem(&inst, 0).unwrap();
        let sol = solve_lp(&shape.lp, &SimplexOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 80.0 * 50.0).abs() < 1e-6);
    }

    #[test]
    fn processing_capacity_throttles_the_port_route() {
        // One unit (capacity 100) per port: inbound truck and outbound
        // barge both consume capacity at p1, so at most 50 tons transit.
        // Optimal: 50 by water at 6/ton, the remaining 30 direct at 50.
        let inst = micro(1, 100.0, 80.0);
        let shape = build_subproblem(&inst, 0).unwrap();
        let sol = solve_lp(&shape.lp, &SimplexOptions::default()).unwrap();
        assert!((sol.objective - (50.0 * 6.0 + 30.0 * 50.0)).abs() < 1e-6);
    }

    #[test]
    fn equipped_ports_route_through_water() {
        // Two units per port (capacity 200) clear all 80 tons through the
        // barge chain at 2 + 1 + 3 = 6 per ton.
        let inst = micro(2, 100.0, 80.0);
        let shape = build_subproblem(&inst, 0).unwrap();
        let sol = solve_lp(&shape.lp, &SimplexOptions::default()).unwrap();
        assert!((sol.objective - 80.0 * 6.0).abs() < 1e-6);
        let rec = extract_recourse(&shape, &sol);
        let barge: f64 = rec
            .flows
            .iter()
            .filter(|(v, _)| matches!(v, FlowVar::Barge { .. }))
            .map(|(_, t)| t)
            .sum();
        assert!((barge - 80.0).abs() < 1e-6);
    }

    #[test]
    fn shortage_absorbs_unmet_demand() {
        // Demand 80 exceeds supply 30 with no port equipment: ship 30
        //直direct, 50 short.
        let inst = micro(0, 30.0, 80.0);
        let shape = build_subproblem(&inst, 0).unwrap();
        let sol = solve_lp(&shape.lp, &SimplexOptions::default()).unwrap();
        assert!((sol.objective - (30.0 * 50.0 + 50.0 * 500.0)).abs() < 1e-6);
    }

    #[test]
    fn dual_form_matches_primal_value() {
        let inst = micro(1, 100.0, 80.0);
        let shape = build_subproblem(&inst, 0).unwrap();
        let plan = InvestmentPlan::zero(&inst);
        let levels = CapacityLevels::from_plan(&inst, &plan);
        let primal = solve_subproblem_at_plan(&inst, &shape, &plan, &SimplexOptions::default())
            .unwrap();
        let dual = build_dual_subproblem(&inst, &shape, &levels).unwrap();
        let dsol = solve_lp(&dual, &SimplexOptions::default()).unwrap();
        assert_eq!(dsol.status, LpStatus::Optimal);
        assert!(
            (-dsol.objective - primal.objective).abs() < 1e-6,
            "dual {} vs primal {}",
            -dsol.objective,
            primal.objective
        );
    }

    #[test]
    fn optimality_cut_is_tight_at_source_and_valid_elsewhere() {
        let inst = micro(0, 100.0, 80.0);
        let shape = build_subproblem(&inst, 0).unwrap();
        let opts = SimplexOptions::default();

        let zero = InvestmentPlan::zero(&inst);
        let sol = solve_subproblem_at_plan(&inst, &shape, &zero, &opts).unwrap();
        let lv = CapacityLevels::from_plan(&inst, &zero);
        // make_optimality_cut wants new-unit levels, not totals.
        let new_e = vec![0.0; 2];
        let new_f = vec![0.0; 2];
        let _ = lv;
        let cut = make_optimality_cut(&inst, &shape, &sol, &new_e, &new_f).unwrap();

        // Tight at the plan it was generated from.
        assert!((cut.eval(&inst, &zero) - sol.objective).abs() < 1e-6);

        // Valid (under-estimating) at other plans.
        for units in 1..=3u64 {
            let mut plan = InvestmentPlan::zero(&inst);
            plan.new_equipment.set(0, 0, units);
            plan.new_equipment.set(1, 0, units);
            let h = solve_subproblem_at_plan(&inst, &shape, &plan, &opts)
                .unwrap()
                .objective;
            assert!(
                cut.eval(&inst, &plan) <= h + 1e-6,
                "cut {} exceeds recourse {} at {} units",
                cut.eval(&inst, &plan),
                h,
                units
            );
        }
    }

    #[test]
    fn master_respects_budget_and_bounds() {
        let inst = micro(0, 100.0, 80.0);
        let master = MasterProblem::new(&inst, false).unwrap();
        // Budget 1e6 / equipment 1e5 => at most 10 units per column.
        assert_eq!(master.mip.lp.col_upper[master.z_cols[0]], 10.0);
        assert_eq!(master.mip.lp.col_upper[master.y_cols[0]], 5.0);
        let sol = master.solve(&MilpOptions::default()).unwrap();
        // No cuts yet: thetas collapse to zero and nothing is bought.
        assert!(sol.plan.is_zero());
        assert!(sol.objective.abs() < 1e-9);
    }

    #[test]
    fn knapsack_row_replaces_not_stacks() {
        let inst = micro(0, 100.0, 80.0);
        let mut master = MasterProblem::new(&inst, false).unwrap();
        let before = master.mip.lp.num_rows();
        master.set_knapsack_bound(10.0);
        assert_eq!(master.mip.lp.num_rows(), before + 1);
        master.set_knapsack_bound(20.0);
        assert_eq!(master.mip.lp.num_rows(), before + 1);
        let row = master.knapsack_row.unwrap();
        assert_eq!(master.mip.lp.rows[row].rhs, 20.0);
    }

    #[test]
    fn extensive_form_matches_hand_computation() {
        // Investing is never worth it on the micro instance (equipment is
        // 100k to save 44/ton on 80 tons), so the optimum stays at the
        // zero-plan recourse cost.
        let inst = micro(0, 100.0, 80.0);
        let ef = build_extensive_form(&inst).unwrap();
        let sol = crate::milp::solve_milp(&ef.mip, &MilpOptions::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Optimal);
        assert!((sol.objective - 80.0 * 50.0).abs() < 1e-6);
        for &c in ef.z_cols.iter().chain(ef.y_cols.iter()) {
            assert!(sol.values[c].abs() < 1e-6);
        }
    }
}
