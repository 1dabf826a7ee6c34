//! Domain types for a port-investment planning instance: index sets, cost
//! and capacity parameters, demand scenarios, and first/second-stage
//! solution containers. An `Instance` is immutable after construction and
//! safe to share read-only across solver workers.

use std::collections::HashMap;

use crate::error::Error;
use crate::lp::INF;

/// Dense row-major f64 matrix keyed by set positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, fill: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![fill; rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }
}

/// Integer count matrix (existing equipment / storage per port).
#[derive(Debug, Clone, PartialEq)]
pub struct CountMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl CountMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }
}

/// Ordered id lists for every index set. Ports may appear in both the
/// origin and destination lists; counties and ports are disjoint node sets.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSets {
    /// Master port list (union of origin and destination roles).
    pub ports: Vec<String>,
    /// Master county list.
    pub counties: Vec<String>,
    pub origin_ports: Vec<String>,
    pub destination_ports: Vec<String>,
    pub origin_counties: Vec<String>,
    pub destination_counties: Vec<String>,
    pub commodities: Vec<String>,
    pub equipment_kinds: Vec<String>,
    pub storage_kinds: Vec<String>,
    /// Consecutive integers starting at 1.
    pub periods: Vec<u32>,
    pub scenarios: Vec<String>,
}

/// All unit costs. Landside rates are per ton on a specific arc (rail rates
/// are already expanded from fixed + per-ton-mile form at ingestion). An
/// arc that does not exist carries `INF`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostParameters {
    /// Purchase cost per unit of equipment kind.
    pub equipment_cost: Vec<f64>,
    /// Purchase cost per unit of storage kind.
    pub storage_cost: Vec<f64>,
    /// County -> port truck rate, $/ton (county-major).
    pub truck_port_rate: Matrix,
    /// County -> port rail rate, $/ton; INF where either endpoint lacks rail.
    pub rail_port_rate: Matrix,
    /// Port -> port barge rate, $/ton; INF off the declared arcs.
    pub barge_rate: Matrix,
    /// County -> county truck rate, $/ton.
    pub county_truck_rate: Matrix,
    /// County -> county rail rate, $/ton; INF where rail is missing.
    pub county_rail_rate: Matrix,
    /// Inventory holding cost per commodity, $/ton/period.
    pub holding_cost: Vec<f64>,
    /// Penalty for unmet demand, $/ton.
    pub shortage_penalty: f64,
    /// Investment budget, $.
    pub budget: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityParameters {
    /// 1 when equipment kind e can process commodity c.
    pub equip_compat: Matrix,
    /// 1 when storage kind f can hold commodity c.
    pub storage_compat: Matrix,
    /// Rail access flag per port.
    pub port_rail: Vec<bool>,
    /// Rail access flag per county.
    pub county_rail: Vec<bool>,
    /// Minimum storage-to-equipment count ratio (enforced only when the
    /// optional master constraint is enabled).
    pub min_storage_equipment_ratio: Matrix,
    /// Normalized processing tonnage per (equipment, commodity).
    pub processing_norm: Matrix,
    /// Normalized storage tonnage per (storage, commodity).
    pub storage_norm: Matrix,
    /// Processing capacity of one unit of equipment, tons/period.
    pub equip_capacity: Vec<f64>,
    /// Holding capacity of one unit of storage, tons.
    pub storage_capacity: Vec<f64>,
    /// Existing equipment units per (port, kind).
    pub existing_equipment: CountMatrix,
    /// Existing storage units per (port, kind).
    pub existing_storage: CountMatrix,
}

/// One demand realization. Supply is indexed by position in
/// `origin_counties`, demand by position in `destination_counties`; both
/// are flattened as `[county][commodity][period]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioData {
    pub probability: f64,
    pub supply: Vec<f64>,
    pub demand: Vec<f64>,
}

impl ScenarioData {
    #[inline]
    pub fn idx(num_c: usize, num_p: usize, node: usize, c: usize, p: usize) -> usize {
        (node * num_c + c) * num_p + p
    }
}

/// Arc lengths in miles, used for rail-rate expansion and ton-mile reports.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    pub county_port: Matrix,
    pub port_port: Matrix,
    pub county_county: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub sets: IndexSets,
    pub costs: CostParameters,
    pub caps: CapacityParameters,
    pub distances: DistanceTable,
    pub scenarios: Vec<ScenarioData>,
    // Derived positions into the master lists.
    pub origin_port_idx: Vec<usize>,
    pub destination_port_idx: Vec<usize>,
    pub origin_county_idx: Vec<usize>,
    pub destination_county_idx: Vec<usize>,
    pub port_index: HashMap<String, usize>,
    pub county_index: HashMap<String, usize>,
}

impl Instance {
    pub fn new(
        sets: IndexSets,
        costs: CostParameters,
        caps: CapacityParameters,
        distances: DistanceTable,
        scenarios: Vec<ScenarioData>,
    ) -> Result<Self, Error> {
        let port_index: HashMap<String, usize> = sets
            .ports
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let county_index: HashMap<String, usize> = sets
            .counties
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let lookup = |map: &HashMap<String, usize>, ids: &[String], what: &str| {
            ids.iter()
                .map(|id| {
                    map.get(id)
                        .copied()
                        .ok_or_else(|| Error::Model(format!("{what} id {id} not declared")))
                })
                .collect::<Result<Vec<usize>, Error>>()
        };
        let origin_port_idx = lookup(&port_index, &sets.origin_ports, "origin port")?;
        let destination_port_idx = lookup(&port_index, &sets.destination_ports, "destination port")?;
        let origin_county_idx = lookup(&county_index, &sets.origin_counties, "origin county")?;
        let destination_county_idx =
            lookup(&county_index, &sets.destination_counties, "destination county")?;
        Ok(Self {
            sets,
            costs,
            caps,
            distances,
            scenarios,
            origin_port_idx,
            destination_port_idx,
            origin_county_idx,
            destination_county_idx,
            port_index,
            county_index,
        })
    }

    pub fn num_ports(&self) -> usize {
        self.sets.ports.len()
    }
    pub fn num_counties(&self) -> usize {
        self.sets.counties.len()
    }
    pub fn num_commodities(&self) -> usize {
        self.sets.commodities.len()
    }
    pub fn num_periods(&self) -> usize {
        self.sets.periods.len()
    }
    pub fn num_equipment(&self) -> usize {
        self.sets.equipment_kinds.len()
    }
    pub fn num_storage(&self) -> usize {
        self.sets.storage_kinds.len()
    }
    pub fn num_scenarios(&self) -> usize {
        self.scenarios.len()
    }

    /// Rail between a county and a port needs rail access at both ends.
    pub fn rail_arc_allowed_port(&self, county: usize, port: usize) -> bool {
        self.caps.county_rail[county] && self.caps.port_rail[port]
    }

    /// Rail between two counties needs rail access at both ends.
    pub fn rail_arc_allowed_county(&self, j: usize, m: usize) -> bool {
        self.caps.county_rail[j] && self.caps.county_rail[m]
    }

    /// A barge arc exists where the instance declares a finite rate.
    pub fn barge_arc_allowed(&self, i: usize, k: usize) -> bool {
        i != k && self.costs.barge_rate.at(i, k).is_finite()
    }

    /// Supply-weighted mean over scenarios, collapsed into one scenario
    /// carrying all the probability. Both demand and supply are averaged.
    pub fn mean_scenario_instance(&self) -> Instance {
        let mut mean_supply = vec![0.0; self.scenarios[0].supply.len()];
        let mut mean_demand = vec![0.0; self.scenarios[0].demand.len()];
        for sc in &self.scenarios {
            for (acc, v) in mean_supply.iter_mut().zip(sc.supply.iter()) {
                *acc += sc.probability * v;
            }
            for (acc, v) in mean_demand.iter_mut().zip(sc.demand.iter()) {
                *acc += sc.probability * v;
            }
        }
        let mut inst = self.clone();
        inst.sets.scenarios = vec!["mean".to_string()];
        inst.scenarios = vec![ScenarioData {
            probability: 1.0,
            supply: mean_supply,
            demand: mean_demand,
        }];
        inst
    }

    /// Restriction to one scenario with probability 1.
    pub fn single_scenario_instance(&self, s: usize) -> Instance {
        let mut inst = self.clone();
        inst.sets.scenarios = vec![self.sets.scenarios[s].clone()];
        inst.scenarios = vec![ScenarioData {
            probability: 1.0,
            supply: self.scenarios[s].supply.clone(),
            demand: self.scenarios[s].demand.clone(),
        }];
        inst
    }
}

/// First-stage decisions: new equipment and storage counts per port.
#[derive(Debug, Clone, PartialEq)]
pub struct InvestmentPlan {
    /// Units per (port, equipment kind).
    pub new_equipment: CountMatrix,
    /// Units per (port, storage kind).
    pub new_storage: CountMatrix,
}

impl InvestmentPlan {
    pub fn zero(inst: &Instance) -> Self {
        Self {
            new_equipment: CountMatrix::new(inst.num_ports(), inst.num_equipment()),
            new_storage: CountMatrix::new(inst.num_ports(), inst.num_storage()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.new_equipment.data.iter().all(|&v| v == 0)
            && self.new_storage.data.iter().all(|&v| v == 0)
    }
}

/// Total purchase cost of a plan.
pub fn investment_cost(plan: &InvestmentPlan, costs: &CostParameters) -> Result<f64, Error> {
    if plan.new_equipment.cols != costs.equipment_cost.len()
        || plan.new_storage.cols != costs.storage_cost.len()
    {
        return Err(Error::Model(
            "plan indexes an unknown equipment or storage kind".into(),
        ));
    }
    let mut total = 0.0;
    for i in 0..plan.new_equipment.rows {
        for e in 0..plan.new_equipment.cols {
            total += costs.equipment_cost[e] * plan.new_equipment.at(i, e) as f64;
        }
    }
    for i in 0..plan.new_storage.rows {
        for f in 0..plan.new_storage.cols {
            total += costs.storage_cost[f] * plan.new_storage.at(i, f) as f64;
        }
    }
    Ok(total)
}

/// Rail arcs need rail access at both endpoints; truck arcs are always
/// allowed and barge arcs connect any declared port pair.
pub fn allowed_rail_arc(endpoint_a_rail: bool, endpoint_b_rail: bool) -> bool {
    endpoint_a_rail && endpoint_b_rail
}

/// One second-stage variable with its index tuple. All indices point into
/// the master port/county/commodity/period/kind lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowVar {
    TruckToPort { j: usize, i: usize, c: usize, p: usize, e: usize },
    RailToPort { j: usize, i: usize, c: usize, p: usize, e: usize },
    Barge { i: usize, k: usize, c: usize, p: usize, e: usize },
    TruckFromPort { i: usize, j: usize, c: usize, p: usize, e: usize },
    RailFromPort { i: usize, j: usize, c: usize, p: usize, e: usize },
    TruckDirect { j: usize, m: usize, c: usize, p: usize },
    RailDirect { j: usize, m: usize, c: usize, p: usize },
    OriginInventory { i: usize, c: usize, p: usize, f: usize },
    DestInventory { i: usize, c: usize, p: usize, f: usize },
    Shortage { j: usize, c: usize, p: usize },
}

/// Second-stage solution for one scenario.
#[derive(Debug, Clone)]
pub struct RecourseSolution {
    pub scenario: usize,
    pub objective: f64,
    pub flows: Vec<(FlowVar, f64)>,
}

/// A single validation failure, naming the field, the offending index, and
/// the violated rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub index: String,
    pub rule: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}[{}]: {}", self.field, self.index, self.rule)
    }
}

/// Check every type invariant; returns an empty list iff the instance is
/// well formed. Pure and idempotent.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    fn push(out: &mut Vec<Violation>, field: &str, index: String, rule: String) {
        out.push(Violation {
            field: field.to_string(),
            index,
            rule,
        });
    }
    let sets = &inst.sets;

    for (name, len) in [
        ("origin_ports", sets.origin_ports.len()),
        ("destination_ports", sets.destination_ports.len()),
        ("origin_counties", sets.origin_counties.len()),
        ("destination_counties", sets.destination_counties.len()),
        ("commodities", sets.commodities.len()),
        ("equipment_kinds", sets.equipment_kinds.len()),
        ("storage_kinds", sets.storage_kinds.len()),
        ("periods", sets.periods.len()),
        ("scenarios", inst.scenarios.len()),
    ] {
        if len == 0 {
            push(&mut out, "sets", name.to_string(), "id list must be non-empty".into());
        }
    }
    for (k, &p) in sets.periods.iter().enumerate() {
        if p != (k + 1) as u32 {
            push(
                &mut out,
                "sets.periods",
                k.to_string(),
                format!("periods must be consecutive from 1, found {p}"),
            );
        }
    }
    for county in &sets.counties {
        if inst.port_index.contains_key(county) {
            push(
                &mut out,
                "sets",
                county.clone(),
                "county and port node sets must be disjoint".into(),
            );
        }
    }

    // Costs.
    let costs = &inst.costs;
    let check_rates = |out: &mut Vec<Violation>, field: &str, m: &Matrix| {
        for (k, &v) in m.data.iter().enumerate() {
            if v < 0.0 || v.is_nan() {
                out.push(Violation {
                    field: field.to_string(),
                    index: k.to_string(),
                    rule: format!("rate must be >= 0, found {v}"),
                });
            }
        }
    };
    check_rates(&mut out, "costs.truck_port_rate", &costs.truck_port_rate);
    check_rates(&mut out, "costs.rail_port_rate", &costs.rail_port_rate);
    check_rates(&mut out, "costs.barge_rate", &costs.barge_rate);
    check_rates(&mut out, "costs.county_truck_rate", &costs.county_truck_rate);
    check_rates(&mut out, "costs.county_rail_rate", &costs.county_rail_rate);
    for (k, &v) in costs
        .equipment_cost
        .iter()
        .chain(costs.storage_cost.iter())
        .chain(costs.holding_cost.iter())
        .enumerate()
    {
        if !(v >= 0.0) || !v.is_finite() {
            push(&mut out, "costs", k.to_string(), format!("cost must be finite and >= 0, found {v}"));
        }
    }
    if costs.budget < 0.0 {
        push(&mut out, "costs.budget", String::new(), format!("budget must be >= 0, found {}", costs.budget));
    }
    // Shortage must strictly dominate every landside delivered cost.
    let mut max_landside = 0.0f64;
    for &v in costs
        .county_truck_rate
        .data
        .iter()
        .chain(costs.county_rail_rate.data.iter())
    {
        if v.is_finite() {
            max_landside = max_landside.max(v);
        }
    }
    if costs.shortage_penalty <= max_landside {
        push(
            &mut out,
            "costs.shortage_penalty",
            String::new(),
            format!(
                "shortage penalty {} must exceed the largest landside rate {}",
                costs.shortage_penalty, max_landside
            ),
        );
    }

    // Capacity coherence.
    let caps = &inst.caps;
    for e in 0..sets.equipment_kinds.len() {
        for c in 0..sets.commodities.len() {
            let beta = caps.equip_compat.at(e, c);
            let lambda = caps.processing_norm.at(e, c);
            if (beta == 1.0) != (lambda > 0.0) {
                push(
                    &mut out,
                    "caps.processing_norm",
                    format!("e={},c={}", sets.equipment_kinds[e], sets.commodities[c]),
                    format!("norm must be positive exactly when compatible (beta={beta}, norm={lambda})"),
                );
            }
        }
    }
    for f in 0..sets.storage_kinds.len() {
        for c in 0..sets.commodities.len() {
            let gamma = caps.storage_compat.at(f, c);
            let zeta = caps.storage_norm.at(f, c);
            if (gamma == 1.0) != (zeta > 0.0) {
                push(
                    &mut out,
                    "caps.storage_norm",
                    format!("f={},c={}", sets.storage_kinds[f], sets.commodities[c]),
                    format!("norm must be positive exactly when compatible (gamma={gamma}, norm={zeta})"),
                );
            }
        }
    }
    for (k, &v) in caps.equip_capacity.iter().chain(caps.storage_capacity.iter()).enumerate() {
        if !(v >= 0.0) || !v.is_finite() {
            push(&mut out, "caps.capacity", k.to_string(), format!("unit capacity must be >= 0, found {v}"));
        }
    }

    // Scenario data.
    let prob_sum: f64 = inst.scenarios.iter().map(|s| s.probability).sum();
    if (prob_sum - 1.0).abs() > 1e-9 {
        push(
            &mut out,
            "scenarios.probability",
            String::new(),
            format!("scenario probabilities sum {prob_sum} != 1"),
        );
    }
    let nc = sets.commodities.len();
    let np = sets.periods.len();
    for (s, sc) in inst.scenarios.iter().enumerate() {
        if !(0.0..=1.0).contains(&sc.probability) {
            push(
                &mut out,
                "scenarios.probability",
                s.to_string(),
                format!("probability {} outside [0,1]", sc.probability),
            );
        }
        if sc.supply.len() != inst.origin_county_idx.len() * nc * np {
            push(&mut out, "scenarios.supply", s.to_string(), "supply array has the wrong shape".into());
        }
        if sc.demand.len() != inst.destination_county_idx.len() * nc * np {
            push(&mut out, "scenarios.demand", s.to_string(), "demand array has the wrong shape".into());
        }
        for (k, &v) in sc.supply.iter().chain(sc.demand.iter()).enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                push(
                    &mut out,
                    "scenarios.tonnage",
                    format!("s={s},flat={k}"),
                    format!("supply/demand must be >= 0, found {v}"),
                );
            }
        }
    }

    // Dimension integrity against the declared sets.
    let ni = sets.ports.len();
    let nj = sets.counties.len();
    let ne = sets.equipment_kinds.len();
    let nf = sets.storage_kinds.len();
    let dims: [(&str, usize, usize, usize, usize); 12] = [
        ("costs.truck_port_rate", costs.truck_port_rate.rows, nj, costs.truck_port_rate.cols, ni),
        ("costs.rail_port_rate", costs.rail_port_rate.rows, nj, costs.rail_port_rate.cols, ni),
        ("costs.barge_rate", costs.barge_rate.rows, ni, costs.barge_rate.cols, ni),
        ("costs.county_truck_rate", costs.county_truck_rate.rows, nj, costs.county_truck_rate.cols, nj),
        ("costs.county_rail_rate", costs.county_rail_rate.rows, nj, costs.county_rail_rate.cols, nj),
        ("caps.equip_compat", caps.equip_compat.rows, ne, caps.equip_compat.cols, nc),
        ("caps.storage_compat", caps.storage_compat.rows, nf, caps.storage_compat.cols, nc),
        ("caps.processing_norm", caps.processing_norm.rows, ne, caps.processing_norm.cols, nc),
        ("caps.storage_norm", caps.storage_norm.rows, nf, caps.storage_norm.cols, nc),
        ("caps.min_storage_equipment_ratio", caps.min_storage_equipment_ratio.rows, nf, caps.min_storage_equipment_ratio.cols, ne),
        ("caps.existing_equipment", caps.existing_equipment.rows, ni, caps.existing_equipment.cols, ne),
        ("caps.existing_storage", caps.existing_storage.rows, ni, caps.existing_storage.cols, nf),
    ];
    for (name, r, er, c, ec) in dims {
        if r != er || c != ec {
            push(
                &mut out,
                name,
                String::new(),
                format!("shape {r}x{c} does not match declared sets {er}x{ec}"),
            );
        }
    }
    if caps.port_rail.len() != ni {
        push(&mut out, "caps.port_rail", String::new(), "one rail flag per port required".into());
    }
    if caps.county_rail.len() != nj {
        push(&mut out, "caps.county_rail", String::new(), "one rail flag per county required".into());
    }
    if costs.equipment_cost.len() != ne || caps.equip_capacity.len() != ne {
        push(&mut out, "costs.equipment_cost", String::new(), "one cost and capacity per equipment kind".into());
    }
    if costs.storage_cost.len() != nf || caps.storage_capacity.len() != nf {
        push(&mut out, "costs.storage_cost", String::new(), "one cost and capacity per storage kind".into());
    }
    if costs.holding_cost.len() != nc {
        push(&mut out, "costs.holding_cost", String::new(), "one holding cost per commodity".into());
    }

    out
}

/// Default shortage penalty: ten times the largest finite landside rate, so
/// shortage is strictly dominated whenever any route exists.
pub fn default_shortage_penalty(county_truck: &Matrix, county_rail: &Matrix) -> f64 {
    let mut max = 0.0f64;
    for &v in county_truck.data.iter().chain(county_rail.data.iter()) {
        if v.is_finite() {
            max = max.max(v);
        }
    }
    if max == 0.0 {
        1.0
    } else {
        10.0 * max
    }
}

/// Expand a fixed-plus-per-ton-mile rail rate into a per-ton arc cost;
/// non-arcs (missing distance) become INF.
pub fn rail_arc_cost(fixed_per_ton: f64, per_ton_mile: f64, miles: f64) -> f64 {
    if miles.is_finite() {
        fixed_per_ton + per_ton_mile * miles
    } else {
        INF
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_instance, GeneratorConfig};

    fn tiny() -> Instance {
        generate_instance(&GeneratorConfig {
            num_ports: 2,
            num_counties: 3,
            num_commodities: 1,
            num_periods: 2,
            num_scenarios: 2,
            seed: 1,
            ..GeneratorConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn generated_instance_validates_clean() {
        assert!(validate_instance(&tiny()).is_empty());
    }

    #[test]
    fn probability_sum_violation_detected() {
        let mut inst = tiny();
        inst.scenarios[0].probability = 0.5;
        inst.scenarios[1].probability = 0.4;
        let v = validate_instance(&inst);
        assert!(v.iter().any(|v| v.field == "scenarios.probability" && v.rule.contains("0.9")));
    }

    #[test]
    fn balanced_probabilities_pass() {
        let mut inst = tiny();
        inst.scenarios[0].probability = 0.5;
        inst.scenarios[1].probability = 0.5;
        let v = validate_instance(&inst);
        assert!(!v.iter().any(|v| v.field == "scenarios.probability"));
    }

    #[test]
    fn investment_cost_is_linear_and_priced() {
        let inst = tiny();
        let zero = InvestmentPlan::zero(&inst);
        assert_eq!(investment_cost(&zero, &inst.costs).unwrap(), 0.0);

        let mut one = InvestmentPlan::zero(&inst);
        one.new_equipment.set(0, 0, 1);
        let c1 = investment_cost(&one, &inst.costs).unwrap();
        assert!((c1 - inst.costs.equipment_cost[0]).abs() < 1e-9);

        let mut two = one.clone();
        two.new_equipment.set(1, 0, 1);
        two.new_storage.set(0, 0, 3);
        let c2 = investment_cost(&two, &inst.costs).unwrap();
        let expected = 2.0 * inst.costs.equipment_cost[0] + 3.0 * inst.costs.storage_cost[0];
        assert!((c2 - expected).abs() < 1e-9);
    }

    #[test]
    fn table_priced_plan() {
        let inst = tiny();
        let mut costs = inst.costs.clone();
        costs.equipment_cost[0] = 300_000.0; // crane
        let mut plan = InvestmentPlan::zero(&inst);
        plan.new_equipment.set(0, 0, 1);
        assert_eq!(investment_cost(&plan, &costs).unwrap(), 300_000.0);
        // 2 conveyors + 1 forklift at published unit prices.
        assert_eq!(2.0 * 18_723.0 + 96_738.0, 134_184.0);
    }

    #[test]
    fn rail_arc_needs_both_flags() {
        assert!(allowed_rail_arc(true, true));
        assert!(!allowed_rail_arc(false, true));
        assert!(!allowed_rail_arc(true, false));
        let mut inst = tiny();
        inst.caps.county_rail[0] = true;
        inst.caps.county_rail[1] = false;
        assert!(!inst.rail_arc_allowed_county(0, 1));
    }

    #[test]
    fn validation_is_pure() {
        let inst = tiny();
        let a = validate_instance(&inst);
        let b = validate_instance(&inst);
        assert_eq!(a, b);
    }
}
