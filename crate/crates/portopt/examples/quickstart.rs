//! Generate a small synthetic instance, solve it, and print the plan.
//!
//! Run with: cargo run --release --example quickstart

use portopt::benders::{solve, Acceleration, BendersOptions};
use portopt::generate::{generate_instance, GeneratorConfig};
use portopt::model::investment_cost;

fn main() -> Result<(), portopt::Error> {
    let cfg = GeneratorConfig {
        num_ports: 6,
        num_counties: 6,
        num_scenarios: 5,
        budget: 2_000_000.0,
        seed: 7,
        ..GeneratorConfig::default()
    };
    let inst = generate_instance(&cfg)?;
    println!(
        "instance: {} ports, {} counties, {} commodities, {} periods, {} scenarios",
        inst.num_ports(),
        inst.num_counties(),
        inst.num_commodities(),
        inst.num_periods(),
        inst.num_scenarios()
    );

    let opts = BendersOptions {
        acceleration: Acceleration::KnapsackPareto,
        epsilon: 1e-4,
        ..BendersOptions::default()
    };
    let res = solve(&inst, &opts)?;

    println!(
        "solved in {} iterations: total cost {:.0} (gap {:.2e}, {:?})",
        res.iterations, res.objective, res.gap, res.reason
    );
    println!(
        "investment {:.0} within budget {:.0}",
        investment_cost(&res.plan, &inst.costs)?,
        inst.costs.budget
    );
    for i in 0..inst.num_ports() {
        for e in 0..inst.num_equipment() {
            let n = res.plan.new_equipment.at(i, e);
            if n > 0 {
                println!(
                    "  buy {n} x {} at {}",
                    inst.sets.equipment_kinds[e], inst.sets.ports[i]
                );
            }
        }
        for f in 0..inst.num_storage() {
            let n = res.plan.new_storage.at(i, f);
            if n > 0 {
                println!(
                    "  build {n} x {} at {}",
                    inst.sets.storage_kinds[f], inst.sets.ports[i]
                );
            }
        }
    }
    if res.plan.is_zero() {
        println!("  (no investment pays off at this budget)");
    }
    for (s, cost) in res.scenario_costs.iter().enumerate() {
        println!("  scenario {}: recourse cost {:.0}", inst.sets.scenarios[s], cost);
    }
    Ok(())
}
