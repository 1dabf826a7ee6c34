//! Load the bundled river-system dataset, inspect it, and solve at the
//! default budget.
//!
//! Run with: cargo run --release --example bundled_dataset

use portopt::analysis::{expected_flow_report, MODES};
use portopt::benders::{solve, Acceleration, BendersOptions};
use portopt::io::load_instance;
use std::path::Path;

fn main() -> Result<(), portopt::Error> {
    let inst = load_instance(Path::new("data/mkarns"))?;
    println!(
        "{} ports / {} counties / {} commodities / {} periods / {} scenarios",
        inst.num_ports(),
        inst.num_counties(),
        inst.num_commodities(),
        inst.num_periods(),
        inst.num_scenarios()
    );
    println!("budget {:.0}", inst.costs.budget);

    let opts = BendersOptions {
        acceleration: Acceleration::KnapsackPareto,
        epsilon: 0.01,
        ..BendersOptions::default()
    };
    let res = solve(&inst, &opts)?;
    println!(
        "total expected cost {:.0} (gap {:.4}, {} iterations)",
        res.objective, res.gap, res.iterations
    );
    for i in 0..inst.num_ports() {
        for e in 0..inst.num_equipment() {
            let n = res.plan.new_equipment.at(i, e);
            if n > 0 {
                println!("  buy {n} x {} at {}", inst.sets.equipment_kinds[e], inst.sets.ports[i]);
            }
        }
        for f in 0..inst.num_storage() {
            let n = res.plan.new_storage.at(i, f);
            if n > 0 {
                println!("  build {n} x {} at {}", inst.sets.storage_kinds[f], inst.sets.ports[i]);
            }
        }
    }
    let report = expected_flow_report(&inst, &res.recourse)?;
    for mode in MODES {
        println!(
            "  {:<6} {:>14.0} tons {:>16.0} ton-miles",
            mode.name(),
            report.total_tons(mode),
            report.total_ton_miles(mode)
        );
    }
    println!(
        "  shortage {:.0} tons, delivered {:.0} tons",
        report.shortage_tons.iter().sum::<f64>(),
        report.delivered_tons.iter().sum::<f64>()
    );
    Ok(())
}
