//! Sweep the first-stage budget and watch the modal split shift toward
//! the waterway as investment capital loosens.
//!
//! Run with: cargo run --release --example budget_sweep

use portopt::analysis::{budget_sweep, sweep_to_csv, Mode};
use portopt::benders::{Acceleration, BendersOptions};
use portopt::generate::{generate_instance, GeneratorConfig};

fn main() -> Result<(), portopt::Error> {
    let cfg = GeneratorConfig {
        num_ports: 6,
        num_counties: 6,
        num_scenarios: 5,
        seed: 3,
        ..GeneratorConfig::default()
    };
    let inst = generate_instance(&cfg)?;
    let budgets = [0.0, 1_000_000.0, 2_000_000.0, 4_000_000.0];
    let opts = BendersOptions {
        acceleration: Acceleration::KnapsackPareto,
        ..BendersOptions::default()
    };
    let points = budget_sweep(&inst, &budgets, &opts)?;
    for p in &points {
        println!(
            "budget {:>10.0}: total cost {:>14.2}, invested {:>10.0}, barge ton-miles {:>14.0}",
            p.budget,
            p.objective,
            p.investment,
            p.report.total_ton_miles(Mode::Barge)
        );
    }
    println!("\nCSV:\n{}", sweep_to_csv(&points));
    Ok(())
}
