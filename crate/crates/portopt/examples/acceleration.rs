//! Compare plain multi-cut Benders against the knapsack and Pareto-cut
//! accelerated variants on the same instance.
//!
//! Run with: cargo run --release --example acceleration

use portopt::benders::{solve, Acceleration, BendersOptions};
use portopt::generate::{generate_instance, GeneratorConfig};

fn main() -> Result<(), portopt::Error> {
    let cfg = GeneratorConfig {
        num_ports: 6,
        num_counties: 8,
        num_scenarios: 6,
        budget: 3_000_000.0,
        seed: 11,
        ..GeneratorConfig::default()
    };
    let inst = generate_instance(&cfg)?;

    println!("{:<18} {:>10} {:>16} {:>10}", "variant", "iterations", "objective", "gap");
    for (name, accel) in [
        ("plain", Acceleration::None),
        ("knapsack", Acceleration::Knapsack),
        ("knapsack+pareto", Acceleration::KnapsackPareto),
    ] {
        let opts = BendersOptions {
            acceleration: accel,
            epsilon: 1e-5,
            ..BendersOptions::default()
        };
        let res = solve(&inst, &opts)?;
        println!(
            "{:<18} {:>10} {:>16.2} {:>10.2e}",
            name, res.iterations, res.objective, res.gap
        );
    }
    Ok(())
}
