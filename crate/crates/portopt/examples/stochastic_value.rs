//! Measure what solving the stochastic program is worth: the value of the
//! stochastic solution (VSS) against a mean-demand plan, and the expected
//! value of perfect information (EVPI) against clairvoyant planning.
//!
//! Run with: cargo run --release --example stochastic_value

use portopt::analysis::stochastic_values;
use portopt::benders::{Acceleration, BendersOptions};
use portopt::generate::{generate_instance, GeneratorConfig};

fn main() -> Result<(), portopt::Error> {
    let cfg = GeneratorConfig {
        num_ports: 4,
        num_counties: 6,
        num_scenarios: 5,
        demand_spread: 0.5,
        budget: 2_000_000.0,
        seed: 19,
        ..GeneratorConfig::default()
    };
    let inst = generate_instance(&cfg)?;
    let opts = BendersOptions {
        acceleration: Acceleration::KnapsackPareto,
        epsilon: 1e-5,
        ..BendersOptions::default()
    };
    let rep = stochastic_values(&inst, &opts)?;
    println!("stochastic optimum (SP)        {:>14.2}", rep.sp);
    println!("mean-value plan cost (EEV)     {:>14.2}", rep.eev);
    println!("value of stochastic solution   {:>14.2}", rep.vss);
    println!("expected wait-and-see optimum  {:>14.2}", rep.expected_ws);
    println!("expected value of perfect info {:>14.2}", rep.evpi);
    for (s, ws) in rep.wait_and_see.iter().enumerate() {
        println!("  scenario {}: wait-and-see {:.2}", inst.sets.scenarios[s], ws);
    }
    Ok(())
}
