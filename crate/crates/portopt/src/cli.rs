//! Command-line surface. `run_cli` parses flags, dispatches to the solver
//! or analysis routines, writes a JSON summary plus report CSVs to the
//! output directory, and returns a process exit code: 0 converged to the
//! gap, 2 stopped on an iteration/time/node limit, 1 error.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::json;

use crate::analysis::{budget_sweep, expected_flow_report, stochastic_values, sweep_to_csv, Mode};
use crate::benders::{solve, trace_to_csv, Acceleration, BendersOptions, TerminationReason};
use crate::builders::build_extensive_form;
use crate::error::Error;
use crate::generate::{generate_instance, GeneratorConfig};
use crate::io::{load_instance, save_instance};
use crate::milp::{solve_milp, MilpOptions, MilpStatus};
use crate::model::{investment_cost, Instance, InvestmentPlan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RunMode {
    /// Decomposition solve at one budget.
    Solve,
    /// Re-solve across a list of budgets.
    Sweep,
    /// Value of the stochastic solution (also reports EVPI).
    Vss,
    /// Expected value of perfect information (also reports VSS).
    Evpi,
    /// Exact extensive-form solve for cross-checking.
    Oracle,
    /// Write a synthetic instance to --out.
    Generate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AccelArg {
    None,
    Knapsack,
    Pareto,
}

impl From<AccelArg> for Acceleration {
    fn from(a: AccelArg) -> Self {
        match a {
            AccelArg::None => Acceleration::None,
            AccelArg::Knapsack => Acceleration::Knapsack,
            AccelArg::Pareto => Acceleration::KnapsackPareto,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "portopt", about = "Two-stage port investment planning under demand uncertainty", disable_help_flag = false)]
struct Args {
    /// Directory holding the instance CSV files.
    #[arg(long)]
    instance: Option<PathBuf>,

    #[arg(long, value_enum)]
    mode: RunMode,

    /// Override the instance budget (solve/oracle/vss/evpi).
    #[arg(long)]
    budget: Option<f64>,

    /// Comma-separated budget list for --mode sweep.
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<f64>>,

    /// Relative optimality gap.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,

    #[arg(long = "max-iters", default_value_t = 500)]
    max_iters: usize,

    /// Wall-clock limit in seconds.
    #[arg(long = "time-limit", default_value_t = 12_600.0)]
    time_limit: f64,

    #[arg(long, value_enum, default_value_t = AccelArg::None)]
    accel: AccelArg,

    /// Random seed (generate mode).
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Output directory for summary JSON, report CSVs, and the trace.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Print per-iteration trace lines.
    #[arg(long, default_value_t = false)]
    verbose: bool,

    // Generator size parameters.
    #[arg(long, default_value_t = 4)]
    ports: usize,
    #[arg(long, default_value_t = 6)]
    counties: usize,
    #[arg(long, default_value_t = 2)]
    commodities: usize,
    #[arg(long, default_value_t = 3)]
    periods: usize,
    #[arg(long, default_value_t = 3)]
    scenarios: usize,
    #[arg(long = "equipment-kinds", default_value_t = 2)]
    equipment_kinds: usize,
    #[arg(long = "storage-kinds", default_value_t = 2)]
    storage_kinds: usize,
}

/// Entry point used by the binary; takes the argument list without the
/// program name and returns the process exit code.
pub fn run_cli<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = std::iter::once("portopt".to_string()).chain(args.into_iter().map(Into::into));
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            // clap renders --help/--version as "errors" with success status.
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn benders_options(args: &Args) -> BendersOptions {
    BendersOptions {
        epsilon: args.epsilon,
        max_iterations: args.max_iters,
        time_limit_secs: args.time_limit,
        acceleration: args.accel.into(),
        ..BendersOptions::default()
    }
}

fn load(args: &Args) -> Result<Instance, Error> {
    let dir = args
        .instance
        .as_ref()
        .ok_or_else(|| Error::Config("--instance <dir> is required for this mode".into()))?;
    let mut inst = load_instance(dir)?;
    if let Some(b) = args.budget {
        if b < 0.0 {
            return Err(Error::Config(format!("budget must be >= 0, got {b}")));
        }
        inst.costs.budget = b;
    }
    Ok(inst)
}

fn write_file(out: &Option<PathBuf>, name: &str, body: &str) -> Result<(), Error> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
    }
    Ok(())
}

fn plan_to_csv(inst: &Instance, plan: &InvestmentPlan) -> String {
    let mut out = String::from("port,kind_type,kind,units\n");
    for i in 0..inst.num_ports() {
        for e in 0..inst.num_equipment() {
            let v = plan.new_equipment.at(i, e);
            if v > 0 {
                out.push_str(&format!(
                    "{},equipment,{},{}\n",
                    inst.sets.ports[i], inst.sets.equipment_kinds[e], v
                ));
            }
        }
        for f in 0..inst.num_storage() {
            let v = plan.new_storage.at(i, f);
            if v > 0 {
                out.push_str(&format!(
                    "{},storage,{},{}\n",
                    inst.sets.ports[i], inst.sets.storage_kinds[f], v
                ));
            }
        }
    }
    out
}

fn plan_json(inst: &Instance, plan: &InvestmentPlan) -> serde_json::Value {
    let mut items = Vec::new();
    for i in 0..inst.num_ports() {
        for e in 0..inst.num_equipment() {
            let v = plan.new_equipment.at(i, e);
            if v > 0 {
                items.push(json!({
                    "port": inst.sets.ports[i],
                    "kind_type": "equipment",
                    "kind": inst.sets.equipment_kinds[e],
                    "units": v,
                }));
            }
        }
        for f in 0..inst.num_storage() {
            let v = plan.new_storage.at(i, f);
            if v > 0 {
                items.push(json!({
                    "port": inst.sets.ports[i],
                    "kind_type": "storage",
                    "kind": inst.sets.storage_kinds[f],
                    "units": v,
                }));
            }
        }
    }
    json!(items)
}

fn dispatch(args: &Args) -> Result<i32, Error> {
    match args.mode {
        RunMode::Solve => {
            let inst = load(args)?;
            let opts = benders_options(args);
            let res = solve(&inst, &opts)?;
            if args.verbose {
                for r in &res.trace {
                    println!(
                        "{},{:.6},{:.6},{:.8},{:.3}",
                        r.iteration, r.lower_bound, r.upper_bound, r.gap, r.seconds
                    );
                }
            }
            let report = expected_flow_report(&inst, &res.recourse)?;
            let summary = json!({
                "mode": "solve",
                "objective": res.objective,
                "lower_bound": res.lower_bound,
                "gap": res.gap,
                "iterations": res.iterations,
                "termination": format!("{:?}", res.reason),
                "investment": investment_cost(&res.plan, &inst.costs)?,
                "budget": inst.costs.budget,
                "plan": plan_json(&inst, &res.plan),
                "scenario_costs": res.scenario_costs,
                "barge_ton_miles": report.total_ton_miles(Mode::Barge),
                "truck_ton_miles": report.total_ton_miles(Mode::Truck),
                "rail_ton_miles": report.total_ton_miles(Mode::Rail),
            });
            let pretty = serde_json::to_string_pretty(&summary).expect("json");
            println!("{pretty}");
            write_file(&args.out, "summary.json", &pretty)?;
            write_file(&args.out, "trace.csv", &trace_to_csv(&res.trace))?;
            write_file(&args.out, "flows.csv", &report.to_csv())?;
            write_file(&args.out, "plan.csv", &plan_to_csv(&inst, &res.plan))?;
            Ok(if res.reason == TerminationReason::GapReached {
                EXIT_OK
            } else {
                EXIT_LIMIT
            })
        }
        RunMode::Sweep => {
            let budgets = args.budgets.clone().ok_or_else(|| {
                Error::Config("--mode sweep requires --budgets <b1,b2,...>".into())
            })?;
            if budgets.is_empty() {
                return Err(Error::Config("--budgets list is empty".into()));
            }
            let inst = load(args)?;
            let opts = benders_options(args);
            let points = budget_sweep(&inst, &budgets, &opts)?;
            let csv = sweep_to_csv(&points);
            if args.verbose {
                print!("{csv}");
            }
            let summary = json!({
                "mode": "sweep",
                "points": points.iter().map(|p| json!({
                    "budget": p.budget,
                    "objective": p.objective,
                    "investment": p.investment,
                    "gap": p.gap,
                    "plan": plan_json(&inst, &p.plan),
                    "barge_ton_miles": p.report.total_ton_miles(Mode::Barge),
                })).collect::<Vec<_>>(),
            });
            let pretty = serde_json::to_string_pretty(&summary).expect("json");
            println!("{pretty}");
            write_file(&args.out, "summary.json", &pretty)?;
            write_file(&args.out, "sweep.csv", &csv)?;
            let converged = points.iter().all(|p| p.gap <= args.epsilon + 1e-12);
            Ok(if converged { EXIT_OK } else { EXIT_LIMIT })
        }
        RunMode::Vss | RunMode::Evpi => {
            let inst = load(args)?;
            let opts = benders_options(args);
            let report = stochastic_values(&inst, &opts)?;
            let summary = json!({
                "mode": if args.mode == RunMode::Vss { "vss" } else { "evpi" },
                "sp": report.sp,
                "eev": report.eev,
                "vss": report.vss,
                "expected_ws": report.expected_ws,
                "evpi": report.evpi,
                "wait_and_see": report.wait_and_see,
                "plan": plan_json(&inst, &report.plan),
            });
            let pretty = serde_json::to_string_pretty(&summary).expect("json");
            println!("{pretty}");
            write_file(&args.out, "summary.json", &pretty)?;
            Ok(EXIT_OK)
        }
        RunMode::Oracle => {
            let inst = load(args)?;
            let ef = build_extensive_form(&inst)?;
            let sol = solve_milp(&ef.mip, &MilpOptions::default())?;
            let summary = json!({
                "mode": "oracle",
                "objective": sol.objective,
                "best_bound": sol.best_bound,
                "status": format!("{:?}", sol.status),
                "nodes": sol.nodes,
            });
            let pretty = serde_json::to_string_pretty(&summary).expect("json");
            println!("{pretty}");
            write_file(&args.out, "summary.json", &pretty)?;
            Ok(match sol.status {
                MilpStatus::Optimal => EXIT_OK,
                MilpStatus::Infeasible => EXIT_ERROR,
                _ => EXIT_LIMIT,
            })
        }
        RunMode::Generate => {
            let out = args.out.as_ref().ok_or_else(|| {
                Error::Config("--mode generate requires --out <dir>".into())
            })?;
            let cfg = GeneratorConfig {
                num_ports: args.ports,
                num_counties: args.counties,
                num_commodities: args.commodities,
                num_periods: args.periods,
                num_scenarios: args.scenarios,
                num_equipment_kinds: args.equipment_kinds,
                num_storage_kinds: args.storage_kinds,
                budget: args.budget.unwrap_or(1_000_000.0),
                seed: args.seed,
                ..GeneratorConfig::default()
            };
            let inst = generate_instance(&cfg)?;
            save_instance(&inst, Path::new(out))?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "mode": "generate",
                    "out": out.display().to_string(),
                    "ports": args.ports,
                    "counties": args.counties,
                    "commodities": args.commodities,
                    "periods": args.periods,
                    "scenarios": args.scenarios,
                    "seed": args.seed,
                }))
                .expect("json")
            );
            Ok(EXIT_OK)
        }
    }
}
