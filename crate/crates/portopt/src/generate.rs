//! Seeded synthetic instance generator. Nodes are scattered on a plane,
//! arc rates follow published per-ton-mile tariffs, and demand scenarios
//! scale a base profile by a random factor. The same seed and config
//! always produce the identical instance.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::lp::INF;
use crate::model::{
    default_shortage_penalty, rail_arc_cost, CapacityParameters, CostParameters, CountMatrix,
    DistanceTable, IndexSets, Instance, Matrix, ScenarioData,
};

/// Per-ton-mile truck tariff.
pub const TRUCK_RATE_PER_TON_MILE: f64 = 0.185;
/// Fixed per-ton rail charge plus the per-ton-mile component.
pub const RAIL_FIXED_PER_TON: f64 = 22.65;
pub const RAIL_RATE_PER_TON_MILE: f64 = 0.033;
/// Per-ton-mile barge tariff; waterway mileage is straight-line times 1.3.
pub const BARGE_RATE_PER_TON_MILE: f64 = 0.0089;

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    /// Total port count; the first half originate, the rest receive.
    pub num_ports: usize,
    /// Total county count; the first half supply, the rest demand.
    pub num_counties: usize,
    pub num_commodities: usize,
    pub num_periods: usize,
    pub num_scenarios: usize,
    pub num_equipment_kinds: usize,
    pub num_storage_kinds: usize,
    pub budget: f64,
    /// Half-width of the multiplicative demand spread across scenarios.
    pub demand_spread: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            num_ports: 4,
            num_counties: 6,
            num_commodities: 2,
            num_periods: 3,
            num_scenarios: 3,
            num_equipment_kinds: 2,
            num_storage_kinds: 2,
            budget: 1_000_000.0,
            demand_spread: 0.4,
            seed: 42,
        }
    }
}

pub fn generate_instance(cfg: &GeneratorConfig) -> Result<Instance, Error> {
    if cfg.num_ports < 2 || cfg.num_counties < 2 {
        return Err(Error::Config(
            "generator needs at least 2 ports and 2 counties".into(),
        ));
    }
    if cfg.num_commodities == 0
        || cfg.num_periods == 0
        || cfg.num_scenarios == 0
        || cfg.num_equipment_kinds == 0
        || cfg.num_storage_kinds == 0
    {
        return Err(Error::Config("generator set sizes must be positive".into()));
    }
    if !(0.0..1.0).contains(&cfg.demand_spread) {
        return Err(Error::Config("demand_spread must be in [0,1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let ni = cfg.num_ports;
    let nj = cfg.num_counties;
    let nc = cfg.num_commodities;
    let np = cfg.num_periods;
    let ne = cfg.num_equipment_kinds;
    let nf = cfg.num_storage_kinds;

    let ports: Vec<String> = (1..=ni).map(|k| format!("port{k}")).collect();
    let counties: Vec<String> = (1..=nj).map(|k| format!("county{k}")).collect();
    let split_i = ni / 2;
    let split_j = nj / 2;
    let sets = IndexSets {
        origin_ports: ports[..split_i].to_vec(),
        destination_ports: ports[split_i..].to_vec(),
        origin_counties: counties[..split_j].to_vec(),
        destination_counties: counties[split_j..].to_vec(),
        ports,
        counties,
        commodities: (1..=nc).map(|k| format!("commodity{k}")).collect(),
        equipment_kinds: (1..=ne).map(|k| format!("equip{k}")).collect(),
        storage_kinds: (1..=nf).map(|k| format!("storage{k}")).collect(),
        periods: (1..=np as u32).collect(),
        scenarios: (1..=cfg.num_scenarios).map(|k| format!("s{k}")).collect(),
    };

    // Scatter nodes over a 400 x 400 mile region; origin-side nodes on the
    // left band, destination-side on the right so flows travel somewhere.
    let mut port_xy = Vec::with_capacity(ni);
    for i in 0..ni {
        let x = if i < split_i {
            rng.gen_range(0.0f64..120.0)
        } else {
            rng.gen_range(280.0f64..400.0)
        };
        port_xy.push((x, rng.gen_range(0.0f64..400.0)));
    }
    let mut county_xy = Vec::with_capacity(nj);
    for j in 0..nj {
        let x = if j < split_j {
            rng.gen_range(0.0f64..120.0)
        } else {
            rng.gen_range(280.0f64..400.0)
        };
        county_xy.push((x, rng.gen_range(0.0f64..400.0)));
    }
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();

    let mut county_port = Matrix::new(nj, ni, 0.0);
    for j in 0..nj {
        for i in 0..ni {
            county_port.set(j, i, dist(county_xy[j], port_xy[i]).max(1.0));
        }
    }
    let mut port_port = Matrix::new(ni, ni, 0.0);
    for i in 0..ni {
        for k in 0..ni {
            if i != k {
                port_port.set(i, k, (1.3 * dist(port_xy[i], port_xy[k])).max(1.0));
            }
        }
    }
    let mut county_county = Matrix::new(nj, nj, 0.0);
    for j in 0..nj {
        for m in 0..nj {
            if j != m {
                county_county.set(j, m, dist(county_xy[j], county_xy[m]).max(1.0));
            }
        }
    }

    let port_rail: Vec<bool> = (0..ni).map(|_| rng.gen_bool(0.7)).collect();
    let county_rail: Vec<bool> = (0..nj).map(|_| rng.gen_bool(0.7)).collect();

    let mut truck_port_rate = Matrix::new(nj, ni, 0.0);
    let mut rail_port_rate = Matrix::new(nj, ni, INF);
    for j in 0..nj {
        for i in 0..ni {
            let d = county_port.at(j, i);
            truck_port_rate.set(j, i, TRUCK_RATE_PER_TON_MILE * d);
            if county_rail[j] && port_rail[i] {
                rail_port_rate.set(j, i, rail_arc_cost(RAIL_FIXED_PER_TON, RAIL_RATE_PER_TON_MILE, d));
            }
        }
    }
    let mut barge_rate = Matrix::new(ni, ni, INF);
    for i in 0..split_i {
        for k in split_i..ni {
            barge_rate.set(i, k, BARGE_RATE_PER_TON_MILE * port_port.at(i, k));
        }
    }
    let mut county_truck_rate = Matrix::new(nj, nj, INF);
    let mut county_rail_rate = Matrix::new(nj, nj, INF);
    for j in 0..split_j {
        for m in split_j..nj {
            let d = county_county.at(j, m);
            county_truck_rate.set(j, m, TRUCK_RATE_PER_TON_MILE * d);
            if county_rail[j] && county_rail[m] {
                county_rail_rate.set(j, m, rail_arc_cost(RAIL_FIXED_PER_TON, RAIL_RATE_PER_TON_MILE, d));
            }
        }
    }

    let equipment_cost: Vec<f64> = (0..ne).map(|_| rng.gen_range(15_000.0f64..320_000.0)).collect();
    let storage_cost: Vec<f64> = (0..nf).map(|_| rng.gen_range(200_000.0f64..1_200_000.0)).collect();
    let holding_cost: Vec<f64> = (0..nc).map(|_| rng.gen_range(1.0f64..5.0)).collect();
    let shortage_penalty = default_shortage_penalty(&county_truck_rate, &county_rail_rate);

    // Every kind handles every commodity at unit norm so any generated
    // instance has complete recourse through any equipped port.
    let equip_compat = Matrix::new(ne, nc, 1.0);
    let storage_compat = Matrix::new(nf, nc, 1.0);
    let processing_norm = Matrix::new(ne, nc, 1.0);
    let storage_norm = Matrix::new(nf, nc, 1.0);
    let min_storage_equipment_ratio = Matrix::new(nf, ne, 0.0);
    let equip_capacity: Vec<f64> = (0..ne).map(|_| rng.gen_range(2_000.0f64..8_000.0).round()).collect();
    let storage_capacity: Vec<f64> = (0..nf).map(|_| rng.gen_range(1_000.0f64..4_000.0).round()).collect();
    let mut existing_equipment = CountMatrix::new(ni, ne);
    let mut existing_storage = CountMatrix::new(ni, nf);
    for i in 0..ni {
        for e in 0..ne {
            existing_equipment.set(i, e, rng.gen_range(0..4));
        }
        for f in 0..nf {
            existing_storage.set(i, f, rng.gen_range(0..4));
        }
    }

    // Base tonnage profile, then one multiplicative factor per scenario.
    let num_origin_counties = split_j;
    let num_dest_counties = nj - split_j;
    let base_supply: Vec<f64> = (0..num_origin_counties * nc * np)
        .map(|_| rng.gen_range(500.0f64..3_000.0).round())
        .collect();
    let total_supply_per_cp: f64 = base_supply.iter().sum::<f64>() / (nc * np) as f64;
    let base_demand: Vec<f64> = (0..num_dest_counties * nc * np)
        .map(|_| {
            let cap = 0.8 * total_supply_per_cp / num_dest_counties as f64;
            rng.gen_range(0.3 * cap..cap).round()
        })
        .collect();
    let prob = 1.0 / cfg.num_scenarios as f64;
    let scenarios: Vec<ScenarioData> = (0..cfg.num_scenarios)
        .map(|_| {
            let factor = rng.gen_range(1.0 - cfg.demand_spread..1.0 + cfg.demand_spread);
            ScenarioData {
                probability: prob,
                supply: base_supply.iter().map(|v| (v * factor).round()).collect(),
                demand: base_demand.iter().map(|v| (v * factor).round()).collect(),
            }
        })
        .collect();

    Instance::new(
        sets,
        CostParameters {
            equipment_cost,
            storage_cost,
            truck_port_rate,
            rail_port_rate,
            barge_rate,
            county_truck_rate,
            county_rail_rate,
            holding_cost,
            shortage_penalty,
            budget: cfg.budget,
        },
        CapacityParameters {
            equip_compat,
            storage_compat,
            port_rail,
            county_rail,
            min_storage_equipment_ratio,
            processing_norm,
            storage_norm,
            equip_capacity,
            storage_capacity,
            existing_equipment,
            existing_storage,
        },
        DistanceTable {
            county_port,
            port_port,
            county_county,
        },
        scenarios,
    )
}
