//! Instance (de)serialization over a directory of six CSV files:
//! `nodes.csv`, `distances.csv`, `costs.csv`, `capacities.csv`,
//! `compat.csv`, `scenarios.csv`. `load_instance(save_instance(x)) == x`.
//!
//! Arc rates in `costs.csv` can be given either per arc (`truck_port_rate`,
//! `rail_port_rate`, `barge_rate`, `county_truck_rate`, `county_rail_rate`
//! rows) or as fleet tariffs (`truck_rate_per_ton_mile`,
//! `rail_fixed_per_ton` + `rail_rate_per_ton_mile`,
//! `barge_rate_per_ton_mile`) which are expanded against `distances.csv`
//! at load time. Explicit per-arc rows override tariff-derived values.

use std::collections::HashMap;
use std::path::Path;

use crate::error::Error;
use crate::lp::INF;
use crate::model::{
    CapacityParameters, CostParameters, CountMatrix, DistanceTable, IndexSets, Instance, Matrix,
    ScenarioData,
};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(file: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.display().to_string(),
        line,
        message: message.into(),
    }
}

struct CsvFile {
    path: std::path::PathBuf,
    /// (1-based data line number, fields).
    records: Vec<(usize, Vec<String>)>,
    headers: Vec<String>,
}

fn read_csv(dir: &Path, name: &str) -> Result<CsvFile, Error> {
    let path = dir.join(name);
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(&path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => io_err(
                &path,
                std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()),
            ),
            _ => parse_err(&path, 0, e.to_string()),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(&path, 1, e.to_string()))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut records = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let line = k + 2; // header is line 1
        let rec = rec.map_err(|e| parse_err(&path, line, e.to_string()))?;
        records.push((line, rec.iter().map(|s| s.to_string()).collect()));
    }
    Ok(CsvFile {
        path,
        records,
        headers,
    })
}

fn expect_headers(file: &CsvFile, expected: &[&str]) -> Result<(), Error> {
    if file.headers != expected {
        return Err(parse_err(
            &file.path,
            1,
            format!("expected header {:?}, found {:?}", expected, file.headers),
        ));
    }
    Ok(())
}

fn num(file: &CsvFile, line: usize, s: &str, what: &str) -> Result<f64, Error> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(INF);
    }
    s.parse::<f64>()
        .map_err(|_| parse_err(&file.path, line, format!("{what}: cannot parse number {s:?}")))
}

pub fn load_instance(dir: &Path) -> Result<Instance, Error> {
    // --- nodes.csv ------------------------------------------------------
    let nodes = read_csv(dir, "nodes.csv")?;
    expect_headers(&nodes, &["id", "kind", "role", "rail"])?;
    let mut ports = Vec::new();
    let mut counties = Vec::new();
    let mut origin_ports = Vec::new();
    let mut destination_ports = Vec::new();
    let mut origin_counties = Vec::new();
    let mut destination_counties = Vec::new();
    let mut port_rail = Vec::new();
    let mut county_rail = Vec::new();
    for (line, rec) in &nodes.records {
        let [id, kind, role, rail] = rec.as_slice() else {
            return Err(parse_err(&nodes.path, *line, "expected 4 fields"));
        };
        let rail = match rail.as_str() {
            "0" => false,
            "1" => true,
            other => {
                return Err(parse_err(
                    &nodes.path,
                    *line,
                    format!("rail must be 0 or 1, found {other:?}"),
                ))
            }
        };
        let (origin, dest) = match role.as_str() {
            "origin" => (true, false),
            "destination" => (false, true),
            "both" => (true, true),
            other => {
                return Err(parse_err(
                    &nodes.path,
                    *line,
                    format!("role must be origin|destination|both, found {other:?}"),
                ))
            }
        };
        match kind.as_str() {
            "port" => {
                if origin {
                    origin_ports.push(id.clone());
                }
                if dest {
                    destination_ports.push(id.clone());
                }
                ports.push(id.clone());
                port_rail.push(rail);
            }
            "county" => {
                if origin {
                    origin_counties.push(id.clone());
                }
                if dest {
                    destination_counties.push(id.clone());
                }
                counties.push(id.clone());
                county_rail.push(rail);
            }
            other => {
                return Err(parse_err(
                    &nodes.path,
                    *line,
                    format!("kind must be port|county, found {other:?}"),
                ))
            }
        }
    }
    let ni = ports.len();
    let nj = counties.len();
    let port_idx: HashMap<&str, usize> =
        ports.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
    let county_idx: HashMap<&str, usize> =
        counties.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();

    // --- compat.csv (defines commodity / kind orders) --------------------
    let compat = read_csv(dir, "compat.csv")?;
    expect_headers(&compat, &["kind_type", "kind", "commodity", "norm"])?;
    let mut commodities: Vec<String> = Vec::new();
    let mut equipment_kinds: Vec<String> = Vec::new();
    let mut storage_kinds: Vec<String> = Vec::new();
    let mut compat_rows: Vec<(usize, bool, String, String, f64)> = Vec::new();
    for (line, rec) in &compat.records {
        let [kind_type, kind, commodity, norm] = rec.as_slice() else {
            return Err(parse_err(&compat.path, *line, "expected 4 fields"));
        };
        let is_equipment = match kind_type.as_str() {
            "equipment" => true,
            "storage" => false,
            other => {
                return Err(parse_err(
                    &compat.path,
                    *line,
                    format!("kind_type must be equipment|storage, found {other:?}"),
                ))
            }
        };
        if !commodities.contains(commodity) {
            commodities.push(commodity.clone());
        }
        let list = if is_equipment {
            &mut equipment_kinds
        } else {
            &mut storage_kinds
        };
        if !list.contains(kind) {
            list.push(kind.clone());
        }
        let norm = num(&compat, *line, norm, "norm")?;
        compat_rows.push((*line, is_equipment, kind.clone(), commodity.clone(), norm));
    }
    let nc = commodities.len();
    let ne = equipment_kinds.len();
    let nf = storage_kinds.len();
    let com_idx: HashMap<&str, usize> = commodities
        .iter()
        .enumerate()
        .map(|(k, s)| (s.as_str(), k))
        .collect();
    let eq_idx: HashMap<&str, usize> = equipment_kinds
        .iter()
        .enumerate()
        .map(|(k, s)| (s.as_str(), k))
        .collect();
    let st_idx: HashMap<&str, usize> = storage_kinds
        .iter()
        .enumerate()
        .map(|(k, s)| (s.as_str(), k))
        .collect();
    let mut equip_compat = Matrix::new(ne, nc, 0.0);
    let mut storage_compat = Matrix::new(nf, nc, 0.0);
    let mut processing_norm = Matrix::new(ne, nc, 0.0);
    let mut storage_norm = Matrix::new(nf, nc, 0.0);
    for (_line, is_equipment, kind, commodity, norm) in &compat_rows {
        let c = com_idx[commodity.as_str()];
        if *is_equipment {
            let e = eq_idx[kind.as_str()];
            processing_norm.set(e, c, *norm);
            equip_compat.set(e, c, if *norm > 0.0 { 1.0 } else { 0.0 });
        } else {
            let f = st_idx[kind.as_str()];
            storage_norm.set(f, c, *norm);
            storage_compat.set(f, c, if *norm > 0.0 { 1.0 } else { 0.0 });
        }
    }

    // --- distances.csv ----------------------------------------------------
    let dists = read_csv(dir, "distances.csv")?;
    expect_headers(&dists, &["from", "to", "miles"])?;
    let mut county_port = Matrix::new(nj, ni, 0.0);
    let mut port_port = Matrix::new(ni, ni, 0.0);
    let mut county_county = Matrix::new(nj, nj, 0.0);
    for (line, rec) in &dists.records {
        let [from, to, miles] = rec.as_slice() else {
            return Err(parse_err(&dists.path, *line, "expected 3 fields"));
        };
        let miles = num(&dists, *line, miles, "miles")?;
        match (
            county_idx.get(from.as_str()),
            port_idx.get(from.as_str()),
            county_idx.get(to.as_str()),
            port_idx.get(to.as_str()),
        ) {
            (Some(&j), _, _, Some(&i)) => county_port.set(j, i, miles),
            (_, Some(&i), _, Some(&k)) => port_port.set(i, k, miles),
            (Some(&j), _, Some(&m), _) => county_county.set(j, m, miles),
            _ => {
                return Err(parse_err(
                    &dists.path,
                    *line,
                    format!("unknown or unsupported arc {from:?} -> {to:?}"),
                ))
            }
        }
    }

    // --- costs.csv --------------------------------------------------------
    let costs_file = read_csv(dir, "costs.csv")?;
    expect_headers(&costs_file, &["item", "key1", "key2", "value"])?;
    let mut equipment_cost = vec![f64::NAN; ne];
    let mut storage_cost = vec![f64::NAN; nf];
    let mut holding_cost = vec![f64::NAN; nc];
    let mut shortage_penalty = f64::NAN;
    let mut budget = f64::NAN;
    let mut truck_tariff = None;
    let mut rail_fixed = None;
    let mut rail_tariff = None;
    let mut barge_tariff = None;
    let mut arc_rows: Vec<(usize, String, String, String, f64)> = Vec::new();
    for (line, rec) in &costs_file.records {
        let [item, key1, key2, value] = rec.as_slice() else {
            return Err(parse_err(&costs_file.path, *line, "expected 4 fields"));
        };
        let v = num(&costs_file, *line, value, item)?;
        let lookup = |map: &HashMap<&str, usize>, key: &str, what: &str| {
            map.get(key).copied().ok_or_else(|| {
                parse_err(&costs_file.path, *line, format!("unknown {what} {key:?}"))
            })
        };
        match item.as_str() {
            "equipment_cost" => equipment_cost[lookup(&eq_idx, key1, "equipment kind")?] = v,
            "storage_cost" => storage_cost[lookup(&st_idx, key1, "storage kind")?] = v,
            "holding_cost" => holding_cost[lookup(&com_idx, key1, "commodity")?] = v,
            "shortage_penalty" => shortage_penalty = v,
            "budget" => budget = v,
            "truck_rate_per_ton_mile" => truck_tariff = Some(v),
            "rail_fixed_per_ton" => rail_fixed = Some(v),
            "rail_rate_per_ton_mile" => rail_tariff = Some(v),
            "barge_rate_per_ton_mile" => barge_tariff = Some(v),
            "truck_port_rate" | "rail_port_rate" | "barge_rate" | "county_truck_rate"
            | "county_rail_rate" => {
                arc_rows.push((*line, item.clone(), key1.clone(), key2.clone(), v))
            }
            other => {
                return Err(parse_err(
                    &costs_file.path,
                    *line,
                    format!("unknown cost item {other:?}"),
                ))
            }
        }
    }
    for (what, vals) in [
        ("equipment_cost", &equipment_cost),
        ("storage_cost", &storage_cost),
        ("holding_cost", &holding_cost),
    ] {
        if vals.iter().any(|v| v.is_nan()) {
            return Err(parse_err(
                &costs_file.path,
                0,
                format!("{what} missing for at least one declared kind"),
            ));
        }
    }
    if shortage_penalty.is_nan() || budget.is_nan() {
        return Err(parse_err(
            &costs_file.path,
            0,
            "shortage_penalty and budget are required",
        ));
    }

    // Tariff expansion against the distance table, then explicit overrides.
    let mut truck_port_rate = Matrix::new(nj, ni, INF);
    let mut rail_port_rate = Matrix::new(nj, ni, INF);
    let mut barge_rate = Matrix::new(ni, ni, INF);
    let mut county_truck_rate = Matrix::new(nj, nj, INF);
    let mut county_rail_rate = Matrix::new(nj, nj, INF);
    for j in 0..nj {
        for i in 0..ni {
            let d = county_port.at(j, i);
            if d > 0.0 {
                if let Some(t) = truck_tariff {
                    truck_port_rate.set(j, i, t * d);
                }
                if let (Some(fx), Some(t)) = (rail_fixed, rail_tariff) {
                    if county_rail[j] && port_rail[i] {
                        rail_port_rate.set(j, i, fx + t * d);
                    }
                }
            }
        }
    }
    for i in 0..ni {
        for k in 0..ni {
            let d = port_port.at(i, k);
            if i != k && d > 0.0 {
                if let Some(t) = barge_tariff {
                    barge_rate.set(i, k, t * d);
                }
            }
        }
    }
    for j in 0..nj {
        for m in 0..nj {
            let d = county_county.at(j, m);
            if j != m && d > 0.0 {
                if let Some(t) = truck_tariff {
                    county_truck_rate.set(j, m, t * d);
                }
                if let (Some(fx), Some(t)) = (rail_fixed, rail_tariff) {
                    if county_rail[j] && county_rail[m] {
                        county_rail_rate.set(j, m, fx + t * d);
                    }
                }
            }
        }
    }
    for (line, item, from, to, v) in arc_rows {
        let j = |key: &str| {
            county_idx.get(key).copied().ok_or_else(|| {
                parse_err(&costs_file.path, line, format!("unknown county {key:?}"))
            })
        };
        let p = |key: &str| {
            port_idx
                .get(key)
                .copied()
                .ok_or_else(|| parse_err(&costs_file.path, line, format!("unknown port {key:?}")))
        };
        match item.as_str() {
            "truck_port_rate" => truck_port_rate.set(j(&from)?, p(&to)?, v),
            "rail_port_rate" => rail_port_rate.set(j(&from)?, p(&to)?, v),
            "barge_rate" => barge_rate.set(p(&from)?, p(&to)?, v),
            "county_truck_rate" => county_truck_rate.set(j(&from)?, j(&to)?, v),
            "county_rail_rate" => county_rail_rate.set(j(&from)?, j(&to)?, v),
            _ => unreachable!(),
        }
    }

    // --- capacities.csv ---------------------------------------------------
    let caps_file = read_csv(dir, "capacities.csv")?;
    expect_headers(&caps_file, &["item", "key1", "key2", "value"])?;
    let mut equip_capacity = vec![f64::NAN; ne];
    let mut storage_capacity = vec![f64::NAN; nf];
    let mut existing_equipment = CountMatrix::new(ni, ne);
    let mut existing_storage = CountMatrix::new(ni, nf);
    let mut min_ratio = Matrix::new(nf, ne, 0.0);
    let mut num_periods = 0usize;
    for (line, rec) in &caps_file.records {
        let [item, key1, key2, value] = rec.as_slice() else {
            return Err(parse_err(&caps_file.path, *line, "expected 4 fields"));
        };
        let v = num(&caps_file, *line, value, item)?;
        let miss = |what: &str, key: &str| {
            parse_err(&caps_file.path, *line, format!("unknown {what} {key:?}"))
        };
        match item.as_str() {
            "num_periods" => num_periods = v as usize,
            "equip_capacity" => {
                equip_capacity[*eq_idx.get(key1.as_str()).ok_or_else(|| miss("equipment", key1))?] = v
            }
            "storage_capacity" => {
                storage_capacity[*st_idx.get(key1.as_str()).ok_or_else(|| miss("storage", key1))?] = v
            }
            "existing_equipment" => {
                let i = *port_idx.get(key1.as_str()).ok_or_else(|| miss("port", key1))?;
                let e = *eq_idx.get(key2.as_str()).ok_or_else(|| miss("equipment", key2))?;
                existing_equipment.set(i, e, v as u64);
            }
            "existing_storage" => {
                let i = *port_idx.get(key1.as_str()).ok_or_else(|| miss("port", key1))?;
                let f = *st_idx.get(key2.as_str()).ok_or_else(|| miss("storage", key2))?;
                existing_storage.set(i, f, v as u64);
            }
            "min_storage_equipment_ratio" => {
                let f = *st_idx.get(key1.as_str()).ok_or_else(|| miss("storage", key1))?;
                let e = *eq_idx.get(key2.as_str()).ok_or_else(|| miss("equipment", key2))?;
                min_ratio.set(f, e, v);
            }
            other => {
                return Err(parse_err(
                    &caps_file.path,
                    *line,
                    format!("unknown capacity item {other:?}"),
                ))
            }
        }
    }
    if num_periods == 0 {
        return Err(parse_err(&caps_file.path, 0, "num_periods is required"));
    }
    if equip_capacity.iter().chain(storage_capacity.iter()).any(|v| v.is_nan()) {
        return Err(parse_err(
            &caps_file.path,
            0,
            "equip_capacity/storage_capacity missing for at least one kind",
        ));
    }

    // --- scenarios.csv ------------------------------------------------------
    let sc_file = read_csv(dir, "scenarios.csv")?;
    expect_headers(
        &sc_file,
        &["scenario", "probability", "kind", "node", "commodity", "period", "tons"],
    )?;
    let mut scenario_names: Vec<String> = Vec::new();
    let mut scenario_probs: Vec<f64> = Vec::new();
    let origin_county_pos: HashMap<&str, usize> = origin_counties
        .iter()
        .enumerate()
        .map(|(k, s)| (s.as_str(), k))
        .collect();
    let dest_county_pos: HashMap<&str, usize> = destination_counties
        .iter()
        .enumerate()
        .map(|(k, s)| (s.as_str(), k))
        .collect();
    let mut supplies: Vec<Vec<f64>> = Vec::new();
    let mut demands: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in &sc_file.records {
        let [scen, prob, kind, node, commodity, period, tons] = rec.as_slice() else {
            return Err(parse_err(&sc_file.path, *line, "expected 7 fields"));
        };
        let s = match scenario_names.iter().position(|n| n == scen) {
            Some(s) => s,
            None => {
                scenario_names.push(scen.clone());
                scenario_probs.push(num(&sc_file, *line, prob, "probability")?);
                supplies.push(vec![0.0; origin_counties.len() * nc * num_periods]);
                demands.push(vec![0.0; destination_counties.len() * nc * num_periods]);
                scenario_names.len() - 1
            }
        };
        let p_declared = num(&sc_file, *line, prob, "probability")?;
        if (p_declared - scenario_probs[s]).abs() > 1e-12 {
            return Err(parse_err(
                &sc_file.path,
                *line,
                format!("scenario {scen:?} declared with inconsistent probabilities"),
            ));
        }
        let c = *com_idx.get(commodity.as_str()).ok_or_else(|| {
            parse_err(&sc_file.path, *line, format!("unknown commodity {commodity:?}"))
        })?;
        let period: usize = period.parse().map_err(|_| {
            parse_err(&sc_file.path, *line, format!("bad period {period:?}"))
        })?;
        if period == 0 || period > num_periods {
            return Err(parse_err(
                &sc_file.path,
                *line,
                format!("period {period} outside 1..={num_periods}"),
            ));
        }
        let tons = num(&sc_file, *line, tons, "tons")?;
        match kind.as_str() {
            "supply" => {
                let pos = *origin_county_pos.get(node.as_str()).ok_or_else(|| {
                    parse_err(&sc_file.path, *line, format!("{node:?} is not an origin county"))
                })?;
                supplies[s][ScenarioData::idx(nc, num_periods, pos, c, period - 1)] = tons;
            }
            "demand" => {
                let pos = *dest_county_pos.get(node.as_str()).ok_or_else(|| {
                    parse_err(
                        &sc_file.path,
                        *line,
                        format!("{node:?} is not a destination county"),
                    )
                })?;
                demands[s][ScenarioData::idx(nc, num_periods, pos, c, period - 1)] = tons;
            }
            other => {
                return Err(parse_err(
                    &sc_file.path,
                    *line,
                    format!("kind must be supply|demand, found {other:?}"),
                ))
            }
        }
    }
    if scenario_names.is_empty() {
        return Err(parse_err(&sc_file.path, 0, "at least one scenario required"));
    }
    let scenarios: Vec<ScenarioData> = scenario_probs
        .into_iter()
        .zip(supplies)
        .zip(demands)
        .map(|((probability, supply), demand)| ScenarioData {
            probability,
            supply,
            demand,
        })
        .collect();

    Instance::new(
        IndexSets {
            ports,
            counties,
            origin_ports,
            destination_ports,
            origin_counties,
            destination_counties,
            commodities,
            equipment_kinds,
            storage_kinds,
            periods: (1..=num_periods as u32).collect(),
            scenarios: scenario_names,
        },
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
            budget,
        },
        CapacityParameters {
            equip_compat,
            storage_compat,
            port_rail,
            county_rail,
            min_storage_equipment_ratio: min_ratio,
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

fn role(origin: bool, dest: bool) -> &'static str {
    match (origin, dest) {
        (true, true) => "both",
        (true, false) => "origin",
        (false, true) => "destination",
        (false, false) => "destination", // unreachable for well-formed sets
    }
}

pub fn save_instance(inst: &Instance, dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let write = |name: &str, body: String| -> Result<(), Error> {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| io_err(&path, e))
    };

    let mut nodes = String::from("id,kind,role,rail\n");
    for (i, id) in inst.sets.ports.iter().enumerate() {
        let origin = inst.sets.origin_ports.contains(id);
        let dest = inst.sets.destination_ports.contains(id);
        nodes.push_str(&format!(
            "{},port,{},{}\n",
            id,
            role(origin, dest),
            inst.caps.port_rail[i] as u8
        ));
    }
    for (j, id) in inst.sets.counties.iter().enumerate() {
        let origin = inst.sets.origin_counties.contains(id);
        let dest = inst.sets.destination_counties.contains(id);
        nodes.push_str(&format!(
            "{},county,{},{}\n",
            id,
            role(origin, dest),
            inst.caps.county_rail[j] as u8
        ));
    }
    write("nodes.csv", nodes)?;

    let mut dists = String::from("from,to,miles\n");
    for j in 0..inst.num_counties() {
        for i in 0..inst.num_ports() {
            let d = inst.distances.county_port.at(j, i);
            if d != 0.0 {
                dists.push_str(&format!(
                    "{},{},{}\n",
                    inst.sets.counties[j], inst.sets.ports[i], d
                ));
            }
        }
    }
    for i in 0..inst.num_ports() {
        for k in 0..inst.num_ports() {
            let d = inst.distances.port_port.at(i, k);
            if d != 0.0 {
                dists.push_str(&format!("{},{},{}\n", inst.sets.ports[i], inst.sets.ports[k], d));
            }
        }
    }
    for j in 0..inst.num_counties() {
        for m in 0..inst.num_counties() {
            let d = inst.distances.county_county.at(j, m);
            if d != 0.0 {
                dists.push_str(&format!(
                    "{},{},{}\n",
                    inst.sets.counties[j], inst.sets.counties[m], d
                ));
            }
        }
    }
    write("distances.csv", dists)?;

    let mut costs = String::from("item,key1,key2,value\n");
    for (e, id) in inst.sets.equipment_kinds.iter().enumerate() {
        costs.push_str(&format!("equipment_cost,{},,{}\n", id, inst.costs.equipment_cost[e]));
    }
    for (f, id) in inst.sets.storage_kinds.iter().enumerate() {
        costs.push_str(&format!("storage_cost,{},,{}\n", id, inst.costs.storage_cost[f]));
    }
    for (c, id) in inst.sets.commodities.iter().enumerate() {
        costs.push_str(&format!("holding_cost,{},,{}\n", id, inst.costs.holding_cost[c]));
    }
    costs.push_str(&format!("shortage_penalty,,,{}\n", inst.costs.shortage_penalty));
    costs.push_str(&format!("budget,,,{}\n", inst.costs.budget));
    let mut arc = |item: &str, from: &str, to: &str, v: f64| {
        if v.is_finite() {
            costs.push_str(&format!("{item},{from},{to},{v}\n"));
        }
    };
    for j in 0..inst.num_counties() {
        for i in 0..inst.num_ports() {
            arc(
                "truck_port_rate",
                &inst.sets.counties[j],
                &inst.sets.ports[i],
                inst.costs.truck_port_rate.at(j, i),
            );
            arc(
                "rail_port_rate",
                &inst.sets.counties[j],
                &inst.sets.ports[i],
                inst.costs.rail_port_rate.at(j, i),
            );
        }
    }
    for i in 0..inst.num_ports() {
        for k in 0..inst.num_ports() {
            arc(
                "barge_rate",
                &inst.sets.ports[i],
                &inst.sets.ports[k],
                inst.costs.barge_rate.at(i, k),
            );
        }
    }
    for j in 0..inst.num_counties() {
        for m in 0..inst.num_counties() {
            arc(
                "county_truck_rate",
                &inst.sets.counties[j],
                &inst.sets.counties[m],
                inst.costs.county_truck_rate.at(j, m),
            );
            arc(
                "county_rail_rate",
                &inst.sets.counties[j],
                &inst.sets.counties[m],
                inst.costs.county_rail_rate.at(j, m),
            );
        }
    }
    write("costs.csv", costs)?;

    let mut caps = String::from("item,key1,key2,value\n");
    caps.push_str(&format!("num_periods,,,{}\n", inst.num_periods()));
    for (e, id) in inst.sets.equipment_kinds.iter().enumerate() {
        caps.push_str(&format!("equip_capacity,{},,{}\n", id, inst.caps.equip_capacity[e]));
    }
    for (f, id) in inst.sets.storage_kinds.iter().enumerate() {
        caps.push_str(&format!("storage_capacity,{},,{}\n", id, inst.caps.storage_capacity[f]));
    }
    for i in 0..inst.num_ports() {
        for e in 0..inst.num_equipment() {
            let v = inst.caps.existing_equipment.at(i, e);
            if v != 0 {
                caps.push_str(&format!(
                    "existing_equipment,{},{},{}\n",
                    inst.sets.ports[i], inst.sets.equipment_kinds[e], v
                ));
            }
        }
        for f in 0..inst.num_storage() {
            let v = inst.caps.existing_storage.at(i, f);
            if v != 0 {
                caps.push_str(&format!(
                    "existing_storage,{},{},{}\n",
                    inst.sets.ports[i], inst.sets.storage_kinds[f], v
                ));
            }
        }
    }
    for f in 0..inst.num_storage() {
        for e in 0..inst.num_equipment() {
            let v = inst.caps.min_storage_equipment_ratio.at(f, e);
            if v != 0.0 {
                caps.push_str(&format!(
                    "min_storage_equipment_ratio,{},{},{}\n",
                    inst.sets.storage_kinds[f], inst.sets.equipment_kinds[e], v
                ));
            }
        }
    }
    write("capacities.csv", caps)?;

    let mut compat = String::from("kind_type,kind,commodity,norm\n");
    for (e, id) in inst.sets.equipment_kinds.iter().enumerate() {
        for (c, cid) in inst.sets.commodities.iter().enumerate() {
            compat.push_str(&format!(
                "equipment,{},{},{}\n",
                id,
                cid,
                inst.caps.processing_norm.at(e, c)
            ));
        }
    }
    for (f, id) in inst.sets.storage_kinds.iter().enumerate() {
        for (c, cid) in inst.sets.commodities.iter().enumerate() {
            compat.push_str(&format!(
                "storage,{},{},{}\n",
                id,
                cid,
                inst.caps.storage_norm.at(f, c)
            ));
        }
    }
    write("compat.csv", compat)?;

    let nc = inst.num_commodities();
    let np = inst.num_periods();
    let mut sc_body = String::from("scenario,probability,kind,node,commodity,period,tons\n");
    for (s, sc) in inst.scenarios.iter().enumerate() {
        let name = &inst.sets.scenarios[s];
        for (pos, county) in inst.sets.origin_counties.iter().enumerate() {
            for c in 0..nc {
                for p in 0..np {
                    let v = sc.supply[ScenarioData::idx(nc, np, pos, c, p)];
                    sc_body.push_str(&format!(
                        "{},{},supply,{},{},{},{}\n",
                        name,
                        sc.probability,
                        county,
                        inst.sets.commodities[c],
                        p + 1,
                        v
                    ));
                }
            }
        }
        for (pos, county) in inst.sets.destination_counties.iter().enumerate() {
            for c in 0..nc {
                for p in 0..np {
                    let v = sc.demand[ScenarioData::idx(nc, np, pos, c, p)];
                    sc_body.push_str(&format!(
                        "{},{},demand,{},{},{},{}\n",
                        name,
                        sc.probability,
                        county,
                        inst.sets.commodities[c],
                        p + 1,
                        v
                    ));
                }
            }
        }
    }
    write("scenarios.csv", sc_body)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_instance, GeneratorConfig};

    #[test]
    fn round_trip_identity() {
        let inst = generate_instance(&GeneratorConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_instance(&inst, dir.path()).unwrap();
        let loaded = load_instance(dir.path()).unwrap();
        assert_eq!(inst.sets, loaded.sets);
        assert_eq!(inst.caps, loaded.caps);
        assert_eq!(inst.distances, loaded.distances);
        assert_eq!(inst.scenarios, loaded.scenarios);
        // Costs round through decimal text; compare entries exactly (the
        // writer uses shortest-representation formatting, which f64 parses
        // back bit-identically).
        assert_eq!(inst.costs, loaded.costs);
    }

    #[test]
    fn parse_errors_name_file_and_line() {
        let inst = generate_instance(&GeneratorConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_instance(&inst, dir.path()).unwrap();
        // Corrupt one number in nodes.csv.
        let path = dir.path().join("nodes.csv");
        let body = std::fs::read_to_string(&path).unwrap();
        let bad = body.replacen(",1\n", ",yes\n", 1).replacen(",0\n", ",yes\n", 1);
        std::fs::write(&path, bad).unwrap();
        let err = load_instance(dir.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("nodes.csv:2"), "{msg}");
        assert!(msg.contains("rail must be 0 or 1"), "{msg}");
    }

    #[test]
    fn missing_file_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_instance(dir.path()).unwrap_err();
        assert!(err.to_string().contains("nodes.csv"));
    }

    #[test]
    fn tariff_rows_expand_against_distances() {
        let inst = generate_instance(&GeneratorConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_instance(&inst, dir.path()).unwrap();
        // Replace the explicit arc rows with pure tariffs.
        let path = dir.path().join("costs.csv");
        let body = std::fs::read_to_string(&path).unwrap();
        let mut trimmed: String = body
            .lines()
            .filter(|l| {
                !(l.starts_with("truck_port_rate")
                    || l.starts_with("rail_port_rate")
                    || l.starts_with("barge_rate")
                    || l.starts_with("county_truck_rate")
                    || l.starts_with("county_rail_rate"))
            })
            .map(|l| format!("{l}\n"))
            .collect();
        trimmed.push_str(&format!(
            "truck_rate_per_ton_mile,,,{}\n",
            crate::generate::TRUCK_RATE_PER_TON_MILE
        ));
        trimmed.push_str(&format!(
            "rail_fixed_per_ton,,,{}\n",
            crate::generate::RAIL_FIXED_PER_TON
        ));
        trimmed.push_str(&format!(
            "rail_rate_per_ton_mile,,,{}\n",
            crate::generate::RAIL_RATE_PER_TON_MILE
        ));
        trimmed.push_str(&format!(
            "barge_rate_per_ton_mile,,,{}\n",
            crate::generate::BARGE_RATE_PER_TON_MILE
        ));
        std::fs::write(&path, trimmed).unwrap();
        let loaded = load_instance(dir.path()).unwrap();
        // Expanded rates match the generator's tariff arithmetic exactly
        // where the generator declared an arc.
        for j in 0..inst.num_counties() {
            for i in 0..inst.num_ports() {
                let orig = inst.costs.truck_port_rate.at(j, i);
                let new = loaded.costs.truck_port_rate.at(j, i);
                assert!(
                    (orig - new).abs() < 1e-9 || !orig.is_finite(),
                    "({j},{i}): {orig} vs {new}"
                );
            }
        }
    }
}
