//! Text formats: native instance and solution files (TOML), and the classic
//! node-coordinate CVRP benchmark layout.
//!
//! Floats are written in shortest round-trip decimal form, so
//! `parse(write(x)) == x` holds bit for bit. Keys are emitted in a fixed
//! order. See `docs/formats.md` for the schemas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{SolveResult, SolveStatus};
use crate::model::{Asset, AssetType, Instance, Method, Provenance, Route, Solution};

pub const INSTANCE_SCHEMA: &str = "drone-cvrp/instance/v1";
pub const SOLUTION_SCHEMA: &str = "drone-cvrp/solution/v1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    schema: String,
    area: AreaDoc,
    depot: PointDoc,
    fleet: FleetDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorDoc>,
    #[serde(default)]
    asset_type: Vec<AssetType>,
    #[serde(default)]
    asset: Vec<AssetDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AreaDoc {
    width: f64,
    height: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FleetDoc {
    drones: usize,
    capacity: f64,
    speed: f64,
    endurance: f64,
}

// TOML integers are signed 64-bit, so the seed travels as a decimal string.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDoc {
    prng: String,
    seed: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssetDoc {
    id: usize,
    #[serde(rename = "type")]
    type_id: u32,
    x: f64,
    y: f64,
}

fn parse_error(e: toml::de::Error) -> Error {
    Error::Parse(e.to_string())
}

fn check_schema(found: &str, expected: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::Parse(format!("schema: expected `{expected}`, found `{found}`")))
    }
}

pub fn write_instance(instance: &Instance) -> Result<String> {
    let doc = InstanceDoc {
        schema: INSTANCE_SCHEMA.to_string(),
        area: AreaDoc {
            width: instance.area_width,
            height: instance.area_height,
        },
        depot: PointDoc {
            x: instance.depot_x,
            y: instance.depot_y,
        },
        fleet: FleetDoc {
            drones: instance.drones,
            capacity: instance.capacity,
            speed: instance.speed,
            endurance: instance.endurance,
        },
        generator: instance.provenance.as_ref().map(|p| GeneratorDoc {
            prng: p.prng.clone(),
            seed: p.seed.to_string(),
        }),
        asset_type: instance.catalog.clone(),
        asset: instance
            .assets
            .iter()
            .map(|a| AssetDoc {
                id: a.id,
                type_id: a.type_id,
                x: a.x,
                y: a.y,
            })
            .collect(),
    };
    toml::to_string(&doc).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses a native instance file. Structural problems are reported with the
/// offending key and line; semantic checks are left to
/// [`crate::validate_instance`].
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = toml::from_str(text).map_err(parse_error)?;
    check_schema(&doc.schema, INSTANCE_SCHEMA)?;
    let provenance = doc
        .generator
        .map(|g| {
            let seed = g
                .seed
                .parse()
                .map_err(|_| Error::Parse(format!("generator.seed: `{}` is not an unsigned 64-bit integer", g.seed)))?;
            Ok::<_, Error>(Provenance { prng: g.prng, seed })
        })
        .transpose()?;
    Ok(Instance {
        area_width: doc.area.width,
        area_height: doc.area.height,
        depot_x: doc.depot.x,
        depot_y: doc.depot.y,
        assets: doc
            .asset
            .into_iter()
            .map(|a| Asset {
                id: a.id,
                type_id: a.type_id,
                x: a.x,
                y: a.y,
            })
            .collect(),
        catalog: doc.asset_type,
        drones: doc.fleet.drones,
        capacity: doc.fleet.capacity,
        speed: doc.fleet.speed,
        endurance: doc.fleet.endurance,
        provenance,
    })
}

/// Solver bookkeeping stored next to a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverMeta {
    pub status: SolveStatus,
    pub nodes: u64,
    pub wall_time: f64,
    pub lower_bound: f64,
}

impl SolverMeta {
    pub fn from_result(result: &SolveResult) -> Self {
        Self {
            status: result.status,
            nodes: result.nodes_explored,
            wall_time: result.wall_time,
            lower_bound: result.lower_bound,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionDoc {
    schema: String,
    method: Method,
    assets: usize,
    drones: usize,
    total_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    solver: Option<SolverMeta>,
    #[serde(default)]
    route: Vec<Route>,
}

/// Serializes a solution with optional solver metadata. The instance's
/// asset and drone counts are recorded so mismatched pairs are caught on
/// reading.
pub fn write_solution(solution: &Solution, instance: &Instance, meta: Option<&SolverMeta>) -> Result<String> {
    let doc = SolutionDoc {
        schema: SOLUTION_SCHEMA.to_string(),
        method: solution.method,
        assets: instance.n(),
        drones: instance.drones,
        total_cost: solution.total_cost,
        solver: meta.cloned(),
        route: solution.routes.clone(),
    };
    toml::to_string(&doc).map_err(|e| Error::Parse(e.to_string()))
}

/// A parsed solution file.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub solution: Solution,
    pub assets: usize,
    pub drones: usize,
    pub solver: Option<SolverMeta>,
}

pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    let doc: SolutionDoc = toml::from_str(text).map_err(parse_error)?;
    check_schema(&doc.schema, SOLUTION_SCHEMA)?;
    Ok(SolutionFile {
        solution: Solution {
            routes: doc.route,
            total_cost: doc.total_cost,
            method: doc.method,
        },
        assets: doc.assets,
        drones: doc.drones,
        solver: doc.solver,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    Coords,
    Demands,
    Depots,
}

/// Reads a node-coordinate CVRP benchmark file (`EUC_2D` only).
///
/// Speed is 1, so costs are plain Euclidean distances (unrounded); service
/// times are 0. Each distinct demand value becomes one asset type. The
/// drone count is `vehicles` if given, otherwise read from the comment
/// ("No of trucks: k") or the `-kN` suffix of the name.
pub fn parse_cvrplib(text: &str, vehicles: Option<usize>) -> Result<Instance> {
    let mut name = String::new();
    let mut comment = String::new();
    let mut dimension: Option<usize> = None;
    let mut capacity: Option<f64> = None;
    let mut coords: Vec<(usize, f64, f64)> = Vec::new();
    let mut demands: Vec<(usize, f64)> = Vec::new();
    let mut depots: Vec<usize> = Vec::new();
    let mut section = Section::Header;

    let bad = |line: usize, what: &str| Error::Parse(format!("line {line}: {what}"));

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let upper = line.to_ascii_uppercase();
        match upper.as_str() {
            "EOF" => break,
            "NODE_COORD_SECTION" => {
                section = Section::Coords;
                continue;
            }
            "DEMAND_SECTION" => {
                section = Section::Demands;
                continue;
            }
            "DEPOT_SECTION" => {
                section = Section::Depots;
                continue;
            }
            _ => {}
        }
        if upper.ends_with("_SECTION") {
            return Err(Error::UnsupportedFormat(format!("line {line_no}: section `{line}`")));
        }
        if let Some((key, value)) = line.split_once(':') {
            if section == Section::Header || !key.trim().chars().all(|c| c.is_ascii_digit()) {
                let value = value.trim();
                match key.trim().to_ascii_uppercase().as_str() {
                    "NAME" => name = value.to_string(),
                    "COMMENT" => comment = value.to_string(),
                    "TYPE" if !value.eq_ignore_ascii_case("CVRP") => {
                        return Err(Error::UnsupportedFormat(format!("problem type `{value}`")));
                    }
                    "DIMENSION" => dimension = Some(value.parse().map_err(|_| bad(line_no, "DIMENSION is not an integer"))?),
                    "CAPACITY" => capacity = Some(value.parse().map_err(|_| bad(line_no, "CAPACITY is not a number"))?),
                    "EDGE_WEIGHT_TYPE" if value != "EUC_2D" => {
                        return Err(Error::UnsupportedFormat(format!("edge weight type `{value}`")));
                    }
                    _ => {}
                }
                section = Section::Header;
                continue;
            }
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |i: usize| -> Result<f64> {
            fields
                .get(i)
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| bad(line_no, "expected a number"))
        };
        match section {
            Section::Header => return Err(bad(line_no, "unexpected content outside a section")),
            Section::Coords => coords.push((num(0)? as usize, num(1)?, num(2)?)),
            Section::Demands => demands.push((num(0)? as usize, num(1)?)),
            Section::Depots => {
                let id = num(0)?;
                if id >= 0.0 {
                    depots.push(id as usize);
                } else {
                    section = Section::Header;
                }
            }
        }
    }

    let dimension = dimension.ok_or_else(|| Error::Parse("missing DIMENSION".into()))?;
    let capacity = capacity.ok_or_else(|| Error::Parse("missing CAPACITY".into()))?;
    if coords.len() != dimension || demands.len() != dimension {
        return Err(Error::Parse(format!(
            "DIMENSION is {dimension} but found {} coordinates and {} demands",
            coords.len(),
            demands.len()
        )));
    }
    let depot = match depots.as_slice() {
        [] => 1,
        [d] => *d,
        _ => return Err(Error::UnsupportedFormat("more than one depot".into())),
    };
    let drones = vehicles
        .or_else(|| vehicles_from_comment(&comment))
        .or_else(|| vehicles_from_name(&name))
        .ok_or_else(|| Error::Parse("vehicle count not stated; pass it explicitly".into()))?;

    let demand_of = |id: usize| demands.iter().find(|d| d.0 == id).map(|d| d.1);
    let &(_, depot_x, depot_y) = coords
        .iter()
        .find(|c| c.0 == depot)
        .ok_or_else(|| Error::Parse(format!("depot {depot} has no coordinates")))?;

    let mut catalog: Vec<AssetType> = Vec::new();
    let mut assets = Vec::with_capacity(dimension - 1);
    for &(id, x, y) in coords.iter().filter(|c| c.0 != depot) {
        let q = demand_of(id).ok_or_else(|| Error::Parse(format!("node {id} has no demand")))?;
        let type_id = match catalog.iter().find(|t| t.demand == q) {
            Some(t) => t.id,
            None => {
                let type_id = catalog.len() as u32 + 1;
                catalog.push(AssetType::new(type_id, format!("demand-{q}"), q, 0.0));
                type_id
            }
        };
        assets.push(Asset {
            id: assets.len() + 1,
            type_id,
            x,
            y,
        });
    }

    let width = assets.iter().map(|a| a.x).fold(depot_x, f64::max);
    let height = assets.iter().map(|a| a.y).fold(depot_y, f64::max);
    Ok(Instance {
        area_width: width.max(1.0),
        area_height: height.max(1.0),
        depot_x,
        depot_y,
        assets,
        catalog,
        drones,
        capacity,
        speed: 1.0,
        endurance: f64::INFINITY,
        provenance: None,
    })
}

fn vehicles_from_comment(comment: &str) -> Option<usize> {
    let lower = comment.to_ascii_lowercase();
    let rest = &lower[lower.find("trucks")? + "trucks".len()..];
    let digits: String = rest
        .trim_start_matches(|c: char| !c.is_ascii_digit())
        .chars()
        .take_while(char::is_ascii_digit)
        .collect();
    digits.parse().ok()
}

fn vehicles_from_name(name: &str) -> Option<usize> {
    let tail = name.rsplit(['-', '_']).next()?;
    tail.strip_prefix(['k', 'K'])?.parse().ok()
}

/// Keeps the first `k` assets, drops unused types and caps the drone count
/// at `k`.
pub fn truncate_instance(instance: &Instance, k: usize) -> Instance {
    let mut out = instance.clone();
    out.assets.truncate(k);
    out.catalog.retain(|t| out.assets.iter().any(|a| a.type_id == t.id));
    out.drones = out.drones.min(k.max(1));
    out.provenance = None;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_instance, ScenarioConfig};

    const TWO_ASSETS: &str = r#"
schema = "drone-cvrp/instance/v1"

[area]
width = 1000.0
height = 1000.0

[depot]
x = 0.0
y = 0.0

[fleet]
drones = 1
capacity = 5.5
speed = 20.0
endurance = 780.0

[[asset_type]]
id = 1
name = "bench"
demand = 0.3
service_time = 60.0

[[asset]]
id = 1
type = 1
x = 400.0
y = 0.0

[[asset]]
id = 2
type = 1
x = 400.0
y = 300.0
"#;

    #[test]
    fn hand_written_instance_parses_and_validates() {
        let inst = parse_instance(TWO_ASSETS).unwrap();
        assert_eq!(inst.n(), 2);
        assert!(crate::validate_instance(&inst).is_empty());
        assert_eq!(inst.provenance, None);
    }

    #[test]
    fn missing_capacity_is_named() {
        let text = TWO_ASSETS.replace("capacity = 5.5\n", "");
        let err = parse_instance(&text).unwrap_err().to_string();
        assert!(err.contains("capacity"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let text = TWO_ASSETS.replace("instance/v1", "instance/v9");
        assert!(parse_instance(&text).unwrap_err().to_string().contains("schema"));
    }

    #[test]
    fn generated_instance_round_trips_with_provenance() {
        let mut cfg = ScenarioConfig::with_asset_count(u64::MAX - 3, 9);
        cfg.speed = 17.3;
        let inst = generate_instance(&cfg).unwrap();
        let text = write_instance(&inst).unwrap();
        assert!(text.contains(crate::scenario::PRNG_ID));
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn solution_round_trips() {
        let inst = generate_instance(&ScenarioConfig::with_asset_count(3, 6)).unwrap();
        let mut inst = inst;
        inst.drones = 2;
        let r = crate::solve_exact(&inst, &crate::SolveConfig::default()).unwrap();
        let sol = r.incumbent.clone().unwrap();
        let meta = SolverMeta::from_result(&r);
        let text = write_solution(&sol, &inst, Some(&meta)).unwrap();
        let back = parse_solution(&text).unwrap();
        assert_eq!(back.solution, sol);
        assert_eq!(back.solver, Some(meta));
        assert_eq!((back.assets, back.drones), (6, 2));

        let bare = parse_solution(&write_solution(&sol, &inst, None).unwrap()).unwrap();
        assert_eq!(bare.solver, None);
    }

    const SMALL_VRP: &str = "NAME : toy-n4-k2
COMMENT : (No of trucks: 3, toy)
TYPE : CVRP
DIMENSION : 4
EDGE_WEIGHT_TYPE : EUC_2D
CAPACITY : 10
NODE_COORD_SECTION
 1 5 5
 2 0 5
 3 10 5
 4 5 12
DEMAND_SECTION
1 0
2 4
3 4
4 7
DEPOT_SECTION
 1
 -1
EOF
";

    #[test]
    fn cvrplib_maps_structure() {
        let inst = parse_cvrplib(SMALL_VRP, None).unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.drones, 3);
        assert_eq!((inst.depot_x, inst.depot_y), (5.0, 5.0));
        assert_eq!(inst.catalog.len(), 2);
        assert_eq!(inst.demands().unwrap(), vec![0.0, 4.0, 4.0, 7.0]);
        assert_eq!(inst.speed, 1.0);
        assert!(crate::validate_instance(&inst).is_empty());
        let costs = crate::build_cost_matrix(&inst).unwrap();
        assert_eq!(costs.cost(0, 3), 7.0);

        assert_eq!(parse_cvrplib(SMALL_VRP, Some(2)).unwrap().drones, 2);
        let no_comment = SMALL_VRP.replace("COMMENT : (No of trucks: 3, toy)\n", "");
        assert_eq!(parse_cvrplib(&no_comment, None).unwrap().drones, 2);
    }

    #[test]
    fn cvrplib_rejects_explicit_weights() {
        let text = SMALL_VRP.replace("EUC_2D", "EXPLICIT");
        assert!(matches!(parse_cvrplib(&text, None), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn cvrplib_dimension_mismatch() {
        let text = SMALL_VRP.replace("DIMENSION : 4", "DIMENSION : 5");
        assert!(matches!(parse_cvrplib(&text, None), Err(Error::Parse(_))));
    }

    #[test]
    fn truncation_keeps_prefix() {
        let inst = parse_cvrplib(SMALL_VRP, None).unwrap();
        let t = truncate_instance(&inst, 2);
        assert_eq!(t.n(), 2);
        assert_eq!(t.drones, 2);
        assert_eq!(t.catalog.len(), 1);
    }
}
