//! Domain types shared by every solver: assets, instances, the travel and
//! maintenance-cost matrices, and solution evaluation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for cost comparisons (scaled up for large magnitudes).
pub const COST_EPS: f64 = 1e-9;

pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= COST_EPS * a.abs().max(b.abs()).max(1.0)
}

/// A class of asset sharing a disinfectant demand and a service time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetType {
    pub id: u32,
    pub name: String,
    /// Liters of disinfectant per visit.
    pub demand: f64,
    /// Seconds spent treating the asset.
    pub service_time: f64,
}

impl AssetType {
    pub fn new(id: u32, name: impl Into<String>, demand: f64, service_time: f64) -> Self {
        Self {
            id,
            name: name.into(),
            demand,
            service_time,
        }
    }
}

/// A located asset. Ids run `1..=n`; node 0 is the depot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Asset {
    pub id: usize,
    pub type_id: u32,
    pub x: f64,
    pub y: f64,
}

/// Where the generator was when it produced an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub prng: String,
    pub seed: u64,
}

/// A complete routing problem: area, depot, assets and a homogeneous fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub area_width: f64,
    pub area_height: f64,
    pub depot_x: f64,
    pub depot_y: f64,
    pub assets: Vec<Asset>,
    pub catalog: Vec<AssetType>,
    /// Number of drones (m).
    pub drones: usize,
    /// Drone payload capacity in liters (Q).
    pub capacity: f64,
    /// Cruise speed in m/s (V).
    pub speed: f64,
    /// Flight endurance in seconds. Only ever produces warnings.
    pub endurance: f64,
    pub provenance: Option<Provenance>,
}

impl Instance {
    /// Number of assets.
    pub fn n(&self) -> usize {
        self.assets.len()
    }

    pub fn asset_type(&self, type_id: u32) -> Option<&AssetType> {
        self.catalog.iter().find(|t| t.id == type_id)
    }

    fn node_type(&self, node: usize) -> Result<Option<&AssetType>> {
        if node == 0 {
            return Ok(None);
        }
        let asset = self.assets.get(node - 1).ok_or(Error::UnknownAsset(node))?;
        self.asset_type(asset.type_id)
            .map(Some)
            .ok_or(Error::UnknownAssetType {
                asset: node,
                type_id: asset.type_id,
            })
    }

    /// Demand of node `node` (0 for the depot).
    pub fn demand(&self, node: usize) -> Result<f64> {
        Ok(self.node_type(node)?.map_or(0.0, |t| t.demand))
    }

    /// Service time of node `node` (0 for the depot).
    pub fn service_time(&self, node: usize) -> Result<f64> {
        Ok(self.node_type(node)?.map_or(0.0, |t| t.service_time))
    }

    /// Demands indexed by node, depot included.
    pub fn demands(&self) -> Result<Vec<f64>> {
        (0..=self.n()).map(|i| self.demand(i)).collect()
    }

    pub fn location(&self, node: usize) -> Result<(f64, f64)> {
        if node == 0 {
            Ok((self.depot_x, self.depot_y))
        } else {
            let a = self.assets.get(node - 1).ok_or(Error::UnknownAsset(node))?;
            Ok((a.x, a.y))
        }
    }

    pub fn total_demand(&self) -> Result<f64> {
        Ok(self.demands()?.iter().sum())
    }
}

/// Pairwise travel times and maintenance costs over depot and assets.
///
/// `cost(i, j) = travel(i, j) + service_time(j)`, so `cost` is asymmetric
/// whenever service times differ while `travel` is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    size: usize,
    travel: Vec<f64>,
    cost: Vec<f64>,
    service: Vec<f64>,
}

impl CostMatrix {
    /// Number of nodes, depot included.
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn travel(&self, i: usize, j: usize) -> f64 {
        self.travel[i * self.size + j]
    }

    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.size + j]
    }

    #[inline]
    pub fn service_time(&self, j: usize) -> f64 {
        self.service[j]
    }

    /// Duration of a depot-to-depot tour over `stops`, return leg included.
    pub fn route_duration(&self, stops: &[usize]) -> f64 {
        let Some((&first, _)) = stops.split_first() else {
            return 0.0;
        };
        let mut total = self.cost(0, first);
        for w in stops.windows(2) {
            total += self.cost(w[0], w[1]);
        }
        total + self.cost(stops[stops.len() - 1], 0)
    }
}

/// Builds the travel-time and maintenance-cost matrices.
pub fn build_cost_matrix(instance: &Instance) -> Result<CostMatrix> {
    if !(instance.speed > 0.0) {
        return Err(Error::InvalidSpeed(instance.speed));
    }
    let size = instance.n() + 1;
    let points = (0..size)
        .map(|i| instance.location(i))
        .collect::<Result<Vec<_>>>()?;
    let service = (0..size)
        .map(|i| instance.service_time(i))
        .collect::<Result<Vec<_>>>()?;

    let mut travel = vec![0.0; size * size];
    for i in 0..size {
        for j in (i + 1)..size {
            let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
            let t = (dx * dx + dy * dy).sqrt() / instance.speed;
            travel[i * size + j] = t;
            travel[j * size + i] = t;
        }
    }
    let cost = (0..size * size)
        .map(|k| travel[k] + service[k % size])
        .collect();
    Ok(CostMatrix {
        size,
        travel,
        cost,
        service,
    })
}

/// One drone's tour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub drone_id: usize,
    /// Asset ids in visiting order, depot excluded.
    pub stops: Vec<usize>,
    /// Liters delivered on this tour.
    pub load: f64,
    /// Seconds from depot departure to depot return.
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Gnn,
    Brute,
    External,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Gnn => "gnn",
            Method::Brute => "brute",
            Method::External => "external",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "gnn" => Ok(Method::Gnn),
            "brute" => Ok(Method::Brute),
            "external" => Ok(Method::External),
            other => Err(Error::Parse(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub total_cost: f64,
    pub method: Method,
}

impl Solution {
    /// Assembles a solution from stop sequences, filling in loads, durations
    /// and the total. Drone ids follow the order of `tours`.
    pub fn from_tours(
        instance: &Instance,
        costs: &CostMatrix,
        tours: Vec<Vec<usize>>,
        method: Method,
    ) -> Result<Self> {
        let mut routes = Vec::with_capacity(tours.len());
        for (drone_id, stops) in tours.into_iter().enumerate() {
            let mut load = 0.0;
            for &s in &stops {
                if s == 0 || s > instance.n() {
                    return Err(Error::UnknownAsset(s));
                }
                load += instance.demand(s)?;
            }
            let duration = costs.route_duration(&stops);
            routes.push(Route {
                drone_id,
                stops,
                load,
                duration,
            });
        }
        let total_cost = routes.iter().map(|r| r.duration).sum();
        Ok(Self {
            routes,
            total_cost,
            method,
        })
    }

    /// Stop sequences only.
    pub fn tours(&self) -> Vec<Vec<usize>> {
        self.routes.iter().map(|r| r.stops.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    UnvisitedAsset,
    DuplicateVisit,
    CapacityExceeded,
    WrongRouteCount,
    BadArithmetic,
    EnduranceExceededWarning,
    /// Instance-level: total demand cannot fit in `m` single-trip drones.
    TotalDemandExceeded,
    /// Instance-level: malformed parameter, coordinate or catalog entry.
    InvalidParameter,
}

impl ViolationKind {
    pub fn is_warning(self) -> bool {
        matches!(self, ViolationKind::EnduranceExceededWarning)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    pub magnitude: f64,
}

impl Violation {
    fn new(kind: ViolationKind, detail: impl Into<String>, magnitude: f64) -> Self {
        Self {
            kind,
            detail: detail.into(),
            magnitude,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {} ({})", self.kind, self.detail, self.magnitude)
    }
}

/// True when `violations` holds anything beyond warnings.
pub fn has_hard_violations(violations: &[Violation]) -> bool {
    violations.iter().any(|v| !v.kind.is_warning())
}

/// Checks the instance against the model assumptions. An empty result means
/// the instance is well formed and not trivially infeasible.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();

    if instance.drones < 1 {
        out.push(Violation::new(InvalidParameter, "drone count must be at least 1", 0.0));
    }
    if !(instance.capacity > 0.0) {
        out.push(Violation::new(InvalidParameter, "capacity must be positive", instance.capacity));
    }
    if !(instance.speed > 0.0) {
        out.push(Violation::new(InvalidParameter, "speed must be positive", instance.speed));
    }
    if !(instance.endurance > 0.0) {
        out.push(Violation::new(InvalidParameter, "endurance must be positive", instance.endurance));
    }
    if !(instance.area_width > 0.0 && instance.area_height > 0.0) {
        out.push(Violation::new(InvalidParameter, "area dimensions must be positive", 0.0));
    }
    if !in_area(instance, instance.depot_x, instance.depot_y) {
        out.push(Violation::new(InvalidParameter, "depot lies outside the area", 0.0));
    }

    let mut names = BTreeSet::new();
    let mut ids = BTreeSet::new();
    for t in &instance.catalog {
        if !names.insert(t.name.as_str()) {
            out.push(Violation::new(InvalidParameter, format!("duplicate asset type name `{}`", t.name), 0.0));
        }
        if !ids.insert(t.id) {
            out.push(Violation::new(InvalidParameter, format!("duplicate asset type id {}", t.id), 0.0));
        }
        if !(t.demand > 0.0) {
            out.push(Violation::new(InvalidParameter, format!("type `{}` has non-positive demand", t.name), t.demand));
        }
        if !(t.service_time >= 0.0) {
            out.push(Violation::new(InvalidParameter, format!("type `{}` has negative service time", t.name), t.service_time));
        }
    }

    for (k, a) in instance.assets.iter().enumerate() {
        if a.id != k + 1 {
            out.push(Violation::new(InvalidParameter, format!("asset at position {k} has id {} (ids must be 1..n)", a.id), a.id as f64));
        }
        if !in_area(instance, a.x, a.y) {
            out.push(Violation::new(InvalidParameter, format!("asset {} lies outside the area", a.id), 0.0));
        }
        match instance.asset_type(a.type_id) {
            None => out.push(Violation::new(InvalidParameter, format!("asset {} has unknown type {}", a.id, a.type_id), 0.0)),
            Some(t) if t.demand > instance.capacity => out.push(Violation::new(
                CapacityExceeded,
                format!("asset {} demand {} exceeds drone capacity {}", a.id, t.demand, instance.capacity),
                t.demand - instance.capacity,
            )),
            Some(_) => {}
        }
    }

    let total: f64 = instance
        .assets
        .iter()
        .filter_map(|a| instance.asset_type(a.type_id))
        .map(|t| t.demand)
        .sum();
    let fleet = instance.drones as f64 * instance.capacity;
    let oversized = out.iter().any(|v| v.kind == CapacityExceeded);
    if instance.drones >= 1 && !oversized && total > fleet + COST_EPS {
        out.push(Violation::new(
            TotalDemandExceeded,
            format!("total demand {total} exceeds fleet capacity {fleet}"),
            total - fleet,
        ));
    }
    out
}

fn in_area(instance: &Instance, x: f64, y: f64) -> bool {
    (0.0..=instance.area_width).contains(&x) && (0.0..=instance.area_height).contains(&y)
}

/// Recomputes a solution's cost from scratch and lists every broken
/// invariant. Endurance overruns are reported as warnings only.
///
/// An asset id that does not exist in the instance is an error rather than a
/// violation.
pub fn evaluate_solution(instance: &Instance, solution: &Solution) -> Result<(f64, Vec<Violation>)> {
    use ViolationKind::*;
    let n = instance.n();
    for r in &solution.routes {
        if let Some(&bad) = r.stops.iter().find(|&&s| s == 0 || s > n) {
            return Err(Error::UnknownAsset(bad));
        }
    }
    let costs = build_cost_matrix(instance)?;
    let mut out = Vec::new();

    let mut seen = vec![0usize; n + 1];
    for r in &solution.routes {
        for &s in &r.stops {
            seen[s] += 1;
        }
    }
    for (id, &count) in seen.iter().enumerate().skip(1) {
        if count == 0 {
            out.push(Violation::new(UnvisitedAsset, format!("asset {id} is not visited"), id as f64));
        } else if count > 1 {
            out.push(Violation::new(DuplicateVisit, format!("asset {id} is visited {count} times"), count as f64));
        }
    }

    if solution.routes.len() != instance.drones {
        out.push(Violation::new(
            WrongRouteCount,
            format!("{} routes for {} drones", solution.routes.len(), instance.drones),
            solution.routes.len() as f64 - instance.drones as f64,
        ));
    }
    let empty = solution.routes.iter().filter(|r| r.stops.is_empty()).count();
    if empty > 0 && n >= instance.drones {
        out.push(Violation::new(WrongRouteCount, format!("{empty} empty routes while m <= n"), empty as f64));
    }

    let mut total = 0.0;
    for r in &solution.routes {
        let mut load = 0.0;
        for &s in &r.stops {
            load += instance.demand(s)?;
        }
        let duration = costs.route_duration(&r.stops);
        total += duration;
        if load > instance.capacity + COST_EPS {
            out.push(Violation::new(
                CapacityExceeded,
                format!("drone {} carries {load} > {}", r.drone_id, instance.capacity),
                load - instance.capacity,
            ));
        }
        if !approx_eq(load, r.load) {
            out.push(Violation::new(BadArithmetic, format!("drone {} reports load {} but carries {load}", r.drone_id, r.load), r.load - load));
        }
        if !approx_eq(duration, r.duration) {
            out.push(Violation::new(
                BadArithmetic,
                format!("drone {} reports duration {} but flies {duration}", r.drone_id, r.duration),
                r.duration - duration,
            ));
        }
        if duration > instance.endurance {
            out.push(Violation::new(
                EnduranceExceededWarning,
                format!("drone {} needs {duration} s of {} s endurance", r.drone_id, instance.endurance),
                duration - instance.endurance,
            ));
        }
    }
    if !approx_eq(total, solution.total_cost) {
        out.push(Violation::new(
            BadArithmetic,
            format!("reported total {} but routes sum to {total}", solution.total_cost),
            solution.total_cost - total,
        ));
    }
    Ok((total, out))
}
