//! Capacitated drone routing for outdoor asset maintenance.
//!
//! A fleet of identical drones leaves a single depot, serves every asset
//! exactly once (each asset consumes a fixed amount of disinfectant and takes
//! a fixed time to treat) and returns. The crate provides:
//!
//! * [`model`]: domain types, the travel/cost matrices and solution evaluation,
//! * [`scenario`]: seeded random instance generation,
//! * [`mip`]: the two-index CVRP integer program with MTZ load constraints,
//! * [`exact`]: a best-first branch-and-bound solver,
//! * [`oracle`]: exhaustive enumeration for tiny instances,
//! * [`gnn`]: the cluster-first (capacitated p-median) route-second
//!   greedy nearest-neighbor heuristic,
//! * [`io`]: instance/solution text formats and CVRPLIB ingestion,
//! * [`bench`]: paired-seed experiment sweeps, CDFs and CSV/SVG reports.

// `!(x > 0.0)` is deliberate throughout: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod exact;
pub mod gnn;
pub mod io;
pub mod mip;
pub mod model;
pub mod oracle;
mod par;
pub mod scenario;

pub use error::{Error, Result};
pub use exact::{solve_exact, SolveConfig, SolveResult, SolveStatus};
pub use gnn::{cluster_assets, route_cluster, solve_gnn, Clustering};
pub use model::{
    build_cost_matrix, evaluate_solution, validate_instance, Asset, AssetType, CostMatrix,
    Instance, Method, Route, Solution, Violation, ViolationKind,
};
pub use oracle::solve_bruteforce;
pub use par::available as parallel_available;
pub use scenario::{default_catalog, generate_instance, ScenarioConfig};
