//! Paired-seed experiment sweeps and their reports.
//!
//! Every `(n, run)` cell draws one instance from a seed derived from the base
//! seed, `n` and the run index, and hands the identical instance to each
//! requested method. Cells are independent and run on the rayon pool when the
//! `parallel` feature is on; records are sorted by `(n, run, method)`
//! afterwards so the worker schedule never shows in the output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::hash::Hasher;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rustc_hash::FxHasher;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{solve_exact, SolveConfig, SolveResult, SolveStatus};
use crate::gnn::solve_gnn;
use crate::model::{AssetType, Instance, Method};
use crate::oracle::{solve_bruteforce, DEFAULT_MAX_N};
use crate::par;
use crate::scenario::{self, derive_seed, generate_instance, DepotPlacement, ScenarioConfig};

/// Fleet, area and catalog shared by every generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioTemplate {
    /// Base seed; per-run seeds are derived from it.
    pub seed: u64,
    pub area_width: f64,
    pub area_height: f64,
    pub depot: DepotPlacement,
    pub drones: usize,
    pub capacity: f64,
    pub speed: f64,
    pub endurance: f64,
    /// Types to spread the `n` assets over, round-robin.
    pub catalog: Vec<AssetType>,
}

impl Default for ScenarioTemplate {
    fn default() -> Self {
        Self {
            seed: 0,
            area_width: scenario::DEFAULT_AREA,
            area_height: scenario::DEFAULT_AREA,
            depot: DepotPlacement::Corner,
            drones: scenario::DEFAULT_DRONES,
            capacity: scenario::DEFAULT_CAPACITY,
            speed: scenario::DEFAULT_SPEED,
            endurance: scenario::DEFAULT_ENDURANCE,
            catalog: scenario::default_catalog(),
        }
    }
}

impl ScenarioTemplate {
    /// The generator config for cell `(n, run)`.
    pub fn config_for(&self, n: usize, run: usize) -> ScenarioConfig {
        ScenarioConfig {
            seed: derive_seed(self.seed, n, run),
            counts: scenario::split_counts(&self.catalog, n),
            area_width: self.area_width,
            area_height: self.area_height,
            depot: self.depot,
            drones: self.drones,
            capacity: self.capacity,
            speed: self.speed,
            endurance: self.endurance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    /// Runs per size; when absent, 30 for `n <= 20` and 10 above.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs_per_n: Option<usize>,
    pub methods: Vec<Method>,
    /// Seconds allowed to each exact solve.
    pub exact_time_limit: f64,
    #[serde(default = "default_true")]
    pub parallel: bool,
    #[serde(default)]
    pub scenario: ScenarioTemplate,
}

fn default_true() -> bool {
    true
}

impl Default for ExperimentConfig {
    /// The runtime sweep: `n` from 10 to 30, exact against the heuristic.
    fn default() -> Self {
        Self {
            n_values: vec![10, 15, 20, 25, 30],
            runs_per_n: None,
            methods: vec![Method::Exact, Method::Gnn],
            exact_time_limit: 60.0,
            parallel: true,
            scenario: ScenarioTemplate::default(),
        }
    }
}

impl ExperimentConfig {
    /// `runs` paired runs at a single size, e.g. the cost-distribution study
    /// at `n = 15` with 50 runs.
    pub fn fixed_n(n: usize, runs: usize) -> Self {
        Self {
            n_values: vec![n],
            runs_per_n: Some(runs),
            ..Self::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn runs_for(&self, n: usize) -> usize {
        self.runs_per_n.unwrap_or(if n <= 20 { 30 } else { 10 })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return bad("n_values must be non-empty and positive");
        }
        if self.runs_per_n == Some(0) {
            return bad("runs_per_n must be at least 1");
        }
        if self.methods.is_empty() {
            return bad("methods must be non-empty");
        }
        if self.methods.contains(&Method::External) {
            return bad("method `external` cannot be benchmarked");
        }
        if !(self.exact_time_limit > 0.0 && self.exact_time_limit.is_finite()) {
            return bad("exact_time_limit must be a positive number of seconds");
        }
        if self.scenario.catalog.is_empty() {
            return bad("scenario.catalog must be non-empty");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Optimal,
    FeasibleTimeout,
    NodeLimit,
    Infeasible,
    /// A heuristic solution with no optimality claim.
    Heuristic,
    /// The solver returned an error; see [`RunRecord::detail`].
    Error,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::FeasibleTimeout => "feasible_timeout",
            Self::NodeLimit => "node_limit",
            Self::Infeasible => "infeasible",
            Self::Heuristic => "heuristic",
            Self::Error => "error",
        }
    }
}

impl From<SolveStatus> for RunStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Optimal => Self::Optimal,
            SolveStatus::FeasibleTimeout => Self::FeasibleTimeout,
            SolveStatus::NodeLimit => Self::NodeLimit,
            SolveStatus::Infeasible => Self::Infeasible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n: usize,
    pub run: usize,
    pub method: Method,
    /// Total cost in seconds, present iff the run produced a solution.
    pub cost: Option<f64>,
    pub wall_time: f64,
    pub status: RunStatus,
    pub seed: u64,
    /// Fingerprint of the solved instance; equal across a cell's methods.
    pub instance_hash: u64,
    pub detail: Option<String>,
}

fn instance_hash(instance: &Instance) -> u64 {
    let mut h = FxHasher::default();
    h.write(format!("{instance:?}").as_bytes());
    h.finish()
}

fn solve_one(instance: &Instance, method: Method, time_limit: f64) -> (Option<f64>, f64, RunStatus, Option<String>) {
    let from_result = |r: Result<SolveResult>, elapsed: f64| match r {
        Ok(r) => (r.cost(), elapsed, r.status.into(), None),
        Err(e) => (None, elapsed, RunStatus::Error, Some(e.to_string())),
    };
    let start = Instant::now();
    match method {
        Method::Exact => {
            let cfg = SolveConfig {
                time_limit: Duration::from_secs_f64(time_limit),
                ..SolveConfig::default()
            };
            let r = solve_exact(instance, &cfg);
            from_result(r, start.elapsed().as_secs_f64())
        }
        Method::Brute => {
            let r = solve_bruteforce(instance, DEFAULT_MAX_N);
            from_result(r, start.elapsed().as_secs_f64())
        }
        Method::Gnn => {
            let r = solve_gnn(instance);
            let elapsed = start.elapsed().as_secs_f64();
            match r {
                Ok(sol) => (Some(sol.total_cost), elapsed, RunStatus::Heuristic, None),
                Err(e) => (None, elapsed, RunStatus::Error, Some(e.to_string())),
            }
        }
        Method::External => (None, 0.0, RunStatus::Error, Some("not a solver".into())),
    }
}

/// Runs every method on every `(n, run)` cell. Solver failures become
/// records with [`RunStatus::Error`]; only an invalid config is an error.
pub fn run_comparison(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let cells: Vec<(usize, usize)> = config
        .n_values
        .iter()
        .flat_map(|&n| (0..config.runs_for(n)).map(move |run| (n, run)))
        .collect();

    let per_cell = par::map(&cells, config.parallel, |&(n, run)| {
        let scenario = config.scenario.config_for(n, run);
        let instance = generate_instance(&scenario);
        config
            .methods
            .iter()
            .map(|&method| {
                let (cost, wall_time, status, detail, hash) = match &instance {
                    Ok(inst) => {
                        let (c, w, s, d) = solve_one(inst, method, config.exact_time_limit);
                        (c, w, s, d, instance_hash(inst))
                    }
                    Err(e) => (None, 0.0, RunStatus::Error, Some(e.to_string()), 0),
                };
                RunRecord {
                    n,
                    run,
                    method,
                    cost,
                    wall_time,
                    status,
                    seed: scenario.seed,
                    instance_hash: hash,
                    detail,
                }
            })
            .collect::<Vec<_>>()
    });

    let mut records: Vec<RunRecord> = per_cell.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.n, r.run, r.method));
    Ok(records)
}

/// Empirical CDF: one step per distinct sample value, fraction `k / N`.
pub fn compute_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("CDF samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (k, &v) in sorted.iter().enumerate() {
        let frac = (k + 1) as f64 / total;
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 = frac,
            _ => out.push((v, frac)),
        }
    }
    Ok(out)
}

/// Value of a step CDF at `x`.
pub fn cdf_at(cdf: &[(f64, f64)], x: f64) -> f64 {
    cdf.iter().take_while(|p| p.0 <= x).last().map_or(0.0, |p| p.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    TableText,
    Csv,
    SvgPlots,
}

pub const CSV_HEADER: &str = "n,run,method,cost_s,wall_time_s,status,seed";

pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let cost = r.cost.map(|c| c.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{},{},{}", r.n, r.run, r.method, cost, r.wall_time, r.status.as_str(), r.seed);
    }
    out
}

/// Per `(n, method)` summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub method: Method,
    pub runs: usize,
    pub optimal: usize,
    /// Costs of runs that produced a solution.
    pub costs: Vec<f64>,
    pub wall_times: Vec<f64>,
}

impl Summary {
    pub fn mean_cost(&self) -> Option<f64> {
        (!self.costs.is_empty()).then(|| self.costs.iter().sum::<f64>() / self.costs.len() as f64)
    }

    pub fn min_cost(&self) -> Option<f64> {
        self.costs.iter().copied().reduce(f64::min)
    }

    pub fn max_cost(&self) -> Option<f64> {
        self.costs.iter().copied().reduce(f64::max)
    }

    pub fn median_wall_time(&self) -> f64 {
        median(&self.wall_times)
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

pub fn summarize(records: &[RunRecord]) -> Vec<Summary> {
    let mut groups: BTreeMap<(usize, Method), Summary> = BTreeMap::new();
    for r in records {
        let s = groups.entry((r.n, r.method)).or_insert_with(|| Summary {
            n: r.n,
            method: r.method,
            runs: 0,
            optimal: 0,
            costs: Vec::new(),
            wall_times: Vec::new(),
        });
        s.runs += 1;
        s.optimal += usize::from(r.status == RunStatus::Optimal);
        s.costs.extend(r.cost);
        s.wall_times.push(r.wall_time);
    }
    groups.into_values().collect()
}

pub fn format_table(records: &[RunRecord]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"));
    let mut out = format!(
        "{:>4}  {:<6} {:>5} {:>8} {:>12} {:>12} {:>12} {:>14}\n",
        "n", "method", "runs", "optimal", "mean_cost_s", "min_cost_s", "max_cost_s", "median_wall_s"
    );
    for s in summarize(records) {
        let _ = writeln!(
            out,
            "{:>4}  {:<6} {:>5} {:>8} {:>12} {:>12} {:>12} {:>14.6}",
            s.n,
            s.method.to_string(),
            s.runs,
            s.optimal,
            opt(s.mean_cost()),
            opt(s.min_cost()),
            opt(s.max_cost()),
            s.median_wall_time()
        );
    }
    out
}

/// Writes the report files for `format` into `outdir` (created if needed)
/// and returns their paths. Every number is recomputed from `records`.
pub fn emit_report(records: &[RunRecord], format: ReportFormat, outdir: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::EmptySamples);
    }
    std::fs::create_dir_all(outdir)?;
    let files: Vec<(&str, String)> = match format {
        ReportFormat::TableText => vec![("summary.txt", format_table(records))],
        ReportFormat::Csv => vec![("runs.csv", records_to_csv(records))],
        ReportFormat::SvgPlots => vec![
            ("runtime_vs_n.svg", svg::runtime_vs_n(records)),
            ("cost_cdf.svg", svg::cost_cdf(records)?),
            ("cost_vs_n.svg", svg::cost_vs_n(records)),
        ],
    };
    let mut paths = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = outdir.join(name);
        std::fs::write(&path, body)?;
        paths.push(path);
    }
    Ok(paths)
}

mod svg {
    use super::*;

    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 150.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 55.0;

    fn color(method: Method) -> &'static str {
        match method {
            Method::Exact => "#1f77b4",
            Method::Gnn => "#d62728",
            Method::Brute => "#2ca02c",
            Method::External => "#7f7f7f",
        }
    }

    struct Frame {
        x: (f64, f64),
        y: (f64, f64),
        log_y: bool,
    }

    impl Frame {
        fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone, log_y: bool) -> Self {
            let span = |it: &mut dyn Iterator<Item = f64>| {
                it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
            };
            let mut x = span(&mut xs.clone());
            let mut y = if log_y {
                let (lo, hi) = span(&mut ys.clone().filter(|v| *v > 0.0));
                (lo.log10().floor(), hi.log10().ceil())
            } else {
                span(&mut ys.clone())
            };
            for r in [&mut x, &mut y] {
                if !r.0.is_finite() || !r.1.is_finite() {
                    *r = (0.0, 1.0);
                }
                if r.1 - r.0 < 1e-12 {
                    *r = (r.0 - 0.5, r.1 + 0.5);
                }
            }
            if !log_y {
                let pad = 0.05 * (y.1 - y.0);
                y = (y.0 - pad, y.1 + pad);
            }
            Self { x, y, log_y }
        }

        fn px(&self, v: f64) -> f64 {
            LEFT + (v - self.x.0) / (self.x.1 - self.x.0) * (W - LEFT - RIGHT)
        }

        fn py(&self, v: f64) -> f64 {
            let v = if self.log_y { v.max(10f64.powf(self.y.0)).log10() } else { v };
            H - BOTTOM - (v - self.y.0) / (self.y.1 - self.y.0) * (H - TOP - BOTTOM)
        }

        fn axes(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str, x_ticks: &[f64]) {
            let (x0, x1, y0, y1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
            let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#, (x0 + x1) / 2.0);
            let _ = writeln!(out, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0);
            for &t in x_ticks {
                let x = self.px(t);
                let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle" font-size="11">{}</text>"#, y1 + 5.0, y1 + 18.0, tick_label(t));
            }
            let y_ticks: Vec<f64> = if self.log_y {
                (self.y.0 as i32..=self.y.1 as i32).map(|e| 10f64.powi(e)).collect()
            } else {
                (0..=5).map(|k| self.y.0 + (self.y.1 - self.y.0) * k as f64 / 5.0).collect()
            };
            for t in y_ticks {
                let y = self.py(t);
                let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#, x0 - 5.0, x0 - 8.0, y + 4.0, tick_label(t));
            }
            let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{xlabel}</text>"#, (x0 + x1) / 2.0, H - 12.0);
            let _ = writeln!(out, r#"<text x="18" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 18 {})">{ylabel}</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0);
        }
    }

    fn tick_label(v: f64) -> String {
        if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e5) {
            format!("{v:.0e}")
        } else if v.fract() == 0.0 {
            format!("{v:.0}")
        } else {
            format!("{v:.2}")
        }
    }

    fn legend(out: &mut String, entries: &[(String, &str)]) {
        for (k, (label, col)) in entries.iter().enumerate() {
            let y = TOP + 10.0 + 18.0 * k as f64;
            let x = W - RIGHT + 12.0;
            let _ = writeln!(out, r#"<rect x="{x}" y="{}" width="12" height="12" fill="{col}"/><text x="{}" y="{}" font-size="11">{label}</text>"#, y - 10.0, x + 18.0, y);
        }
    }

    fn document(body: String) -> String {
        format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n")
    }

    fn methods(records: &[RunRecord]) -> Vec<Method> {
        let mut m: Vec<Method> = records.iter().map(|r| r.method).collect();
        m.sort();
        m.dedup();
        m
    }

    fn n_ticks(records: &[RunRecord]) -> Vec<f64> {
        let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns.into_iter().map(|n| n as f64).collect()
    }

    /// Every run's wall time against `n`, log-scaled, with the per-method
    /// median joined by a line.
    pub(super) fn runtime_vs_n(records: &[RunRecord]) -> String {
        let frame = Frame::new(
            records.iter().map(|r| r.n as f64),
            records.iter().map(|r| r.wall_time),
            true,
        );
        let mut body = String::new();
        frame.axes(&mut body, "Wall time vs. number of assets", "assets n", "wall time (s, log scale)", &n_ticks(records));
        let summaries = summarize(records);
        let mut entries = Vec::new();
        for method in methods(records) {
            let col = color(method);
            let pts: Vec<String> = summaries
                .iter()
                .filter(|s| s.method == method)
                .map(|s| format!("{:.2},{:.2}", frame.px(s.n as f64), frame.py(s.median_wall_time())))
                .collect();
            let _ = writeln!(body, r#"<polyline points="{}" fill="none" stroke="{col}" stroke-width="1.5"/>"#, pts.join(" "));
            for r in records.iter().filter(|r| r.method == method) {
                let _ = writeln!(
                    body,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{col}" fill-opacity="0.6" data-n="{}" data-run="{}" data-method="{}" data-wall-time="{}" data-status="{}"/>"#,
                    frame.px(r.n as f64),
                    frame.py(r.wall_time),
                    r.n,
                    r.run,
                    r.method,
                    r.wall_time,
                    r.status.as_str()
                );
            }
            entries.push((method.to_string(), col));
        }
        legend(&mut body, &entries);
        document(body)
    }

    /// Empirical cost CDFs per `(n, method)`. Exact and brute-force runs
    /// enter only when proven optimal; heuristic runs always do.
    pub(super) fn cost_cdf(records: &[RunRecord]) -> Result<String> {
        let eligible = |r: &RunRecord| {
            r.cost.is_some() && matches!(r.status, RunStatus::Optimal | RunStatus::Heuristic)
        };
        let used: Vec<&RunRecord> = records.iter().filter(|r| eligible(r)).collect();
        let frame = Frame::new(used.iter().filter_map(|r| r.cost), [0.0, 1.0].into_iter(), false);
        let mut body = String::new();
        let ticks: Vec<f64> = (0..=4).map(|k| frame.x.0 + (frame.x.1 - frame.x.0) * k as f64 / 4.0).collect();
        frame.axes(&mut body, "Cost distribution over paired runs", "total cost (s)", "cumulative fraction", &ticks);
        let mut series: BTreeMap<(usize, Method), Vec<f64>> = BTreeMap::new();
        for r in &used {
            series.entry((r.n, r.method)).or_default().extend(r.cost);
        }
        let multi_n = series.keys().map(|k| k.0).collect::<std::collections::BTreeSet<_>>().len() > 1;
        let dashes = ["", "6 3", "2 2", "8 2 2 2"];
        let mut entries = Vec::new();
        for (k, ((n, method), costs)) in series.iter().enumerate() {
            let cdf = compute_cdf(costs)?;
            let col = color(*method);
            let mut d = format!("M {:.2} {:.2}", frame.px(cdf[0].0), frame.py(0.0));
            let mut prev = 0.0;
            for &(v, f) in &cdf {
                let _ = write!(d, " L {:.2} {:.2} L {:.2} {:.2}", frame.px(v), frame.py(prev), frame.px(v), frame.py(f));
                prev = f;
            }
            let _ = write!(d, " L {:.2} {:.2}", frame.px(frame.x.1), frame.py(1.0));
            let dash = if multi_n { dashes[k % dashes.len()] } else { "" };
            let _ = writeln!(body, r#"<path d="{d}" fill="none" stroke="{col}" stroke-width="1.5" stroke-dasharray="{dash}" data-n="{n}" data-method="{method}"/>"#);
            for &(v, f) in &cdf {
                let _ = writeln!(
                    body,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{col}" data-n="{n}" data-method="{method}" data-cost="{v}" data-fraction="{f}"/>"#,
                    frame.px(v),
                    frame.py(f)
                );
            }
            let label = if multi_n { format!("{method} (n={n})") } else { format!("{method} (runs={})", costs.len()) };
            entries.push((label, col));
        }
        legend(&mut body, &entries);
        Ok(document(body))
    }

    /// Mean cost per `(n, method)` over runs that produced a solution, with
    /// min/max whiskers.
    pub(super) fn cost_vs_n(records: &[RunRecord]) -> String {
        let summaries: Vec<Summary> = summarize(records).into_iter().filter(|s| !s.costs.is_empty()).collect();
        let frame = Frame::new(
            summaries.iter().map(|s| s.n as f64),
            summaries.iter().flat_map(|s| [s.min_cost().unwrap_or(0.0), s.max_cost().unwrap_or(0.0)]),
            false,
        );
        let mut body = String::new();
        frame.axes(&mut body, "Mean total cost vs. number of assets", "assets n", "total cost (s)", &n_ticks(records));
        let all = methods(records);
        let mut entries = Vec::new();
        for (k, method) in all.iter().enumerate() {
            let col = color(*method);
            // nudge methods apart so whiskers do not overlap
            let shift = (k as f64 - (all.len() as f64 - 1.0) / 2.0) * 6.0;
            let mut pts = Vec::new();
            for s in summaries.iter().filter(|s| s.method == *method) {
                let (mean, lo, hi) = (s.mean_cost().unwrap_or(0.0), s.min_cost().unwrap_or(0.0), s.max_cost().unwrap_or(0.0));
                let x = frame.px(s.n as f64) + shift;
                pts.push(format!("{x:.2},{:.2}", frame.py(mean)));
                let _ = writeln!(body, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{col}" data-n="{}" data-method="{method}" data-min="{lo}" data-max="{hi}"/>"#, frame.py(lo), frame.py(hi), s.n);
                let _ = writeln!(
                    body,
                    r#"<circle cx="{x:.2}" cy="{:.2}" r="3.5" fill="{col}" data-n="{}" data-method="{method}" data-mean="{mean}" data-count="{}" data-optimal="{}"/>"#,
                    frame.py(mean),
                    s.n,
                    s.costs.len(),
                    s.optimal
                );
            }
            let _ = writeln!(body, r#"<polyline points="{}" fill="none" stroke="{col}" stroke-width="1.5"/>"#, pts.join(" "));
            entries.push((method.to_string(), col));
        }
        legend(&mut body, &entries);
        document(body)
    }
}
