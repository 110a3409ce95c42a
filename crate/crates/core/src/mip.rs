//! The two-index CVRP integer program with Miller–Tucker–Zemlin load
//! constraints.
//!
//! Variables are the arc indicators `x[i][j]` (`i != j`, depot = 0) and the
//! cumulative loads `u[i]` for assets. The MTZ rows read
//! `u[i] - u[j] + Q x[i][j] <= Q - q[j]`, so an arc `i → j` forces
//! `u[j] >= u[i] + q[j]`, and the bounds `q[i] <= u[i] <= Q` cap each route's
//! delivered volume.
//!
//! The program is never handed to a solver here; it is the reference
//! definition of feasibility that solver output is checked against, and it
//! can be exported in LP format for external cross-checks.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::model::{CostMatrix, Instance, Method, Solution};

/// Residual beyond which a row counts as violated.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// `x[i][j]`, binary.
    Arc(usize, usize),
    /// `u[i]`, continuous.
    Load(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Arc(i, j) => write!(f, "x_{i}_{j}"),
            Var::Load(i) => write!(f, "u_{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coefficients: BTreeMap<Var, f64>,
    pub relation: Relation,
    pub rhs: f64,
    /// Stable name such as `visit_in[3]` or `mtz[1][2]`.
    pub tag: String,
}

impl LinearConstraint {
    fn lhs(&self, a: &Assignment) -> f64 {
        self.coefficients.iter().map(|(v, c)| c * a.value(*v)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModelOptions {
    /// Extension: relax the depot rows to `<= m`, allowing idle drones.
    pub allow_idle_drones: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegerProgram {
    pub n: usize,
    pub m: usize,
    pub capacity: f64,
    pub arc_vars: Vec<(usize, usize)>,
    pub load_vars: Vec<usize>,
    /// `(q[i], Q)` per entry of `load_vars`.
    pub load_bounds: Vec<(f64, f64)>,
    pub objective: BTreeMap<Var, f64>,
    pub constraints: Vec<LinearConstraint>,
}

impl IntegerProgram {
    pub fn rows_tagged<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a LinearConstraint> {
        self.constraints.iter().filter(move |c| c.tag.starts_with(prefix))
    }

    /// Objective value of an assignment.
    pub fn objective_value(&self, a: &Assignment) -> f64 {
        self.objective.iter().map(|(v, c)| c * a.value(*v)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment {
    pub arc_values: BTreeMap<(usize, usize), bool>,
    pub load_values: BTreeMap<usize, f64>,
}

impl Assignment {
    fn value(&self, v: Var) -> f64 {
        match v {
            Var::Arc(i, j) => f64::from(u8::from(self.arc_values.get(&(i, j)).copied().unwrap_or(false))),
            Var::Load(i) => self.load_values.get(&i).copied().unwrap_or(0.0),
        }
    }

    /// All-zero assignment over the program's variables.
    pub fn zeros(program: &IntegerProgram) -> Self {
        Self {
            arc_values: program.arc_vars.iter().map(|&a| (a, false)).collect(),
            load_values: program.load_vars.iter().map(|&i| (i, 0.0)).collect(),
        }
    }
}

/// Builds the routing program with the printed equality depot rows.
pub fn build_cvrp_model(instance: &Instance, costs: &CostMatrix) -> Result<IntegerProgram> {
    build_cvrp_model_with(instance, costs, ModelOptions::default())
}

pub fn build_cvrp_model_with(instance: &Instance, costs: &CostMatrix, options: ModelOptions) -> Result<IntegerProgram> {
    let n = instance.n();
    let m = instance.drones;
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if m > n && !options.allow_idle_drones {
        return Err(Error::TooManyDrones { m, n });
    }
    let q = instance.demands()?;
    let cap = instance.capacity;

    let arc_vars: Vec<(usize, usize)> = (0..=n)
        .flat_map(|i| (0..=n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let load_vars: Vec<usize> = (1..=n).collect();
    let load_bounds = load_vars.iter().map(|&i| (q[i], cap)).collect();
    let objective = arc_vars.iter().map(|&(i, j)| (Var::Arc(i, j), costs.cost(i, j))).collect();

    let row = |coefficients: BTreeMap<Var, f64>, relation, rhs, tag: String| LinearConstraint {
        coefficients,
        relation,
        rhs,
        tag,
    };
    let mut constraints = Vec::with_capacity(2 * n + 2 + n * n.saturating_sub(1));
    for j in 1..=n {
        let c = (0..=n).filter(|&i| i != j).map(|i| (Var::Arc(i, j), 1.0)).collect();
        constraints.push(row(c, Relation::Eq, 1.0, format!("visit_in[{j}]")));
    }
    for i in 1..=n {
        let c = (0..=n).filter(|&j| j != i).map(|j| (Var::Arc(i, j), 1.0)).collect();
        constraints.push(row(c, Relation::Eq, 1.0, format!("visit_out[{i}]")));
    }
    let depot_rel = if options.allow_idle_drones { Relation::Le } else { Relation::Eq };
    let into: BTreeMap<Var, f64> = (1..=n).map(|i| (Var::Arc(i, 0), 1.0)).collect();
    let out: BTreeMap<Var, f64> = (1..=n).map(|j| (Var::Arc(0, j), 1.0)).collect();
    constraints.push(row(out, depot_rel, m as f64, "depot_out".into()));
    constraints.push(row(into, depot_rel, m as f64, "depot_in".into()));
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let c = BTreeMap::from([(Var::Load(i), 1.0), (Var::Load(j), -1.0), (Var::Arc(i, j), cap)]);
            constraints.push(row(c, Relation::Le, cap - q[j], format!("mtz[{i}][{j}]")));
        }
    }

    Ok(IntegerProgram {
        n,
        m,
        capacity: cap,
        arc_vars,
        load_vars,
        load_bounds,
        objective,
        constraints,
    })
}

fn check_domain(program: &IntegerProgram, a: &Assignment) -> Result<()> {
    let arcs_match = a.arc_values.len() == program.arc_vars.len()
        && program.arc_vars.iter().all(|k| a.arc_values.contains_key(k));
    let loads_match = a.load_values.len() == program.load_vars.len()
        && program.load_vars.iter().all(|k| a.load_values.contains_key(k));
    match (arcs_match, loads_match) {
        (true, true) => Ok(()),
        (false, _) => Err(Error::DomainMismatch(format!(
            "expected {} arc values, got {}",
            program.arc_vars.len(),
            a.arc_values.len()
        ))),
        (_, false) => Err(Error::DomainMismatch(format!(
            "expected {} load values, got {}",
            program.load_vars.len(),
            a.load_values.len()
        ))),
    }
}

/// Every violated row as `(tag, lhs - rhs)`; empty means feasible.
///
/// Load bounds are reported under `bounds[i]` with `u[i] - q[i]` (negative)
/// or `u[i] - Q` (positive).
pub fn verify_assignment(program: &IntegerProgram, assignment: &Assignment) -> Result<Vec<(String, f64)>> {
    check_domain(program, assignment)?;
    let mut out = Vec::new();
    for row in &program.constraints {
        let r = row.lhs(assignment) - row.rhs;
        let broken = match row.relation {
            Relation::Eq => r.abs() > FEASIBILITY_TOL,
            Relation::Le => r > FEASIBILITY_TOL,
        };
        if broken {
            out.push((row.tag.clone(), r));
        }
    }
    for (&i, &(lo, hi)) in program.load_vars.iter().zip(&program.load_bounds) {
        let u = assignment.load_values[&i];
        if u < lo - FEASIBILITY_TOL {
            out.push((format!("bounds[{i}]"), u - lo));
        } else if u > hi + FEASIBILITY_TOL {
            out.push((format!("bounds[{i}]"), u - hi));
        }
    }
    Ok(out)
}

/// Follows the arcs leaving the depot without checking any constraint.
///
/// Returns `None` when some node has several successors, when a walk
/// revisits a node or does not return to the depot. Arcs not reachable from
/// the depot (subtours) are ignored; callers compare against the full arc
/// set if they care.
pub fn trace_routes(n: usize, assignment: &Assignment) -> Option<Vec<Vec<usize>>> {
    let mut succ = vec![None; n + 1];
    for (&(i, j), &on) in &assignment.arc_values {
        if on && i != 0 {
            if succ[i].is_some() {
                return None;
            }
            succ[i] = Some(j);
        }
    }
    let mut seen = vec![false; n + 1];
    let mut routes = Vec::new();
    for j in 1..=n {
        if !assignment.arc_values.get(&(0, j)).copied().unwrap_or(false) {
            continue;
        }
        let mut stops = Vec::new();
        let mut at = j;
        while at != 0 {
            if seen[at] {
                return None;
            }
            seen[at] = true;
            stops.push(at);
            at = succ[at]?;
        }
        routes.push(stops);
    }
    Some(routes)
}

/// Turns a feasible assignment into routes, ordered by first stop.
pub fn decode_assignment(instance: &Instance, assignment: &Assignment) -> Result<Solution> {
    let costs = crate::model::build_cost_matrix(instance)?;
    let program = build_cvrp_model(instance, &costs)?;
    if let Some((tag, _)) = verify_assignment(&program, assignment)?.into_iter().next() {
        return Err(Error::InfeasibleAssignment(tag));
    }
    let tours = trace_routes(instance.n(), assignment)
        .ok_or_else(|| Error::InfeasibleAssignment("route structure".into()))?;
    Solution::from_tours(instance, &costs, tours, Method::External)
}

/// Arc indicators of a solution, with `u` set to the cumulative delivered
/// volume along each route.
pub fn encode_solution(instance: &Instance, solution: &Solution) -> Result<Assignment> {
    let n = instance.n();
    let mut a = Assignment {
        arc_values: (0..=n)
            .flat_map(|i| (0..=n).filter(move |&j| j != i).map(move |j| ((i, j), false)))
            .collect(),
        load_values: (1..=n).map(|i| (i, 0.0)).collect(),
    };
    for r in &solution.routes {
        let mut prev = 0;
        let mut load = 0.0;
        for &s in &r.stops {
            if s == 0 || s > n {
                return Err(Error::UnknownAsset(s));
            }
            a.arc_values.insert((prev, s), true);
            load += instance.demand(s)?;
            a.load_values.insert(s, load);
            prev = s;
        }
        if prev != 0 {
            a.arc_values.insert((prev, 0), true);
        }
    }
    Ok(a)
}

fn lp_name(tag: &str) -> String {
    tag.replace("][", "_").replace(['[', ']'], "_").trim_end_matches('_').to_string()
}

fn write_terms(out: &mut String, terms: &BTreeMap<Var, f64>) {
    for (k, (v, c)) in terms.iter().enumerate() {
        let sign = if *c < 0.0 { '-' } else { '+' };
        if k == 0 && sign == '+' {
            write!(out, " {} {v}", c.abs()).unwrap();
        } else {
            write!(out, " {sign} {} {v}", c.abs()).unwrap();
        }
    }
}

/// Writes the program in CPLEX LP format. Row names are the constraint tags
/// with brackets turned into underscores (`mtz[1][2]` → `mtz_1_2`).
pub fn export_lp(program: &IntegerProgram) -> String {
    let mut out = String::new();
    out.push_str("\\ capacitated drone routing, two-index formulation with MTZ rows\n");
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, &program.objective);
    out.push_str("\nSubject To\n");
    for row in &program.constraints {
        write!(out, " {}:", lp_name(&row.tag)).unwrap();
        write_terms(&mut out, &row.coefficients);
        let rel = match row.relation {
            Relation::Eq => "=",
            Relation::Le => "<=",
        };
        writeln!(out, " {rel} {}", row.rhs).unwrap();
    }
    out.push_str("Bounds\n");
    for (&i, &(lo, hi)) in program.load_vars.iter().zip(&program.load_bounds) {
        writeln!(out, " {lo} <= {} <= {hi}", Var::Load(i)).unwrap();
    }
    out.push_str("Binary\n");
    for &(i, j) in &program.arc_vars {
        writeln!(out, " {}", Var::Arc(i, j)).unwrap();
    }
    out.push_str("End\n");
    out
}

/// LP text read back into plain name-keyed tables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpFile {
    pub objective: BTreeMap<String, f64>,
    /// `(name, coefficients, relation, rhs)`.
    pub rows: Vec<(String, BTreeMap<String, f64>, String, f64)>,
    pub bounds: BTreeMap<String, (f64, f64)>,
    pub binaries: Vec<String>,
}

fn parse_terms(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut terms = BTreeMap::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for tok in text.split_whitespace() {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            t => {
                if let Ok(v) = t.parse::<f64>() {
                    coef = Some(v);
                } else {
                    terms.insert(t.to_string(), sign * coef.take().unwrap_or(1.0));
                    sign = 1.0;
                }
            }
        }
    }
    if coef.is_some() {
        return Err(Error::Parse(format!("dangling coefficient in `{text}`")));
    }
    Ok(terms)
}

/// Minimal reader for the subset of LP format written by [`export_lp`].
pub fn parse_lp(text: &str) -> Result<LpFile> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Objective,
        Rows,
        Bounds,
        Binary,
    }
    let mut lp = LpFile::default();
    let mut section = Section::None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
        match line {
            "Minimize" => section = Section::Objective,
            "Subject To" => section = Section::Rows,
            "Bounds" => section = Section::Bounds,
            "Binary" => section = Section::Binary,
            "End" => break,
            _ => match section {
                Section::Objective => {
                    let body = line.split_once(':').map_or(line, |(_, b)| b);
                    lp.objective.extend(parse_terms(body)?);
                }
                Section::Rows => {
                    let (name, body) = line.split_once(':').ok_or_else(|| bad("row without name"))?;
                    let (rel, (lhs, rhs)) = ["<=", ">=", "="]
                        .iter()
                        .find_map(|r| body.split_once(r).map(|p| (*r, p)))
                        .ok_or_else(|| bad("row without relation"))?;
                    let rhs: f64 = rhs.trim().parse().map_err(|_| bad("bad right-hand side"))?;
                    lp.rows.push((name.trim().to_string(), parse_terms(lhs)?, rel.to_string(), rhs));
                }
                Section::Bounds => {
                    let parts: Vec<&str> = line.split("<=").map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(bad("expected `lo <= var <= hi`"));
                    }
                    let lo = parts[0].parse().map_err(|_| bad("bad lower bound"))?;
                    let hi = parts[2].parse().map_err(|_| bad("bad upper bound"))?;
                    lp.bounds.insert(parts[1].to_string(), (lo, hi));
                }
                Section::Binary => lp.binaries.extend(line.split_whitespace().map(String::from)),
                Section::None => return Err(bad("content before `Minimize`")),
            },
        }
    }
    Ok(lp)
}
