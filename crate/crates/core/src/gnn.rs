//! Greedy nearest-neighbor heuristic: capacitated p-median clustering
//! followed by nearest-neighbor routing inside each cluster.
//!
//! Phase 1 picks `K = m` medians among the assets and assigns every asset to
//! one open median, minimizing the summed maintenance cost `C[median][asset]`
//! while keeping each cluster's demand within the drone capacity. Up to
//! [`EXACT_CLUSTER_LIMIT`] assets this is solved exactly: every median subset
//! is enumerated, pruned by its uncapacitated assignment cost, and assigned
//! optimally by a small branch-and-bound. Larger instances use farthest-point
//! seeding and single-median swaps.
//!
//! Phase 2 flies depot → median, then always to the cheapest unvisited
//! member (ties to the lowest id), then home.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{
    build_cost_matrix, has_hard_violations, validate_instance, CostMatrix, Instance, Method, Route,
    Solution, COST_EPS,
};

/// Largest asset count clustered exactly.
pub const EXACT_CLUSTER_LIMIT: usize = 20;

/// Node budget for one capacitated assignment search.
const ASSIGN_NODE_LIMIT: u64 = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub k: usize,
    /// Median asset ids, ascending.
    pub medians: Vec<usize>,
    /// Asset id → median id. Medians map to themselves.
    pub assignment: BTreeMap<usize, usize>,
    /// Median id → liters.
    pub per_cluster_demand: BTreeMap<usize, f64>,
    /// Σ C[median][asset] over all assets.
    pub objective: f64,
}

impl Clustering {
    /// Members of the cluster around `median`, ascending.
    pub fn members(&self, median: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .filter(|&(_, &med)| med == median)
            .map(|(&a, _)| a)
            .collect()
    }
}

/// Problem data for phase 1, indexed by asset id.
struct Phase1<'a> {
    n: usize,
    k: usize,
    capacity: f64,
    demand: Vec<f64>,
    costs: &'a CostMatrix,
}

/// Capacitated assignment of every asset to one of `medians`.
struct Assignment {
    to: Vec<usize>,
    cost: f64,
}

impl Phase1<'_> {
    fn c(&self, median: usize, asset: usize) -> f64 {
        self.costs.cost(median, asset)
    }

    /// Cheapest open median per asset, ignoring capacity. Ties go to the
    /// earlier median in `medians`.
    fn nearest(&self, medians: &[usize]) -> Assignment {
        let mut to = vec![0; self.n + 1];
        let mut cost = 0.0;
        for j in 1..=self.n {
            if medians.contains(&j) {
                to[j] = j;
                cost += self.c(j, j);
                continue;
            }
            let mut best = medians[0];
            for &i in &medians[1..] {
                if self.c(i, j) < self.c(best, j) {
                    best = i;
                }
            }
            to[j] = best;
            cost += self.c(best, j);
        }
        Assignment { to, cost }
    }

    fn loads(&self, medians: &[usize], to: &[usize]) -> Vec<f64> {
        medians
            .iter()
            .map(|&i| (1..=self.n).filter(|&j| to[j] == i).map(|j| self.demand[j]).sum())
            .collect()
    }

    fn fits(&self, medians: &[usize], to: &[usize]) -> bool {
        self.loads(medians, to).iter().all(|&l| l <= self.capacity + COST_EPS)
    }

    /// Optimal capacitated assignment below `cutoff`, or `None`.
    ///
    /// Depth-first over assets in decreasing regret order, bounded by the
    /// uncapacitated cost of the assets still unassigned.
    fn assign_exact(&self, medians: &[usize], cutoff: f64) -> Option<Assignment> {
        let free = self.nearest(medians);
        if free.cost >= cutoff {
            return None;
        }
        if self.fits(medians, &free.to) {
            return Some(free);
        }

        let mut load = vec![0.0; medians.len()];
        let mut fixed = 0.0;
        for (slot, &i) in medians.iter().enumerate() {
            load[slot] = self.demand[i];
            fixed += self.c(i, i);
        }
        if load.iter().any(|&l| l > self.capacity + COST_EPS) {
            return None;
        }
        let mut items: Vec<usize> = (1..=self.n).filter(|j| !medians.contains(j)).collect();
        let options: Vec<Vec<(f64, usize)>> = (0..=self.n)
            .map(|j| {
                let mut o: Vec<(f64, usize)> =
                    medians.iter().enumerate().map(|(slot, &i)| (self.c(i, j), slot)).collect();
                o.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                o
            })
            .collect();
        let regret = |j: usize| {
            let o = &options[j];
            if o.len() > 1 { o[1].0 - o[0].0 } else { 0.0 }
        };
        items.sort_by(|&a, &b| {
            regret(b)
                .total_cmp(&regret(a))
                .then(self.demand[b].total_cmp(&self.demand[a]))
                .then(a.cmp(&b))
        });
        // suffix sums of each item's cheapest option
        let mut tail = vec![0.0; items.len() + 1];
        for t in (0..items.len()).rev() {
            tail[t] = tail[t + 1] + options[items[t]][0].0;
        }

        struct Dfs<'b> {
            items: &'b [usize],
            options: &'b [Vec<(f64, usize)>],
            tail: &'b [f64],
            demand: &'b [f64],
            capacity: f64,
            load: Vec<f64>,
            pick: Vec<usize>,
            best: Option<(f64, Vec<usize>)>,
            cutoff: f64,
            nodes: u64,
        }
        impl Dfs<'_> {
            fn go(&mut self, t: usize, cost: f64) {
                self.nodes += 1;
                if self.nodes > ASSIGN_NODE_LIMIT {
                    return;
                }
                if t == self.items.len() {
                    if cost < self.cutoff {
                        self.cutoff = cost;
                        self.best = Some((cost, self.pick.clone()));
                    }
                    return;
                }
                let j = self.items[t];
                for &(c, slot) in &self.options[j] {
                    if cost + c + self.tail[t + 1] >= self.cutoff {
                        // options are sorted, later ones cannot do better
                        break;
                    }
                    if self.load[slot] + self.demand[j] > self.capacity + COST_EPS {
                        continue;
                    }
                    self.load[slot] += self.demand[j];
                    self.pick[t] = slot;
                    self.go(t + 1, cost + c);
                    self.load[slot] -= self.demand[j];
                }
            }
        }
        let mut dfs = Dfs {
            items: &items,
            options: &options,
            tail: &tail,
            demand: &self.demand,
            capacity: self.capacity,
            load,
            pick: vec![0; items.len()],
            best: None,
            cutoff: cutoff - fixed,
            nodes: 0,
        };
        dfs.go(0, 0.0);
        let (cost, pick) = dfs.best?;
        let mut to = vec![0; self.n + 1];
        for &i in medians {
            to[i] = i;
        }
        for (t, &j) in items.iter().enumerate() {
            to[j] = medians[pick[t]];
        }
        Some(Assignment { to, cost: cost + fixed })
    }

    /// Greedy capacitated assignment improved by shifts and swaps.
    fn assign_greedy(&self, medians: &[usize]) -> Option<Assignment> {
        let free = self.nearest(medians);
        let slot_of = |i: usize| medians.iter().position(|&m| m == i).unwrap();
        let mut to = free.to.clone();
        if !self.fits(medians, &to) {
            let mut items: Vec<usize> = (1..=self.n).filter(|j| !medians.contains(j)).collect();
            let greedy = |items: &[usize]| -> Option<Vec<usize>> {
                let mut load: Vec<f64> = medians.iter().map(|&i| self.demand[i]).collect();
                let mut to = vec![0; self.n + 1];
                for &i in medians {
                    to[i] = i;
                }
                for &j in items {
                    let mut best: Option<usize> = None;
                    for (slot, &i) in medians.iter().enumerate() {
                        if load[slot] + self.demand[j] > self.capacity + COST_EPS {
                            continue;
                        }
                        if best.is_none_or(|b| self.c(i, j) < self.c(medians[b], j)) {
                            best = Some(slot);
                        }
                    }
                    let slot = best?;
                    load[slot] += self.demand[j];
                    to[j] = medians[slot];
                }
                Some(to)
            };
            let second_gap = |j: usize| {
                let mut c: Vec<f64> = medians.iter().map(|&i| self.c(i, j)).collect();
                c.sort_by(f64::total_cmp);
                if c.len() > 1 { c[1] - c[0] } else { 0.0 }
            };
            items.sort_by(|&a, &b| second_gap(b).total_cmp(&second_gap(a)).then(a.cmp(&b)));
            to = match greedy(&items) {
                Some(t) => t,
                None => {
                    items.sort_by(|&a, &b| self.demand[b].total_cmp(&self.demand[a]).then(a.cmp(&b)));
                    match greedy(&items) {
                        Some(t) => t,
                        None => return self.assign_exact(medians, f64::INFINITY),
                    }
                }
            };
        }

        let mut load = self.loads(medians, &to);
        loop {
            let mut improved = false;
            for j in 1..=self.n {
                if medians.contains(&j) {
                    continue;
                }
                let from = slot_of(to[j]);
                for (slot, &i) in medians.iter().enumerate() {
                    if slot != from
                        && self.c(i, j) < self.c(to[j], j) - COST_EPS
                        && load[slot] + self.demand[j] <= self.capacity + COST_EPS
                    {
                        load[from] -= self.demand[j];
                        load[slot] += self.demand[j];
                        to[j] = i;
                        improved = true;
                        break;
                    }
                }
            }
            for a in 1..=self.n {
                for b in (a + 1)..=self.n {
                    if medians.contains(&a) || medians.contains(&b) || to[a] == to[b] {
                        continue;
                    }
                    let (sa, sb) = (slot_of(to[a]), slot_of(to[b]));
                    let delta = self.c(to[b], a) + self.c(to[a], b) - self.c(to[a], a) - self.c(to[b], b);
                    let la = load[sa] - self.demand[a] + self.demand[b];
                    let lb = load[sb] - self.demand[b] + self.demand[a];
                    if delta < -COST_EPS && la <= self.capacity + COST_EPS && lb <= self.capacity + COST_EPS {
                        load[sa] = la;
                        load[sb] = lb;
                        to.swap(a, b);
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        let cost = (1..=self.n).map(|j| self.c(to[j], j)).sum();
        Some(Assignment { to, cost })
    }

    fn exact(&self) -> Option<(Vec<usize>, Assignment)> {
        let mut best: Option<(Vec<usize>, Assignment)> = None;
        let mut subset: Vec<usize> = (1..=self.k).collect();
        loop {
            let cutoff = best.as_ref().map_or(f64::INFINITY, |b| b.1.cost - COST_EPS);
            if let Some(a) = self.assign_exact(&subset, cutoff) {
                best = Some((subset.clone(), a));
            }
            if !next_combination(&mut subset, self.n) {
                break;
            }
        }
        best
    }

    fn local_search(&self) -> Option<(Vec<usize>, Assignment)> {
        // seed: the 1-median, then repeatedly the asset farthest from the chosen medians
        let total = |i: usize| -> f64 { (1..=self.n).map(|j| self.c(i, j)).sum() };
        let mut first = 1;
        for i in 2..=self.n {
            if total(i) < total(first) {
                first = i;
            }
        }
        let mut medians = vec![first];
        while medians.len() < self.k {
            let gap = |j: usize| medians.iter().map(|&i| self.costs.travel(i, j)).fold(f64::INFINITY, f64::min);
            let next = (1..=self.n)
                .filter(|j| !medians.contains(j))
                .fold(None, |acc: Option<usize>, j| match acc {
                    Some(b) if gap(b) >= gap(j) => Some(b),
                    _ => Some(j),
                })?;
            medians.push(next);
        }
        medians.sort_unstable();
        let mut current = self.assign_greedy(&medians)?;

        loop {
            let mut best_move: Option<(Vec<usize>, Assignment)> = None;
            for out in 0..medians.len() {
                for h in 1..=self.n {
                    if medians.contains(&h) {
                        continue;
                    }
                    let mut cand = medians.clone();
                    cand[out] = h;
                    cand.sort_unstable();
                    let Some(a) = self.assign_greedy(&cand) else { continue };
                    let bar = best_move.as_ref().map_or(current.cost, |b| b.1.cost);
                    if a.cost < bar - COST_EPS {
                        best_move = Some((cand, a));
                    }
                }
            }
            match best_move {
                Some((m, a)) => {
                    medians = m;
                    current = a;
                }
                None => break,
            }
        }
        Some((medians, current))
    }
}

/// Advances `subset` (sorted, values in 1..=n) to the next k-combination.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for pos in (0..k).rev() {
        if subset[pos] < n - (k - 1 - pos) {
            subset[pos] += 1;
            for later in pos + 1..k {
                subset[later] = subset[later - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Capacitated K-median clustering of the assets (phase 1).
pub fn cluster_assets(instance: &Instance, costs: &CostMatrix, k: usize) -> Result<Clustering> {
    let n = instance.n();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("cluster count {k} must lie in 1..={n}")));
    }
    let p = Phase1 {
        n,
        k,
        capacity: instance.capacity,
        demand: instance.demands()?,
        costs,
    };
    let found = if n <= EXACT_CLUSTER_LIMIT { p.exact() } else { p.local_search() };
    let (medians, assignment) = found.ok_or(Error::NoFeasibleClustering { k })?;

    let mut per_cluster_demand: BTreeMap<usize, f64> = medians.iter().map(|&i| (i, 0.0)).collect();
    let mut map = BTreeMap::new();
    for j in 1..=n {
        let med = assignment.to[j];
        map.insert(j, med);
        *per_cluster_demand.get_mut(&med).expect("assigned to an open median") += p.demand[j];
    }
    Ok(Clustering {
        k,
        medians,
        assignment: map,
        per_cluster_demand,
        objective: assignment.cost,
    })
}

/// Nearest-neighbor tour of one cluster, entering at its median (phase 2).
pub fn route_cluster(instance: &Instance, costs: &CostMatrix, cluster: &[usize], median: usize) -> Result<Route> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster);
    }
    if !cluster.contains(&median) {
        return Err(Error::InvalidParameter(format!("median {median} is not in its cluster")));
    }
    let mut remaining: Vec<usize> = cluster.iter().copied().filter(|&j| j != median).collect();
    remaining.sort_unstable();
    remaining.dedup();
    let mut stops = vec![median];
    let mut at = median;
    while !remaining.is_empty() {
        let mut best = 0;
        for idx in 1..remaining.len() {
            if costs.cost(at, remaining[idx]) < costs.cost(at, remaining[best]) {
                best = idx;
            }
        }
        at = remaining.remove(best);
        stops.push(at);
    }
    let mut load = 0.0;
    for &s in &stops {
        load += instance.demand(s)?;
    }
    Ok(Route {
        drone_id: 0,
        duration: costs.route_duration(&stops),
        stops,
        load,
    })
}

/// Runs both phases with `K = m`; routes come out in median order.
pub fn solve_gnn(instance: &Instance) -> Result<Solution> {
    let n = instance.n();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if instance.drones > n {
        return Err(Error::TooManyDrones { m: instance.drones, n });
    }
    let violations = validate_instance(instance);
    if has_hard_violations(&violations) {
        let detail = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        return Err(Error::Infeasible(detail));
    }
    let costs = build_cost_matrix(instance)?;
    let clustering = cluster_assets(instance, &costs, instance.drones)?;
    let mut routes = Vec::with_capacity(clustering.k);
    for (drone_id, &median) in clustering.medians.iter().enumerate() {
        let mut route = route_cluster(instance, &costs, &clustering.members(median), median)?;
        route.drone_id = drone_id;
        routes.push(route);
    }
    let total_cost = routes.iter().map(|r| r.duration).sum();
    Ok(Solution {
        routes,
        total_cost,
        method: Method::Gnn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::single_type_instance;
    use crate::model::evaluate_solution;

    #[test]
    fn combinations_are_enumerated_in_order() {
        let mut s = vec![1, 2];
        let mut all = vec![s.clone()];
        while next_combination(&mut s, 4) {
            all.push(s.clone());
        }
        assert_eq!(all, vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]);
    }

    #[test]
    fn separated_groups_become_clusters() {
        let pts = [(100.0, 100.0), (120.0, 90.0), (110.0, 130.0), (900.0, 900.0), (880.0, 910.0), (905.0, 870.0)];
        let inst = single_type_instance(&pts, 60.0, 1.0, 2);
        let costs = build_cost_matrix(&inst).unwrap();
        let c = cluster_assets(&inst, &costs, 2).unwrap();
        let a: Vec<usize> = c.members(c.medians[0]);
        let b: Vec<usize> = c.members(c.medians[1]);
        assert_eq!(a, vec![1, 2, 3]);
        assert_eq!(b, vec![4, 5, 6]);
        assert!((c.per_cluster_demand[&c.medians[0]] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_is_all_singletons() {
        let pts = [(10.0, 10.0), (500.0, 20.0), (300.0, 700.0)];
        let inst = single_type_instance(&pts, 45.0, 1.0, 3);
        let costs = build_cost_matrix(&inst).unwrap();
        let c = cluster_assets(&inst, &costs, 3).unwrap();
        assert_eq!(c.medians, vec![1, 2, 3]);
        assert!((c.objective - 3.0 * 45.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_splits_an_otherwise_cheap_cluster() {
        // three close assets that cannot share a drone
        let pts = [(100.0, 100.0), (105.0, 100.0), (110.0, 100.0), (900.0, 900.0)];
        let mut inst = single_type_instance(&pts, 0.0, 2.0, 2);
        inst.capacity = 4.0;
        let costs = build_cost_matrix(&inst).unwrap();
        let c = cluster_assets(&inst, &costs, 2).unwrap();
        assert!(c.per_cluster_demand.values().all(|&d| d <= 4.0));
    }

    #[test]
    fn infeasible_clustering_is_reported() {
        let pts = [(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)];
        let mut inst = single_type_instance(&pts, 0.0, 2.0, 1);
        inst.capacity = 3.0;
        let costs = build_cost_matrix(&inst).unwrap();
        assert!(matches!(cluster_assets(&inst, &costs, 1), Err(Error::NoFeasibleClustering { k: 1 })));
    }

    #[test]
    fn singleton_route() {
        let inst = single_type_instance(&[(300.0, 400.0)], 25.0, 1.0, 1);
        let costs = build_cost_matrix(&inst).unwrap();
        let r = route_cluster(&inst, &costs, &[1], 1).unwrap();
        assert_eq!(r.stops, vec![1]);
        assert!((r.duration - (costs.cost(0, 1) + costs.travel(1, 0))).abs() < 1e-12);
    }

    #[test]
    fn collinear_cluster_is_visited_in_line_order() {
        let inst = single_type_instance(&[(300.0, 0.0), (100.0, 0.0), (200.0, 0.0)], 10.0, 1.0, 1);
        let costs = build_cost_matrix(&inst).unwrap();
        let r = route_cluster(&inst, &costs, &[1, 2, 3], 2).unwrap();
        assert_eq!(r.stops, vec![2, 3, 1]);
    }

    #[test]
    fn route_errors() {
        let inst = single_type_instance(&[(300.0, 0.0)], 10.0, 1.0, 1);
        let costs = build_cost_matrix(&inst).unwrap();
        assert!(matches!(route_cluster(&inst, &costs, &[], 1), Err(Error::EmptyCluster)));
        assert!(route_cluster(&inst, &costs, &[1], 2).is_err());
    }

    #[test]
    fn single_asset_matches_the_only_solution() {
        let inst = single_type_instance(&[(100.0, 0.0)], 30.0, 1.0, 1);
        let s = solve_gnn(&inst).unwrap();
        assert!((s.total_cost - 40.0).abs() < 1e-12);
        assert!(evaluate_solution(&inst, &s).unwrap().1.is_empty());
    }

    #[test]
    fn large_instances_use_local_search_and_stay_feasible() {
        for seed in 0..5 {
            for m in [4, 5] {
                let mut cfg = crate::ScenarioConfig::with_asset_count(seed, 30);
                cfg.drones = m;
                let inst = crate::generate_instance(&cfg).unwrap();
                let s = solve_gnn(&inst).unwrap();
                let (_, v) = evaluate_solution(&inst, &s).unwrap();
                assert!(!has_hard_violations(&v), "{v:?}");
            }
        }
    }
}
