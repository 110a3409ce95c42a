//! Properties checked against the brute-force oracle on small instances.

use drone_cvrp::exact::Bounder;
use drone_cvrp::mip::{build_cvrp_model, decode_assignment, encode_solution, trace_routes, verify_assignment, Assignment};
use drone_cvrp::model::has_hard_violations;
use drone_cvrp::scenario::derive_seed;
use drone_cvrp::{
    build_cost_matrix, cluster_assets, evaluate_solution, generate_instance, route_cluster, solve_bruteforce,
    solve_exact, solve_gnn, Instance, ScenarioConfig, SolveConfig, SolveStatus,
};

const TOL: f64 = 1e-9;

fn instance(seed: u64, n: usize, m: usize) -> Instance {
    let mut cfg = ScenarioConfig::with_asset_count(seed, n);
    cfg.drones = m;
    generate_instance(&cfg).unwrap()
}

fn small_instances(salt: u64, count: usize) -> impl Iterator<Item = Instance> {
    (0..count).map(move |k| {
        let n = 3 + k % 6;
        let m = (1 + k % 3).min(n);
        instance(derive_seed(salt, n, k), n, m)
    })
}

#[test]
fn oracle_solution_evaluates_clean_at_its_own_cost() {
    let inst = instance(11, 6, 2);
    let r = solve_bruteforce(&inst, 9).unwrap();
    let sol = r.incumbent.unwrap();
    let (cost, violations) = evaluate_solution(&inst, &sol).unwrap();
    // endurance overruns are advisory and may appear
    assert!(violations.iter().all(|v| v.kind.is_warning()), "{violations:?}");
    assert!((cost - sol.total_cost).abs() <= TOL);
}

#[test]
fn exact_matches_oracle_and_its_incumbent_satisfies_the_program() {
    for inst in small_instances(1, 30) {
        let exact = solve_exact(&inst, &SolveConfig::default()).unwrap();
        let brute = solve_bruteforce(&inst, 9).unwrap();
        assert_eq!(exact.status, SolveStatus::Optimal);
        assert!((exact.cost().unwrap() - brute.cost().unwrap()).abs() <= TOL);

        let costs = build_cost_matrix(&inst).unwrap();
        let program = build_cvrp_model(&inst, &costs).unwrap();
        let a = encode_solution(&inst, exact.incumbent.as_ref().unwrap()).unwrap();
        assert!(verify_assignment(&program, &a).unwrap().is_empty());
        assert!((program.objective_value(&a) - brute.cost().unwrap()).abs() <= 1e-6);
    }
}

#[test]
fn root_bound_never_exceeds_the_optimum() {
    for inst in small_instances(2, 40) {
        let costs = build_cost_matrix(&inst).unwrap();
        let optimum = solve_bruteforce(&inst, 9).unwrap().cost().unwrap();
        let plain = Bounder::new(&inst, &costs).unwrap().completion_bound(0, 0, 0);
        let gnn = solve_gnn(&inst).unwrap().total_cost;
        let tuned = Bounder::tuned(&inst, &costs, gnn).unwrap().completion_bound(0, 0, 0);
        assert!(plain <= optimum + TOL, "{plain} > {optimum}");
        assert!(tuned <= optimum + TOL, "{tuned} > {optimum}");
    }
}

#[test]
fn heuristic_never_beats_the_oracle() {
    for inst in small_instances(3, 100) {
        let optimum = solve_bruteforce(&inst, 9).unwrap().cost().unwrap();
        let gnn = solve_gnn(&inst).unwrap();
        let (_, violations) = evaluate_solution(&inst, &gnn).unwrap();
        assert!(!has_hard_violations(&violations), "{violations:?}");
        assert!(gnn.total_cost >= optimum - TOL);
    }
}

#[test]
fn cluster_routes_cost_at_least_the_single_drone_optimum() {
    for inst in small_instances(4, 40) {
        let costs = build_cost_matrix(&inst).unwrap();
        let Ok(clustering) = cluster_assets(&inst, &costs, inst.drones) else { continue };
        for &median in &clustering.medians {
            let members = clustering.members(median);
            let route = route_cluster(&inst, &costs, &members, median).unwrap();

            let sub = Instance {
                assets: members
                    .iter()
                    .enumerate()
                    .map(|(k, &id)| drone_cvrp::Asset { id: k + 1, ..inst.assets[id - 1].clone() })
                    .collect(),
                drones: 1,
                capacity: f64::MAX,
                ..inst.clone()
            };
            let single = solve_bruteforce(&sub, 9).unwrap().cost().unwrap();
            assert!(route.duration >= single - TOL, "{} < {single}", route.duration);
        }
    }
}

/// Every median subset and every capacity-feasible assignment.
fn clustering_by_enumeration(inst: &Instance, k: usize) -> Option<f64> {
    let n = inst.n();
    let costs = build_cost_matrix(inst).unwrap();
    let demand = inst.demands().unwrap();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let medians: Vec<usize> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        let mut choice = vec![0usize; n + 1];
        loop {
            // medians serve themselves
            let valid = medians.iter().enumerate().all(|(c, &m)| choice[m] == c);
            if valid {
                let mut load = vec![0.0; k];
                let mut total = 0.0;
                for j in 1..=n {
                    load[choice[j]] += demand[j];
                    total += costs.cost(medians[choice[j]], j);
                }
                if load.iter().all(|&l| l <= inst.capacity + TOL) && best.is_none_or(|b| total < b) {
                    best = Some(total);
                }
            }
            let mut pos = 1;
            while pos <= n {
                choice[pos] += 1;
                if choice[pos] < k {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos > n {
                break;
            }
        }
    }
    best
}

#[test]
fn exact_clustering_matches_enumeration() {
    for (k, mut inst) in small_instances(5, 30).enumerate() {
        let clusters = (1 + k % 3).min(inst.n());
        if k % 4 == 0 {
            // tight capacity so the assignment has to split natural groups
            inst.capacity = 2.0;
        }
        let costs = build_cost_matrix(&inst).unwrap();
        let expected = clustering_by_enumeration(&inst, clusters);
        match cluster_assets(&inst, &costs, clusters) {
            Ok(c) => assert!((c.objective - expected.unwrap()).abs() <= 1e-6, "{} vs {expected:?}", c.objective),
            Err(_) => assert_eq!(expected, None),
        }
    }
}

#[test]
fn encode_decode_round_trip_on_oracle_outputs() {
    for inst in small_instances(6, 40) {
        let sol = solve_bruteforce(&inst, 9).unwrap().incumbent.unwrap();
        let a = encode_solution(&inst, &sol).unwrap();
        let costs = build_cost_matrix(&inst).unwrap();
        assert!(verify_assignment(&build_cvrp_model(&inst, &costs).unwrap(), &a).unwrap().is_empty());
        let back = decode_assignment(&inst, &a).unwrap();
        let mut expected = sol.tours();
        expected.sort();
        assert_eq!(back.tours(), expected);
        assert!((back.total_cost - sol.total_cost).abs() <= TOL);
    }
}

/// Minimizes the program's objective over all successor functions and
/// depot departures, accepting exactly what `verify_assignment` accepts.
fn model_optimum_by_enumeration(inst: &Instance) -> Option<f64> {
    let n = inst.n();
    let costs = build_cost_matrix(inst).unwrap();
    let program = build_cvrp_model(inst, &costs).unwrap();
    let demand = inst.demands().unwrap();
    let mut best: Option<f64> = None;
    let mut succ = vec![0usize; n + 1];
    loop {
        for starts in 0u32..(1 << n) {
            if starts.count_ones() as usize != inst.drones {
                continue;
            }
            let mut a = Assignment::zeros(&program);
            for i in 1..=n {
                a.arc_values.insert((i, succ[i]), true);
                if starts & (1 << (i - 1)) != 0 {
                    a.arc_values.insert((0, i), true);
                }
            }
            // loads accumulate along traced routes; nodes off any route keep their demand
            for i in 1..=n {
                a.load_values.insert(i, demand[i]);
            }
            if let Some(routes) = trace_routes(n, &a) {
                for r in routes {
                    let mut load = 0.0;
                    for s in r {
                        load += demand[s];
                        a.load_values.insert(s, load);
                    }
                }
            }
            if verify_assignment(&program, &a).unwrap().is_empty() {
                let v = program.objective_value(&a);
                if best.is_none_or(|b| v < b) {
                    best = Some(v);
                }
            }
        }
        // next successor function, skipping self-loops
        let mut pos = 1;
        loop {
            if pos > n {
                return best;
            }
            succ[pos] += 1;
            if succ[pos] == pos {
                succ[pos] += 1;
            }
            if succ[pos] <= n {
                break;
            }
            succ[pos] = 0;
            pos += 1;
        }
    }
}

#[test]
fn model_enumeration_matches_route_oracle() {
    for (k, m) in [(0u64, 1usize), (1, 2), (2, 3)] {
        let inst = instance(derive_seed(7, 6, k as usize), 6, m);
        let by_model = model_optimum_by_enumeration(&inst).unwrap();
        let by_routes = solve_bruteforce(&inst, 9).unwrap().cost().unwrap();
        assert!((by_model - by_routes).abs() <= 1e-6, "{by_model} vs {by_routes}");
    }
}
