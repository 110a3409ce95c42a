use drone_cvrp::mip::{build_cvrp_model, decode_assignment, encode_solution, export_lp, parse_lp, verify_assignment};
use drone_cvrp::{build_cost_matrix, generate_instance, Instance, Method, ScenarioConfig, Solution};
use proptest::prelude::*;

/// An instance plus a random partition of its assets into `m` ordered routes.
fn instance_and_tours() -> impl Strategy<Value = (Instance, Vec<Vec<usize>>)> {
    (2usize..9, any::<u64>())
        .prop_flat_map(|(n, seed)| {
            let order = Just((1..=n).collect::<Vec<_>>()).prop_shuffle();
            let cuts = proptest::collection::btree_set(1..n, 0..n.min(4));
            (Just(n), Just(seed), order, cuts)
        })
        .prop_map(|(n, seed, order, cuts)| {
            let mut tours = Vec::new();
            let mut start = 0;
            for c in cuts.into_iter().chain([n]) {
                tours.push(order[start..c].to_vec());
                start = c;
            }
            let mut cfg = ScenarioConfig::with_asset_count(seed, n);
            cfg.drones = tours.len();
            cfg.capacity = 2.0;
            (generate_instance(&cfg).unwrap(), tours)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    /// A route set passes the program exactly when every route fits the
    /// capacity, and feasible ones decode back to the same routes and cost.
    #[test]
    fn program_accepts_exactly_the_capacity_feasible_route_sets((inst, tours) in instance_and_tours()) {
        let costs = build_cost_matrix(&inst).unwrap();
        let program = build_cvrp_model(&inst, &costs).unwrap();
        let solution = Solution::from_tours(&inst, &costs, tours.clone(), Method::External).unwrap();
        let fits = solution.routes.iter().all(|r| r.load <= inst.capacity + 1e-9);
        let a = encode_solution(&inst, &solution).unwrap();
        let violations = verify_assignment(&program, &a).unwrap();
        prop_assert_eq!(violations.is_empty(), fits, "{:?}", violations);
        prop_assert!((program.objective_value(&a) - solution.total_cost).abs() <= 1e-6);
        if fits {
            let back = decode_assignment(&inst, &a).unwrap();
            let mut expected = tours;
            expected.sort();
            prop_assert_eq!(back.tours(), expected);
        } else {
            prop_assert!(violations.iter().any(|(tag, _)| tag.starts_with("mtz") || tag.starts_with("bounds")));
            prop_assert!(decode_assignment(&inst, &a).is_err());
        }
    }

    #[test]
    fn lp_export_lists_every_row((inst, _) in instance_and_tours()) {
        let costs = build_cost_matrix(&inst).unwrap();
        let program = build_cvrp_model(&inst, &costs).unwrap();
        let lp = parse_lp(&export_lp(&program)).unwrap();
        prop_assert_eq!(lp.rows.len(), program.constraints.len());
        prop_assert_eq!(lp.binaries.len(), program.arc_vars.len());
        prop_assert_eq!(lp.bounds.len(), program.load_vars.len());
    }
}
