//! Values frozen from the generator and the brute-force oracle. A change
//! here means generated instances or optimal costs moved between builds.

use drone_cvrp::scenario::derive_seed;
use drone_cvrp::{generate_instance, solve_bruteforce, solve_exact, solve_gnn, ScenarioConfig, SolveConfig};

#[test]
fn generator_stream_is_frozen() {
    let inst = generate_instance(&ScenarioConfig::with_asset_count(0, 4)).unwrap();
    let got: Vec<(u32, f64, f64)> = inst.assets.iter().map(|a| (a.type_id, a.x, a.y)).collect();
    assert_eq!(
        got,
        vec![
            (1, 709.0754154265618, 465.92172228961016),
            (2, 699.1432426747317, 60.1711656341718),
            (3, 879.1107179586186, 549.5312687894465),
            (4, 828.9844760239993, 935.4265029131291),
        ]
    );
    assert_eq!(derive_seed(0, 10, 0), 13384599965048740418);
}

#[test]
fn oracle_optima_are_frozen_and_matched() {
    let cases: [(u64, usize, usize, f64, &[&[usize]]); 3] = [
        (42, 6, 2, 897.531060659207, &[&[2, 4, 6, 1, 5], &[3]]),
        (7, 8, 3, 1351.0194376329705, &[&[1], &[4, 5, 2, 8, 3, 7], &[6]]),
        (2024, 7, 1, 1117.7316305913619, &[&[3, 7, 6, 2, 5, 1, 4]]),
    ];
    for (seed, n, m, cost, tours) in cases {
        let mut cfg = ScenarioConfig::with_asset_count(seed, n);
        cfg.drones = m;
        let inst = generate_instance(&cfg).unwrap();
        let brute = solve_bruteforce(&inst, 9).unwrap().incumbent.unwrap();
        assert_eq!(brute.total_cost, cost);
        let expected: Vec<Vec<usize>> = tours.iter().map(|t| t.to_vec()).collect();
        assert_eq!(brute.tours(), expected);
        let exact = solve_exact(&inst, &SolveConfig::default()).unwrap();
        assert!((exact.cost().unwrap() - cost).abs() <= 1e-9);
        assert!(solve_gnn(&inst).unwrap().total_cost >= cost - 1e-9);
    }
}
