use std::path::Path;
use std::process::{Command, Output};

use drone_cvrp::io::{parse_cvrplib, parse_instance, parse_solution, write_instance};
use drone_cvrp::model::has_hard_violations;
use drone_cvrp::{evaluate_solution, generate_instance, scenario, ScenarioConfig};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drone-cvrp")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_is_reproducible_and_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.toml"), dir.path().join("b.toml"));
    let args = ["generate", "--seed", "7", "--counts", "bench=3,ambulance=2", "--m", "2"];
    for f in [&a, &b] {
        let out = run(&[&args[..], &["--out", p(f)]].concat());
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());

    let cat = drone_cvrp::default_catalog();
    let mut cfg = ScenarioConfig::with_counts(7, vec![(cat[0].clone(), 3), (cat[2].clone(), 2)]);
    cfg.drones = 2;
    assert_eq!(text, write_instance(&generate_instance(&cfg).unwrap()).unwrap());
}

#[test]
fn generate_defaults_and_usage_errors() {
    let out = run(&["generate"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let inst = parse_instance(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(inst.n(), 10);
    assert_eq!(inst.drones, scenario::DEFAULT_DRONES);

    let out = run(&["generate", "--n", "5", "--m", "6"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("m <= n"), "{}", stderr(&out));

    assert_eq!(code(&run(&["generate", "--counts", "sofa=2"])), 2);
    assert_eq!(code(&run(&["generate", "--area", "wide"])), 2);
    assert_eq!(code(&run(&["generate", "--V", "0"])), 2);
}

#[test]
fn three_methods_write_three_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.toml");
    assert_eq!(code(&run(&["generate", "--seed", "3", "--n", "7", "--m", "2", "--out", p(&inst)])), 0);
    let instance = parse_instance(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    let mut cost = Vec::new();
    for method in ["exact", "gnn", "brute"] {
        let out_file = dir.path().join(format!("{method}.toml"));
        let out = run(&["solve", "--in", p(&inst), "--method", method, "--out", p(&out_file)]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let file = parse_solution(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
        let (recomputed, violations) = evaluate_solution(&instance, &file.solution).unwrap();
        assert!(!has_hard_violations(&violations));
        assert!((recomputed - file.solution.total_cost).abs() <= 1e-9);
        cost.push(file.solution.total_cost);
    }
    assert!((cost[0] - cost[2]).abs() <= 1e-9);
    assert!(cost[1] >= cost[0] - 1e-9);
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["solve", "--in", p(&dir.path().join("missing.toml"))])), 5);

    let big = dir.path().join("big.toml");
    assert_eq!(code(&run(&["generate", "--seed", "1", "--n", "22", "--m", "4", "--out", p(&big)])), 0);
    assert_eq!(code(&run(&["solve", "--in", p(&big), "--method", "brute"])), 2);

    let sol = dir.path().join("sol.toml");
    let out = run(&["solve", "--in", p(&big), "--time-limit", "0.05", "--out", p(&sol)]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    let file = parse_solution(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    assert_eq!(file.solver.unwrap().status, drone_cvrp::SolveStatus::FeasibleTimeout);

    let tight = dir.path().join("tight.toml");
    let mut inst = generate_instance(&ScenarioConfig::with_asset_count(1, 12)).unwrap();
    inst.drones = 2;
    inst.capacity = 1.0;
    std::fs::write(&tight, write_instance(&inst).unwrap()).unwrap();
    for method in ["exact", "gnn"] {
        let out = run(&["solve", "--in", p(&tight), "--method", method]);
        assert_eq!(code(&out), 3, "{method}: {}", stderr(&out));
    }

    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "schema = \"drone-cvrp/instance/v1\"\n").unwrap();
    let out = run(&["solve", "--in", p(&broken)]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("area"), "{}", stderr(&out));
}

#[test]
fn bench_writes_reports_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bench.toml");
    std::fs::write(
        &config,
        "n_values = [5, 7]\nruns_per_n = 3\nmethods = [\"exact\", \"gnn\", \"brute\"]\nexact_time_limit = 10.0\n\n[scenario]\nseed = 4\narea_width = 1000.0\narea_height = 1000.0\ndepot = \"corner\"\ndrones = 2\ncapacity = 5.5\nspeed = 20.0\nendurance = 780.0\n\n[[scenario.catalog]]\nid = 1\nname = \"bench\"\ndemand = 0.3\nservice_time = 60.0\n\n[[scenario.catalog]]\nid = 3\nname = \"ambulance\"\ndemand = 1.2\nservice_time = 240.0\n",
    )
    .unwrap();
    let mut cost_columns = Vec::new();
    for (k, jobs) in ["1", "2"].iter().enumerate() {
        let outdir = dir.path().join(format!("out{k}"));
        let out = run(&["bench", "--config", p(&config), "--outdir", p(&outdir), "--jobs", jobs]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let mut names: Vec<String> =
            std::fs::read_dir(&outdir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        names.sort();
        assert_eq!(names, ["cost_cdf.svg", "cost_vs_n.svg", "runs.csv", "runtime_vs_n.svg", "summary.txt"]);
        let csv = std::fs::read_to_string(outdir.join("runs.csv")).unwrap();
        let rows: Vec<Vec<String>> =
            csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
        assert_eq!(rows.len(), 2 * 3 * 3);
        for cell in rows.chunks(3) {
            let cost = |m: &str| cell.iter().find(|r| r[2] == m).unwrap()[3].parse::<f64>().unwrap();
            assert!((cost("exact") - cost("brute")).abs() <= 1e-9);
            assert!(cost("gnn") >= cost("exact") - 1e-9);
        }
        cost_columns.push(rows.iter().map(|r| (r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone(), r[6].clone())).collect::<Vec<_>>());
    }
    assert_eq!(cost_columns[0], cost_columns[1]);

    assert_eq!(code(&run(&["bench", "--outdir", p(dir.path()), "--n", "5", "--methods", "sofa"])), 2);
}

#[test]
fn convert_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let src = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/SYN-n16-k3.vrp");
    let out_file = dir.path().join("syn.toml");
    let out = run(&["convert", "--from", "cvrplib", "--in", src, "--out", p(&out_file), "--vehicles", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let converted = parse_instance(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
    let direct = parse_cvrplib(&std::fs::read_to_string(src).unwrap(), Some(4)).unwrap();
    assert_eq!(converted, direct);

    let explicit = dir.path().join("explicit.vrp");
    std::fs::write(&explicit, std::fs::read_to_string(src).unwrap().replace("EUC_2D", "EXPLICIT")).unwrap();
    assert_eq!(code(&run(&["convert", "--in", p(&explicit)])), 5);
}
