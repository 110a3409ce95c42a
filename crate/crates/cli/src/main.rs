#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drone_cvrp::bench::{emit_report, format_table, run_comparison, ExperimentConfig, ReportFormat};
use drone_cvrp::exact::SolveStatus;
use drone_cvrp::io::{self, SolverMeta};
use drone_cvrp::model::has_hard_violations;
use drone_cvrp::scenario::{self, DepotPlacement};
use drone_cvrp::{
    default_catalog, generate_instance, solve_bruteforce, solve_exact, solve_gnn, validate_instance, Error,
    Instance, Method, ScenarioConfig, SolveConfig, ViolationKind,
};

/// Capacitated drone routing: instance generation, exact and heuristic
/// solving, benchmark sweeps and format conversion.
#[derive(Parser)]
#[command(name = "drone-cvrp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random instance and write it in the native format.
    Generate(GenerateArgs),
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Run a paired-seed sweep and write CSV, SVG and a summary table.
    Bench(BenchArgs),
    /// Convert a benchmark file to the native instance format.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Assets per type as `type=count`; repeat or separate with commas.
    /// Without it, `--n` assets are spread over the default catalog.
    #[arg(long, value_delimiter = ',')]
    counts: Vec<String>,
    #[arg(long, default_value_t = 10, conflicts_with = "counts")]
    n: usize,
    /// Area as WIDTHxHEIGHT in meters.
    #[arg(long, default_value = "1000x1000")]
    area: String,
    /// Number of drones.
    #[arg(long = "m", default_value_t = scenario::DEFAULT_DRONES)]
    drones: usize,
    /// Drone capacity in liters.
    #[arg(long = "Q", default_value_t = scenario::DEFAULT_CAPACITY)]
    capacity: f64,
    /// Drone speed in m/s.
    #[arg(long = "V", default_value_t = scenario::DEFAULT_SPEED)]
    speed: f64,
    /// Flight endurance in seconds (reported, never enforced).
    #[arg(long, default_value_t = scenario::DEFAULT_ENDURANCE)]
    endurance: f64,
    /// `corner`, `center` or `X,Y`.
    #[arg(long, default_value = "corner")]
    depot: String,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Exact,
    Gnn,
    Brute,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    method: SolveMethod,
    /// Seconds allowed to the exact solver.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Largest instance brute force will accept.
    #[arg(long, default_value_t = drone_cvrp::oracle::DEFAULT_MAX_N)]
    max_n: usize,
    /// Solution file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment config (TOML). Flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    outdir: PathBuf,
    /// Asset counts to sweep.
    #[arg(long = "n", value_delimiter = ',')]
    n_values: Vec<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "m")]
    drones: Option<usize>,
    /// Worker threads; 1 runs sequentially. Defaults to available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceFormat {
    Cvrplib,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long, value_enum, default_value = "cvrplib")]
    from: SourceFormat,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Vehicle count, overriding the one stated in the file.
    #[arg(long)]
    vehicles: Option<usize>,
}

/// A failure together with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

const USAGE: u8 = 2;
const INFEASIBLE: u8 = 3;
const TIMEOUT: u8 = 4;
const IO: u8 = 5;

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Parse(_) | Error::UnsupportedFormat(_) => IO,
            Error::Infeasible(_) | Error::NoFeasibleClustering { .. } => INFEASIBLE,
            _ => USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { code: IO, message: format!("{}: {e}", path.display()) })
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure { code: IO, message: format!("{}: {e}", p.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_area(s: &str) -> Result<(f64, f64), Failure> {
    s.split_once(['x', 'X'])
        .and_then(|(w, h)| Some((w.trim().parse().ok()?, h.trim().parse().ok()?)))
        .ok_or_else(|| Failure::usage(format!("--area must be WIDTHxHEIGHT, got `{s}`")))
}

fn summarize_violations(instance: &Instance) -> Result<(), Failure> {
    let violations = validate_instance(instance);
    for v in &violations {
        eprintln!("violation: {:?}: {}", v.kind, v.detail);
    }
    if has_hard_violations(&violations) {
        let infeasible = violations
            .iter()
            .all(|v| matches!(v.kind, ViolationKind::CapacityExceeded | ViolationKind::TotalDemandExceeded));
        let code = if infeasible { INFEASIBLE } else { USAGE };
        return Err(Failure { code, message: format!("instance has {} violation(s)", violations.len()) });
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> CliResult {
    let catalog = default_catalog();
    let counts = if args.counts.is_empty() {
        scenario::split_counts(&catalog, args.n)
    } else {
        scenario::parse_counts(&catalog, &args.counts).map_err(|e| Failure::usage(e.to_string()))?
    };
    let (area_width, area_height) = parse_area(&args.area)?;
    let config = ScenarioConfig {
        seed: args.seed,
        counts,
        area_width,
        area_height,
        depot: args.depot.parse::<DepotPlacement>().map_err(|e| Failure::usage(e.to_string()))?,
        drones: args.drones,
        capacity: args.capacity,
        speed: args.speed,
        endurance: args.endurance,
    };
    let n = config.total_assets();
    if args.drones > n {
        return Err(Error::TooManyDrones { m: args.drones, n }.into());
    }
    let instance = generate_instance(&config)?;
    summarize_violations(&instance)?;
    write_out(args.out.as_deref(), &io::write_instance(&instance)?)?;
    eprintln!("generated {n} assets, {} drones, seed {}: valid", instance.drones, args.seed);
    Ok(())
}

fn solve(args: SolveArgs) -> CliResult {
    let instance = io::parse_instance(&read(&args.input)?)?;
    summarize_violations(&instance)?;
    if !(args.time_limit > 0.0) {
        return Err(Failure::usage("--time-limit must be positive"));
    }
    let (solution, meta) = match args.method {
        SolveMethod::Gnn => {
            let start = std::time::Instant::now();
            let sol = solve_gnn(&instance)?;
            eprintln!("method gnn  cost {:.6} s  wall {:.6} s", sol.total_cost, start.elapsed().as_secs_f64());
            (sol, None)
        }
        SolveMethod::Exact | SolveMethod::Brute => {
            let result = match args.method {
                SolveMethod::Exact => solve_exact(&instance, &SolveConfig::with_time_limit(args.time_limit))?,
                _ => solve_bruteforce(&instance, args.max_n)?,
            };
            let meta = SolverMeta::from_result(&result);
            eprintln!(
                "method {}  status {}  cost {}  bound {:.6}  nodes {}  wall {:.6} s",
                match args.method {
                    SolveMethod::Exact => Method::Exact,
                    _ => Method::Brute,
                },
                result.status.as_str(),
                result.cost().map_or_else(|| "-".into(), |c| format!("{c:.6} s")),
                result.lower_bound,
                result.nodes_explored,
                result.wall_time
            );
            match (result.status, result.incumbent) {
                (SolveStatus::Infeasible, _) => {
                    return Err(Failure { code: INFEASIBLE, message: "instance is infeasible".into() })
                }
                (_, None) => return Err(Failure { code: TIMEOUT, message: "limit reached without a solution".into() }),
                (status, Some(sol)) => {
                    if status != SolveStatus::Optimal {
                        write_out(args.out.as_deref(), &io::write_solution(&sol, &instance, Some(&meta))?)?;
                        return Err(Failure {
                            code: TIMEOUT,
                            message: format!("{}: best solution written, optimality not proven", status.as_str()),
                        });
                    }
                    (sol, Some(meta))
                }
            }
        }
    };
    write_out(args.out.as_deref(), &io::write_solution(&solution, &instance, meta.as_ref())?)
}

fn bench(args: BenchArgs) -> CliResult {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_toml(&read(path)?)?,
        None => ExperimentConfig::default(),
    };
    if !args.n_values.is_empty() {
        config.n_values = args.n_values;
    }
    if let Some(runs) = args.runs {
        config.runs_per_n = Some(runs);
    }
    if !args.methods.is_empty() {
        config.methods = args
            .methods
            .iter()
            .map(|m| m.parse::<Method>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    if let Some(t) = args.time_limit {
        config.exact_time_limit = t;
    }
    if let Some(seed) = args.seed {
        config.scenario.seed = seed;
    }
    if let Some(m) = args.drones {
        config.scenario.drones = m;
    }
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(Failure::usage("--jobs must be at least 1"));
        }
        config.parallel &= jobs > 1;
        configure_pool(jobs)?;
    }
    config.validate()?;

    let records = run_comparison(&config)?;
    let errors = records.iter().filter(|r| r.detail.is_some()).count();
    for format in [ReportFormat::Csv, ReportFormat::SvgPlots, ReportFormat::TableText] {
        for path in emit_report(&records, format, &args.outdir)? {
            eprintln!("wrote {}", path.display());
        }
    }
    print!("{}", format_table(&records));
    if errors > 0 {
        eprintln!("{errors} run(s) ended in a solver error; see the status column");
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn configure_pool(jobs: usize) -> CliResult {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

#[cfg(not(feature = "parallel"))]
fn configure_pool(_jobs: usize) -> CliResult {
    Ok(())
}

fn convert(args: ConvertArgs) -> CliResult {
    let text = read(&args.input)?;
    let instance = match args.from {
        SourceFormat::Cvrplib => io::parse_cvrplib(&text, args.vehicles)?,
    };
    for v in validate_instance(&instance) {
        eprintln!("violation: {:?}: {}", v.kind, v.detail);
    }
    write_out(args.out.as_deref(), &io::write_instance(&instance)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Convert(a) => convert(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
