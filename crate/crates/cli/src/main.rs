use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gvp::io::{self, AnyInstance};
use gvp::kpartite::{self, Mode};
use gvp::oracle::{self, OracleOptions};
use gvp::rational::{ceil_u64, format_rational, parse_rational};
use gvp::treewidth::{self, TreeDecomposition};
use gvp::{low_degree, lp, planar, sherali_adams, Error, HyperInstance, Instance, PriceAssignment, Rational, Solution};

mod bench;
mod generate;

#[derive(Parser)]
#[command(name = "gvp", version, about = "Graph vertex pricing solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with one algorithm and print the solution as JSON.
    Solve(SolveArgs),
    /// Exhaustive optimum over integral prices (or real prices with --fractional).
    Oracle(OracleArgs),
    /// Write a generated instance.
    Gen(generate::GenArgs),
    /// Run every algorithm of a manifest on every instance and print CSV.
    Bench(bench::BenchArgs),
    /// Check an instance and optional decomposition and coloring files.
    Validate(ValidateArgs),
    /// Print the lifted LP value against the integral optimum as CSV.
    SaGap(SaGapArgs),
}

#[derive(Args, Clone)]
pub struct SolveOptions {
    /// auto, oracle, dp, fptas, ptas-planar, degree2, degree4, kpartite, general, lp-opt, sa
    #[arg(long, default_value = "auto")]
    pub alg: String,
    #[arg(long, default_value = "1/10")]
    pub epsilon: String,
    /// Price cap; defaults to the largest budget rounded up.
    #[arg(long)]
    pub cap: Option<u64>,
    /// Lifting level for `sa`; defaults to the decomposition width plus one.
    #[arg(long)]
    pub r: Option<usize>,
    /// Largest decomposition width to search for.
    #[arg(long, default_value_t = 4)]
    pub width: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub coloring: Option<PathBuf>,
    #[arg(long)]
    pub decomposition: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    options: SolveOptions,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long)]
    cap: Option<u64>,
    /// Best real-valued prices instead of integral ones.
    #[arg(long)]
    fractional: bool,
}

#[derive(Args)]
struct ValidateArgs {
    instance: PathBuf,
    #[arg(long)]
    decomposition: Option<PathBuf>,
    #[arg(long)]
    coloring: Option<PathBuf>,
}

#[derive(Args)]
struct SaGapArgs {
    instance: PathBuf,
    /// Comma-separated levels.
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    r: Vec<usize>,
    #[arg(long)]
    cap: Option<u64>,
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    UnknownAlgorithm(String),
    Parse(String),
    Precondition(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::UnknownAlgorithm(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Precondition(_) => 4,
            Failure::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::UnknownAlgorithm(m) | Failure::Parse(m) | Failure::Precondition(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Json(_) | Error::Io(_) => Failure::Parse(e.to_string()),
            Error::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

pub fn read_instance(path: &Path) -> CliResult<AnyInstance> {
    let text = io::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    io::any_instance_from_json(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn read_with<T>(path: &Path, parse: impl Fn(&str) -> gvp::Result<T>) -> CliResult<T> {
    let text = io::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn default_cap(max_budget: &Rational) -> u64 {
    ceil_u64(max_budget).max(1)
}

fn oracle_options() -> CliResult<OracleOptions> {
    match std::env::var("GVP_ORACLE_LIMIT") {
        Ok(v) => v
            .trim()
            .parse::<u128>()
            .map(|limit| OracleOptions { limit })
            .map_err(|_| Failure::Parse(format!("GVP_ORACLE_LIMIT is not a number: {v:?}"))),
        Err(_) => Ok(OracleOptions::default()),
    }
}

fn decomposition(instance: &Instance, options: &SolveOptions) -> CliResult<TreeDecomposition> {
    match &options.decomposition {
        Some(path) => read_with(path, io::decomposition_from_json),
        None => Ok(treewidth::build_decomposition(instance, options.width)?),
    }
}

/// Runs `options.alg` on a graph instance.
pub fn solve_graph(instance: &Instance, options: &SolveOptions) -> CliResult<Solution> {
    let epsilon = parse_rational(&options.epsilon).map_err(|e| Failure::Parse(format!("--epsilon: {e}")))?;
    let cap = options.cap.unwrap_or_else(|| default_cap(&instance.max_budget()));
    let seed = options.seed.unwrap_or(0);
    let solution = match options.alg.as_str() {
        "auto" => {
            let alg = if instance.max_degree() <= 2 {
                "degree2"
            } else if treewidth::build_decomposition(instance, 4).is_ok() {
                "fptas"
            } else if instance.max_degree() <= 4 {
                "degree4"
            } else {
                "general"
            };
            let chosen = SolveOptions { alg: alg.to_string(), width: 4, ..options.clone() };
            return solve_graph(instance, &chosen);
        }
        "oracle" => oracle::brute_force_opt_with(instance, cap, oracle_options()?)?,
        "dp" => treewidth::dp_solve(instance, &decomposition(instance, options)?, cap)?,
        "fptas" => treewidth::fptas(instance, &epsilon, options.width)?,
        "ptas-planar" => planar::ptas_planar(instance, &epsilon)?,
        "degree2" => low_degree::solve_degree2(instance)?,
        "degree4" => low_degree::solve_degree4(instance)?,
        "kpartite" => {
            let path = options
                .coloring
                .as_ref()
                .ok_or_else(|| Failure::Precondition("kpartite needs --coloring".into()))?;
            let coloring = read_with(path, io::coloring_from_json)?;
            let mode = options.seed.map_or(Mode::Derandomized, Mode::Randomized);
            kpartite::kpartite_approx(instance, &coloring, mode)?
        }
        "general" => kpartite::general_graph_approx(instance, seed)?,
        "lp-opt" => {
            let sol = lp::lp_opt(instance);
            if sol.status != lp::LpStatus::Optimal {
                return Err(Failure::Internal(format!("pricing LP is {:?}", sol.status)));
            }
            Solution::evaluated(instance, PriceAssignment(sol.assignment), "lp-opt")?
        }
        "sa" => {
            let td = decomposition(instance, options)?;
            let r = options.r.unwrap_or(td.width() + 1).max(2);
            let model = sherali_adams::build_lp_r(instance, r, cap)?;
            let sol = sherali_adams::solve_lp_r(&model)?;
            sherali_adams::sa_round_deterministic(instance, &td, &model, &sol)?
        }
        other => return Err(Failure::UnknownAlgorithm(format!("unknown algorithm {other:?}"))),
    };
    Ok(solution)
}

pub fn solve_hyper(hyper: &HyperInstance, options: &SolveOptions) -> CliResult<Solution> {
    let cap = options.cap.unwrap_or_else(|| default_cap(&hyper.max_budget()));
    match options.alg.as_str() {
        "oracle" => Ok(oracle::brute_force_opt_smp_with(hyper, cap, oracle_options()?)?),
        "auto" | "dp" => {
            let td = match &options.decomposition {
                Some(path) => read_with(path, io::decomposition_from_json)?,
                None => treewidth::build_decomposition(&treewidth::primal_graph(hyper), options.width)?,
            };
            Ok(treewidth::dp_solve_smp(hyper, &td, cap)?)
        }
        "fptas" | "ptas-planar" | "degree2" | "degree4" | "kpartite" | "general" | "lp-opt" | "sa" => Err(
            Failure::Precondition(format!("algorithm {} needs a graph instance", options.alg)),
        ),
        other => Err(Failure::UnknownAlgorithm(format!("unknown algorithm {other:?}"))),
    }
}

pub fn solve_any(instance: &AnyInstance, options: &SolveOptions) -> CliResult<Solution> {
    match instance {
        AnyInstance::Graph(g) => solve_graph(g, options),
        AnyInstance::Hyper(h) => solve_hyper(h, options),
    }
}

/// Recomputes the revenue of `solution` from its prices.
pub fn verified_revenue(instance: &AnyInstance, solution: &Solution) -> CliResult<Rational> {
    let revenue = match instance {
        AnyInstance::Graph(g) => gvp::evaluate_revenue(g, &solution.prices)?,
        AnyInstance::Hyper(h) => gvp::evaluate_revenue_smp(h, &solution.prices)?,
    };
    if revenue != solution.revenue {
        return Err(Failure::Internal(format!(
            "{} reported revenue {} but its prices earn {}",
            solution.algorithm, solution.revenue, revenue
        )));
    }
    Ok(revenue)
}

#[derive(Serialize)]
struct SolutionOutput {
    algorithm: String,
    revenue: String,
    prices: Vec<String>,
    elapsed_ms: u128,
}

fn print_solution(instance: &AnyInstance, solution: &Solution, started: Instant) -> CliResult<()> {
    let revenue = verified_revenue(instance, solution)?;
    let out = SolutionOutput {
        algorithm: solution.algorithm.clone(),
        revenue: format_rational(&revenue),
        prices: solution.prices.as_slice().iter().map(format_rational).collect(),
        elapsed_ms: started.elapsed().as_millis(),
    };
    println!("{}", serde_json::to_string(&out).expect("output serializes"));
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> CliResult<()> {
    let instance = read_instance(&args.instance)?;
    let started = Instant::now();
    let solution = solve_any(&instance, &args.options)?;
    print_solution(&instance, &solution, started)
}

fn cmd_oracle(args: OracleArgs) -> CliResult<()> {
    let instance = read_instance(&args.instance)?;
    let started = Instant::now();
    let solution = match (&instance, args.fractional) {
        (AnyInstance::Graph(g), true) => oracle::fractional_opt(g)?,
        (AnyInstance::Hyper(_), true) => {
            return Err(Failure::Precondition("--fractional needs a graph instance".into()));
        }
        (_, false) => {
            let options = SolveOptions {
                alg: "oracle".into(),
                epsilon: "1/10".into(),
                cap: args.cap,
                r: None,
                width: 4,
                seed: None,
                coloring: None,
                decomposition: None,
            };
            solve_any(&instance, &options)?
        }
    };
    print_solution(&instance, &solution, started)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn cmd_validate(args: ValidateArgs) -> CliResult<bool> {
    let instance = read_instance(&args.instance)?;
    let graph = match &instance {
        AnyInstance::Graph(g) => g.clone(),
        AnyInstance::Hyper(h) => treewidth::primal_graph(h),
    };
    let mut checks = vec![Check {
        name: "instance",
        pass: true,
        detail: format!("{} vertices, {} consumers", graph.n(), consumer_count(&instance)),
    }];
    if let Some(path) = &args.decomposition {
        let td = read_with(path, io::decomposition_from_json)?;
        let check = match treewidth::validate_decomposition(&graph, &td) {
            Ok(()) => Check { name: "decomposition", pass: true, detail: format!("width {}", td.width()) },
            Err(v) => Check { name: "decomposition", pass: false, detail: v.to_string() },
        };
        checks.push(check);
    }
    if let Some(path) = &args.coloring {
        let coloring = read_with(path, io::coloring_from_json)?;
        let check = match &instance {
            AnyInstance::Graph(g) => match coloring.validate(g) {
                Ok(()) => Check { name: "coloring", pass: true, detail: format!("{} classes", coloring.k) },
                Err(e) => Check { name: "coloring", pass: false, detail: e.to_string() },
            },
            AnyInstance::Hyper(_) => Check {
                name: "coloring",
                pass: false,
                detail: "colorings apply to graph instances only".into(),
            },
        };
        checks.push(check);
    }
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        println!("{}", serde_json::to_string(c).expect("check serializes"));
    }
    Ok(pass)
}

fn consumer_count(instance: &AnyInstance) -> usize {
    match instance {
        AnyInstance::Graph(g) => g.m(),
        AnyInstance::Hyper(h) => h.hyperedges().len(),
    }
}

fn cmd_sa_gap(args: SaGapArgs) -> CliResult<()> {
    let instance = match read_instance(&args.instance)? {
        AnyInstance::Graph(g) => g,
        AnyInstance::Hyper(_) => return Err(Failure::Precondition("sa-gap needs a graph instance".into())),
    };
    let cap = args.cap.unwrap_or_else(|| default_cap(&instance.max_budget()));
    let rows = sherali_adams::gap_report(&instance, &args.r, cap)?;
    let mut out = csv::Writer::from_writer(std::io::stdout());
    let io_err = |e: csv::Error| Failure::Internal(e.to_string());
    out.write_record(["r", "lp_value", "integral_opt", "gap"]).map_err(io_err)?;
    for row in rows {
        out.write_record([
            row.r.to_string(),
            format_rational(&row.lp_value),
            format_rational(&row.integral_opt),
            row.gap.as_ref().map(format_rational).unwrap_or_default(),
        ])
        .map_err(io_err)?;
    }
    out.flush().map_err(|e| Failure::Internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args).map(|_| true),
        Command::Oracle(args) => cmd_oracle(args).map(|_| true),
        Command::Gen(args) => generate::cmd_gen(args).map(|_| true),
        Command::Bench(args) => bench::cmd_bench(args).map(|_| true),
        Command::Validate(args) => cmd_validate(args),
        Command::SaGap(args) => cmd_sa_gap(args).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
