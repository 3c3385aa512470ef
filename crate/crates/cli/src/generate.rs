use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use gvp::io::{self, AnyInstance};
use gvp::rational::parse_rational;
use gvp::{generators, planar, Edge, Instance, Rational};

use crate::{read_instance, CliResult, Failure};

#[derive(Args)]
pub struct GenArgs {
    /// path, cycle, star, grid, random-sp, kpartite-random or vc-reduction
    generator: String,
    /// Number of vertices.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated budgets for path, cycle and star; random otherwise.
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<String>>,
    /// Budget of every grid edge.
    #[arg(long, default_value = "1")]
    budget: String,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Number of color classes for kpartite-random.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Edge probability for kpartite-random.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    min_budget: u64,
    #[arg(long, default_value_t = 10)]
    max_budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Input graph for vc-reduction; budgets are ignored.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where kpartite-random writes its coloring.
    #[arg(long)]
    coloring_out: Option<PathBuf>,
    /// Where vc-reduction writes its formula file; defaults next to --out.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Serialize)]
struct Formula {
    #[serde(rename = "E")]
    e: usize,
    #[serde(rename = "V")]
    v: usize,
    #[serde(rename = "VC")]
    vc: usize,
}

#[derive(Serialize)]
struct Sidecar {
    expected_opt_formula: Formula,
    expected_opt: u64,
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure::Precondition(msg.into())
}

fn need(value: Option<usize>, flag: &str) -> CliResult<usize> {
    value.ok_or_else(|| bad(format!("--{flag} is required")))
}

fn parsed_budgets(args: &GenArgs) -> CliResult<Option<Vec<Rational>>> {
    args.budgets
        .as_ref()
        .map(|list| {
            list.iter()
                .map(|s| parse_rational(s).map_err(|e| Failure::Parse(format!("--budgets: {e}"))))
                .collect()
        })
        .transpose()
}

fn write(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Failure::Internal(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_gen(args: GenArgs) -> CliResult<()> {
    if args.min_budget > args.max_budget {
        return Err(bad("--min-budget exceeds --max-budget"));
    }
    let (lo, hi, seed) = (args.min_budget, args.max_budget, args.seed);
    let budgets = parsed_budgets(&args)?;
    let instance = match args.generator.as_str() {
        "path" => match budgets {
            Some(b) => {
                if args.n.is_some_and(|n| n != b.len() + 1) {
                    return Err(bad("a path on n vertices takes n - 1 budgets"));
                }
                generators::path(&b)
            }
            None => generators::random_path(need(args.n, "n")?, lo, hi, seed),
        },
        "cycle" => {
            let b = match budgets {
                Some(b) => b,
                None => generators::random_path(need(args.n, "n")? + 1, lo, hi, seed)
                    .edges()
                    .iter()
                    .map(|e| e.budget.clone())
                    .collect(),
            };
            if b.len() < 3 || args.n.is_some_and(|n| n != b.len()) {
                return Err(bad("a cycle needs n >= 3 vertices and n budgets"));
            }
            generators::cycle(&b)
        }
        "star" => {
            let b = match budgets {
                Some(b) => b,
                None => generators::random_path(need(args.n, "n")?, lo, hi, seed)
                    .edges()
                    .iter()
                    .map(|e| e.budget.clone())
                    .collect(),
            };
            if args.n.is_some_and(|n| n != b.len() + 1) {
                return Err(bad("a star on n vertices takes n - 1 budgets"));
            }
            generators::star(&b)
        }
        "grid" => {
            let budget = parse_rational(&args.budget).map_err(|e| Failure::Parse(format!("--budget: {e}")))?;
            let shape = generators::grid(need(args.rows, "rows")?, need(args.cols, "cols")?, 0);
            let edges = shape.edges().iter().map(|e| Edge::new(e.u, e.v, budget.clone())).collect();
            Instance::new(shape.n(), edges)?
        }
        "random-sp" => generators::random_series_parallel(need(args.n, "n")?, lo, hi, seed),
        "kpartite-random" => {
            if args.k < 2 || !(0.0..=1.0).contains(&args.p) {
                return Err(bad("kpartite-random needs k >= 2 and p in [0, 1]"));
            }
            let (instance, coloring) = generators::random_kpartite(need(args.n, "n")?, args.k, args.p, lo, hi, seed);
            if let Some(path) = &args.coloring_out {
                write(Some(path), &io::coloring_to_json(&coloring))?;
            }
            instance
        }
        "vc-reduction" => {
            let path = args.graph.as_ref().ok_or_else(|| bad("vc-reduction needs --graph"))?;
            let graph = match read_instance(path)? {
                AnyInstance::Graph(g) => g,
                AnyInstance::Hyper(_) => return Err(bad("vc-reduction needs a graph")),
            };
            let mut pairs: Vec<(usize, usize)> = graph.pairs().map(|(u, v)| (u.min(v), u.max(v))).collect();
            let count = pairs.len();
            pairs.sort_unstable();
            pairs.dedup();
            if pairs.len() != count || graph.n() == 0 {
                return Err(bad("vc-reduction needs a simple graph with at least one vertex"));
            }
            let ordered: Vec<(usize, usize)> = graph.pairs().collect();
            let reduced = planar::vc_to_gvp(graph.n(), &ordered)?;
            let sidecar = args.sidecar.clone().or_else(|| args.out.as_ref().map(|o| o.with_extension("formula.json")));
            if let (Some(sidecar), Ok(vc)) = (sidecar, planar::min_vertex_cover(graph.n(), &ordered)) {
                let formula = Sidecar {
                    expected_opt_formula: Formula { e: ordered.len(), v: graph.n(), vc },
                    expected_opt: planar::vc_reduction_opt(graph.n(), ordered.len(), vc),
                };
                write(Some(&sidecar), &serde_json::to_string(&formula).expect("formula serializes"))?;
            }
            reduced
        }
        other => return Err(bad(format!("unknown generator {other:?}"))),
    };
    write(args.out.as_deref(), &io::instance_to_json(&instance))
}
