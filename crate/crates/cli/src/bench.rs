use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Deserialize;

use gvp::io::AnyInstance;
use gvp::rational::{format_rational, int};

use crate::{read_instance, solve_any, verified_revenue, CliResult, Failure, SolveOptions};

#[derive(Args)]
pub struct BenchArgs {
    /// JSON manifest: {"instances": [paths], "algorithms": [names], "oracle": bool, "epsilon": "1/10"}.
    /// Instance paths are relative to the manifest.
    #[arg(long)]
    manifest: PathBuf,
    /// CSV output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    instances: Vec<String>,
    #[serde(default)]
    algorithms: Vec<String>,
    /// Adds oracle and ratio columns.
    #[serde(default)]
    oracle: bool,
    #[serde(default = "default_epsilon")]
    epsilon: String,
    #[serde(default)]
    seed: Option<u64>,
}

fn default_epsilon() -> String {
    "1/10".into()
}

fn options(alg: &str, manifest: &Manifest) -> SolveOptions {
    SolveOptions {
        alg: alg.to_string(),
        epsilon: manifest.epsilon.clone(),
        cap: None,
        r: None,
        width: 4,
        seed: manifest.seed,
        coloring: None,
        decomposition: None,
    }
}

pub fn cmd_bench(args: BenchArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.manifest)
        .map_err(|e| Failure::Parse(format!("{}: {e}", args.manifest.display())))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", args.manifest.display())))?;
    let base = args.manifest.parent().map(PathBuf::from).unwrap_or_default();

    let sink: Box<dyn std::io::Write> = match &args.out {
        Some(path) => Box::new(
            std::fs::File::create(path).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let mut out = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| Failure::Internal(e.to_string());
    let header: &[&str] = if manifest.oracle {
        &["instance", "algorithm", "revenue", "oracle", "ratio", "elapsed_ms"]
    } else {
        &["instance", "algorithm", "revenue", "elapsed_ms"]
    };
    out.write_record(header).map_err(csv_err)?;

    for name in &manifest.instances {
        let instance: AnyInstance = read_instance(&base.join(name))?;
        let oracle = if manifest.oracle {
            let sol = solve_any(&instance, &options("oracle", &manifest))?;
            Some(verified_revenue(&instance, &sol)?)
        } else {
            None
        };
        for alg in &manifest.algorithms {
            let started = Instant::now();
            let sol = solve_any(&instance, &options(alg, &manifest))?;
            let elapsed = started.elapsed().as_millis();
            let revenue = verified_revenue(&instance, &sol)?;
            let mut row = vec![name.clone(), alg.clone(), format_rational(&revenue)];
            if let Some(opt) = &oracle {
                let ratio = if *opt == int(0) { int(1) } else { &revenue / opt };
                row.push(format_rational(opt));
                row.push(format_rational(&ratio));
            }
            row.push(elapsed.to_string());
            out.write_record(&row).map_err(csv_err)?;
        }
    }
    out.flush().map_err(|e| Failure::Internal(e.to_string()))
}
