use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};

use qcwhitney::bounds::{bounds_report, BoundsInput};
use qcwhitney::domains::Domain;
use qcwhitney::pipeline::{
    bounds_json, run_capacity, run_decompose, run_verify, ExperimentConfig,
};
use qcwhitney::qcmaps;
use qcwhitney::Result;

#[derive(Parser)]
#[command(
    name = "qcwhitney",
    version,
    about = "Whitney decompositions, quasiconformal image families and condenser capacities"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decompose a domain into Whitney cells and report family metrics
    Decompose(RunArgs),
    /// Map a Whitney family and check the images against the distortion bounds
    Verify(RunArgs),
    /// Estimate a condenser capacity on a grid
    Capacity(RunArgs),
    /// Evaluate the dilatation and comparability bounds for given constants
    Bounds(BoundsArgs),
    /// List the map catalog
    ListMaps {
        /// Ambient dimension of the listed maps
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// List the domain catalog
    ListDomains,
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ambient dimension (2 or 3)
    #[arg(long)]
    dim: Option<usize>,
    /// Domain catalog name (see list-domains)
    #[arg(long)]
    domain: Option<String>,
    /// Axis-aligned box domain
    #[arg(long, value_name = "xmin,ymin[,zmin],xmax,ymax[,zmax]", allow_hyphen_values = true)]
    r#box: Option<String>,
    /// Map catalog name (see list-maps)
    #[arg(long)]
    map: Option<String>,
    /// Map parameters, e.g. a=2.0,center_x=0.0
    #[arg(long, value_name = "k=v,...", allow_hyphen_values = true)]
    map_params: Option<String>,
    /// Finest subdivision level of the decomposition
    #[arg(long)]
    max_level: Option<u32>,
    /// Sample lattice divisions per cell edge
    #[arg(long)]
    divisions: Option<usize>,
    /// Energy exponent (defaults to the dimension for capacity runs)
    #[arg(long)]
    p: Option<f64>,
    /// Solver grid step
    #[arg(long)]
    h: Option<f64>,
    /// Solver convergence tolerance (relative energy decrease)
    #[arg(long)]
    tol: Option<f64>,
    /// Solver iteration cap
    #[arg(long)]
    max_iter: Option<u64>,
    /// Capacity lower-bound constant 1/K(n); derived for n = 2 when absent
    #[arg(long = "Cn")]
    cn: Option<f64>,
    /// Output directory (default: out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Centered ring condenser r,R[,cx,cy[,cz]]
    #[arg(long, allow_hyphen_values = true)]
    ring: Option<String>,
    /// Sample CSV for the zero plate
    #[arg(long)]
    plate0: Option<PathBuf>,
    /// Sample CSV for the one plate
    #[arg(long)]
    plate1: Option<PathBuf>,
    /// Boundary probe count for the image-domain distance oracle
    #[arg(long)]
    probes: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Capacity distortion of the map
    #[arg(long = "Q")]
    q: f64,
    /// Embedding coefficient of the ball inside the domain
    #[arg(long = "Cr")]
    cr: f64,
    /// Ambient dimension
    #[arg(long)]
    n: usize,
    /// Capacity lower-bound constant 1/K(n)
    #[arg(long = "Cn")]
    cn: f64,
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = args.dim {
        cfg.dim = Some(v);
    }
    if let Some(v) = &args.domain {
        cfg.domain = Some(v.clone());
    }
    if let Some(v) = &args.r#box {
        cfg.set("box", v)?;
    }
    if let Some(v) = &args.map {
        cfg.map = Some(v.clone());
    }
    if let Some(v) = &args.map_params {
        cfg.set("map_params", v)?;
    }
    if let Some(v) = args.max_level {
        cfg.max_level = Some(v);
    }
    if let Some(v) = args.divisions {
        cfg.divisions = Some(v);
    }
    if let Some(v) = args.p {
        cfg.p = Some(v);
    }
    if let Some(v) = args.h {
        cfg.h = Some(v);
    }
    if let Some(v) = args.tol {
        cfg.tol = Some(v);
    }
    if let Some(v) = args.max_iter {
        cfg.max_iter = Some(v);
    }
    if let Some(v) = args.cn {
        cfg.cn = Some(v);
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = &args.ring {
        cfg.set("ring", v)?;
    }
    if let Some(v) = &args.plate0 {
        cfg.plate0 = Some(v.clone());
    }
    if let Some(v) = &args.plate1 {
        cfg.plate1 = Some(v.clone());
    }
    if let Some(v) = args.probes {
        cfg.probes = Some(v);
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Decompose(args) => {
            let cfg = build_config(&args)?;
            let outcome = run_decompose(&cfg)?;
            Ok(if outcome.coverage_low { 2 } else { 0 })
        }
        Cmd::Verify(args) => {
            let cfg = build_config(&args)?;
            run_verify(&cfg)?;
            Ok(0)
        }
        Cmd::Capacity(args) => {
            let cfg = build_config(&args)?;
            run_capacity(&cfg)?;
            Ok(0)
        }
        Cmd::Bounds(args) => {
            let input = BoundsInput::new(args.q, args.cr, args.n, args.cn)?;
            let report = bounds_report(&input)?;
            println!("{}", bounds_json(&report).render_pretty().trim_end());
            Ok(0)
        }
        Cmd::ListMaps { dim } => {
            for (name, d, q, summary) in qcmaps::catalog(dim) {
                println!("{name:<12} n={d}  Q={q:<8.4} {summary}");
            }
            Ok(0)
        }
        Cmd::ListDomains => {
            for (name, d, summary) in Domain::catalog() {
                println!("{name:<12} n={d}  {summary}");
            }
            Ok(0)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap uses 2 for usage errors; this tool reserves 2 for the
            // coverage warning and reports usage problems as 1.
            process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.exit_code());
        }
    }
}
