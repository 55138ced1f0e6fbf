//! Thin command-line front end over the library: benchmark runs, trace
//! aggregation, topology dumps, and instance generation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qsplit::bench::{
    ablation_counts, cli_run, curves, curves_to_csv, rank, read_trace_csv, Defaults, InstanceFilter,
    InstanceSpec, Method, RunSpec,
};
use qsplit::instances::{reg_ground_state, reg_instance, BestKnownTable};
use qsplit::splitting::LambdaMode;
use qsplit::topology::{chimera_mask, mask_for_problem, pegasus_mask, TopologyFamily};
use qsplit::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qsplit",
    version,
    about = "Masked-subproblem Ising heuristics: benchmark runs and analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run methods against instances, writing a trace CSV and a summary.
    Run(RunArgs),
    /// Aggregate a trace into per-method mean approximation-ratio curves.
    Curves(CurvesArgs),
    /// Rank instances by final splitting ratio; optionally compare methods.
    Rank(RankArgs),
    /// Inspect hardware connectivity graphs.
    Topology {
        #[command(subcommand)]
        command: TopologyCommand,
    },
    /// Generate instances in the model JSON format.
    Instance {
        #[command(subcommand)]
        command: InstanceCommand,
    },
    /// Print exact reference solutions where closed forms exist.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Instance spec, repeatable: `reg:N`, a Max-Cut edge-list file, or a
    /// model `.json` file.
    #[arg(long = "instance", required = true)]
    instances: Vec<String>,
    /// Method, repeatable: splitting, lnls, kopt, sa-full, sa-restricted, or
    /// a qualified label such as `lnls-m20` or `splitting-zero`.
    #[arg(long = "method", required = true)]
    methods: Vec<String>,
    /// Hardware family: `pegasus[:MIN]` or `chimera:ROWS,COLS,SHORE`.
    #[arg(long, default_value = "pegasus:2")]
    topology: String,
    /// Outer iterations (solver calls for single-call methods).
    #[arg(long)]
    maxiter: Option<usize>,
    /// Inner candidate evaluations per splitting iteration.
    #[arg(long)]
    maxsubiter: Option<usize>,
    /// Penalty-weight rule for bare `splitting`: scan, fixed:<v>, monotone,
    /// or zero.
    #[arg(long)]
    lambda_mode: Option<String>,
    /// Neighborhood size for bare `lnls`.
    #[arg(long)]
    m: Option<usize>,
    /// Flip bound for bare `kopt` (1 or 2).
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated run seeds; every (instance, method, seed) cell runs.
    #[arg(long)]
    seeds: Option<String>,
    /// CSV of `name,value` reference objectives for ratio reporting.
    #[arg(long)]
    best_known: Option<PathBuf>,
    /// Output directory for trace.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file overriding any subset of the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CurvesArgs {
    /// Trace CSV produced by `run`.
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    best_known: Option<PathBuf>,
    /// Instance filter, e.g. `>150` to keep reg instances larger than 150.
    #[arg(long)]
    filter: Option<String>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    /// Trace CSV produced by `run`.
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    best_known: Option<PathBuf>,
    /// Two method labels `A,B`; prints better/equal/worse counts for A vs B.
    #[arg(long)]
    ablation: Option<String>,
    /// Output CSV path for the rank table; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TopologyCommand {
    /// Print a graph as sorted 0-indexed `i j` edge lines with i < j.
    Dump {
        /// `pegasus[:SIZE]` or `chimera:ROWS,COLS,SHORE`.
        #[arg(long, conflicts_with = "family")]
        topology: Option<String>,
        /// Family name (`pegasus` or `chimera`); pair with --size.
        #[arg(long)]
        family: Option<String>,
        /// Size parameter for --family: Pegasus size, or Chimera shore.
        #[arg(long)]
        size: Option<usize>,
        /// Output format; only `edgelist` is supported.
        #[arg(long, default_value = "edgelist")]
        format: String,
        /// Grow the family to cover n nodes, then truncate to exactly n.
        #[arg(long)]
        n: Option<usize>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum InstanceCommand {
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        family: GenCommand,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Closed-form dense family with linearly graded couplings and biases.
    Reg {
        #[arg(long)]
        n: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact ground state of the `reg:N` instance.
    Reg {
        #[arg(long)]
        n: usize,
    },
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        seeds
            .push(part.parse().map_err(|_| Error::invalid(format!("bad seed {part:?}")))?);
    }
    if seeds.is_empty() {
        return Err(Error::invalid("empty seed list"));
    }
    Ok(seeds)
}

fn resolve_methods(args: &RunArgs, defaults: &Defaults) -> Result<Vec<Method>> {
    let lambda_mode = match &args.lambda_mode {
        Some(text) => text.parse::<LambdaMode>()?,
        None => LambdaMode::CandidateScan,
    };
    args.methods
        .iter()
        .map(|name| match name.as_str() {
            "splitting" => Ok(Method::Splitting { lambda_mode: lambda_mode.clone() }),
            "lnls" => Ok(Method::Lnls { m: args.m.unwrap_or(defaults.lnls.m) }),
            "kopt" => Ok(Method::KOpt { k: args.k.unwrap_or(defaults.kopt.k) }),
            other => Method::from_label(other),
        })
        .collect()
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("QSPLIT_THREADS") {
        Err(_) => Ok(None),
        Ok(text) => {
            let n: usize = text
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("QSPLIT_THREADS={text:?} is not a number")))?;
            Ok(Some(n))
        }
    }
}

fn load_table(path: &Option<PathBuf>) -> Result<BestKnownTable> {
    match path {
        Some(p) => BestKnownTable::load(p),
        None => Ok(BestKnownTable::default()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let defaults = match &args.config {
        Some(path) => Defaults::with_overrides(&std::fs::read_to_string(path)?)?,
        None => Defaults::builtin(),
    };
    let instances: Vec<InstanceSpec> = args
        .instances
        .iter()
        .map(|a| InstanceSpec::parse(a))
        .collect::<Result<_>>()?;
    let methods = resolve_methods(&args, &defaults)?;
    let seeds = match &args.seeds {
        Some(text) => parse_seeds(text)?,
        None => defaults.run.seeds.clone(),
    };
    let spec = RunSpec {
        instances,
        methods,
        topology: args.topology.parse()?,
        maxiter: args.maxiter.unwrap_or(defaults.run.maxiter),
        maxsubiter: args.maxsubiter.unwrap_or(defaults.run.maxsubiter),
        solver: defaults.solver_config(0),
        seeds,
        best_known: load_table(&args.best_known)?,
        out_dir: args.out.clone(),
        threads: threads_from_env()?,
    };
    let report = cli_run(&spec)?;

    let errored = report.cells.iter().filter(|c| c.error.is_some()).count();
    for cell in report.cells.iter().filter(|c| c.error.is_some()) {
        eprintln!(
            "error: {} / {} / seed {}: {}",
            cell.instance,
            cell.method,
            cell.seed,
            cell.error.as_deref().unwrap_or("")
        );
    }
    println!(
        "{} cells ({} errored), {} trace rows",
        report.cells.len(),
        errored,
        report.rows.len()
    );
    for cell in &report.cells {
        let best = cell
            .best_energy
            .map_or_else(|| "-".to_string(), |e| format!("{e:.6}"));
        let ratio = cell.ratio.map_or_else(|| "-".to_string(), |r| format!("{r:.4}"));
        println!(
            "{} {} seed={} best={} ratio={}",
            cell.instance, cell.method, cell.seed, best, ratio
        );
    }
    if let Some(dir) = &args.out {
        println!("wrote {}", dir.join("trace.csv").display());
        println!("wrote {}", dir.join("summary.json").display());
    }
    Ok(())
}

fn cmd_curves(args: CurvesArgs) -> Result<()> {
    let rows = read_trace_csv(&args.trace)?;
    let table = load_table(&args.best_known)?;
    let filter = args
        .filter
        .as_deref()
        .map(str::parse::<InstanceFilter>)
        .transpose()?;
    let (curve_rows, excluded) = curves(&rows, &table, filter)?;
    for name in &excluded {
        eprintln!("warning: no usable reference for {name}, skipped");
    }
    emit(&args.out, &curves_to_csv(&curve_rows))
}

fn cmd_rank(args: RankArgs) -> Result<()> {
    let rows = read_trace_csv(&args.trace)?;
    let table = load_table(&args.best_known)?;
    let (table_out, excluded) = rank(&rows, &table)?;
    for name in &excluded {
        eprintln!("warning: no usable reference for {name}, skipped");
    }
    emit(&args.out, &table_out.to_csv())?;
    if let Some(pair) = &args.ablation {
        let (a, b) = pair
            .split_once(',')
            .ok_or_else(|| Error::invalid("--ablation wants two labels as A,B"))?;
        let counts = ablation_counts(&rows, a.trim(), b.trim());
        println!("{}", serde_json::to_string_pretty(&counts)?);
    }
    Ok(())
}

fn cmd_topology(command: TopologyCommand) -> Result<()> {
    let TopologyCommand::Dump { topology, family, size, format, n, out } = command;
    if format != "edgelist" {
        return Err(Error::invalid(format!("unsupported format {format:?}")));
    }
    let family: TopologyFamily = match (topology, family) {
        (Some(spec), _) => spec.parse()?,
        (None, Some(name)) => match name.as_str() {
            "pegasus" => TopologyFamily::Pegasus { min_size: size.unwrap_or(2) },
            "chimera" => TopologyFamily::Chimera { rows: 1, cols: 1, shore: size.unwrap_or(4) },
            other => return Err(Error::invalid(format!("unknown family {other:?}"))),
        },
        (None, None) => return Err(Error::invalid("need --topology or --family")),
    };
    let mask = match n {
        Some(n) => mask_for_problem(n, &family)?,
        None => match family {
            TopologyFamily::Pegasus { min_size } => pegasus_mask(min_size)?,
            TopologyFamily::Chimera { rows, cols, shore } => chimera_mask(rows, cols, shore)?,
        },
    };
    emit(&out, &mask.to_edgelist_string())
}

fn cmd_instance(command: InstanceCommand) -> Result<()> {
    let InstanceCommand::Gen { family } = command;
    let GenCommand::Reg { n, out } = family;
    let model = reg_instance(n)?.into_model();
    emit(&out, &(model.to_json() + "\n"))
}

fn cmd_oracle(command: OracleCommand) -> Result<()> {
    let OracleCommand::Reg { n } = command;
    let (s, energy) = reg_ground_state(n)?;
    let doc = serde_json::json!({
        "n": n,
        "energy": energy,
        "spins": s.as_slice(),
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Curves(args) => cmd_curves(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Topology { command } => cmd_topology(command),
        Command::Instance { command } => cmd_instance(command),
        Command::Oracle { command } => cmd_oracle(command),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
