//! The benchmark harness in-process: run a method grid, then aggregate the
//! trace into ratio curves, a rank table, and an ablation comparison.

use qsplit::bench::{
    ablation_counts, cli_run, curves, curves_to_csv, rank, InstanceSpec, Method, RunSpec,
};
use qsplit::instances::BestKnownTable;
use qsplit::splitting::LambdaMode;
use qsplit::subsolver::SolverConfig;
use qsplit::topology::TopologyFamily;

fn main() -> qsplit::Result<()> {
    let spec = RunSpec {
        instances: vec![InstanceSpec::parse("reg:20")?, InstanceSpec::parse("reg:30")?],
        methods: vec![
            Method::Splitting { lambda_mode: LambdaMode::CandidateScan },
            Method::Splitting { lambda_mode: LambdaMode::Zero },
            Method::Lnls { m: 10 },
            Method::SaFull,
        ],
        topology: TopologyFamily::chimera_shore(4),
        maxiter: 6,
        maxsubiter: 8,
        solver: SolverConfig { num_reads: 10, sweeps: 100, ..SolverConfig::default() },
        seeds: vec![0, 1, 2],
        best_known: BestKnownTable::default(),
        out_dir: None,
        threads: None,
    };
    let report = cli_run(&spec)?;
    println!("{} cells, {} trace rows", report.cells.len(), report.rows.len());

    // Mean best-so-far ratio per solver call, averaged over instances and
    // seeds; reg instances fall back to the exact ground-state reference.
    let (curve, _) = curves(&report.rows, &spec.best_known, None)?;
    let csv = curves_to_csv(&curve);
    for line in csv.lines().take(5) {
        println!("{line}");
    }
    println!("...");

    let (table, _) = rank(&report.rows, &spec.best_known)?;
    print!("{}", table.to_csv());

    let counts = ablation_counts(&report.rows, "splitting", "splitting-zero");
    println!(
        "damping vs zero: {}/{}/{} better/equal/worse of {}",
        counts.better, counts.equal, counts.worse, counts.total
    );
    Ok(())
}
