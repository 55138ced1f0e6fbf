//! End-to-end splitting run: iterate masked subproblem solves with a damping
//! scan and print the improvement trace.

use qsplit::instances::{reg_ground_state, reg_instance};
use qsplit::splitting::{run_splitting, SplitConfig};
use qsplit::subsolver::{SaSampler, SolverConfig};
use qsplit::topology::{mask_for_problem, TopologyFamily};

fn main() -> qsplit::Result<()> {
    let n = 40;
    let model = reg_instance(n)?.into_model();
    let mask = mask_for_problem(n, &TopologyFamily::pegasus())?;
    println!("instance reg:{n} on {} ({} edges)", mask.label(), mask.edge_count());

    let cfg = SplitConfig { maxiter: 8, maxsubiter: 10, seed: 3, ..SplitConfig::default() };
    let solver = SolverConfig { num_reads: 20, sweeps: 200, ..SolverConfig::default() };
    let (state, trace) = run_splitting(&model, &mask, &cfg, &SaSampler, &solver)?;

    // One row per solver call; lambda is the damping weight tried.
    for row in trace.rows().iter().take(6) {
        println!(
            "iter {}.{:<2} lambda {:>8} energy {:>9.4} best {:>9.4}",
            row.iteration,
            row.subiteration,
            row.lambda.map_or_else(|| "-".into(), |l| format!("{l:.3}")),
            row.energy,
            row.best_energy
        );
    }
    println!("... {} rows total", trace.len());

    let (_, ground) = reg_ground_state(n)?;
    println!(
        "best {:.4} vs exact ground {:.4} (ratio {:.4})",
        state.best_energy,
        ground,
        state.best_energy / ground
    );
    Ok(())
}
