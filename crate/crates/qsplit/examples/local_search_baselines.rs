//! The two classical baselines: large-neighborhood local search (re-solve a
//! random subset exactly, everything else frozen) and steepest-descent k-Opt.

use qsplit::baselines::{k_opt, lnls_run, lnls_subproblem, LnlsConfig};
use qsplit::instances::random_ising;
use qsplit::rng::{random_spins, stream_rng};
use qsplit::subsolver::{BruteForceSampler, SolverConfig};
use qsplit::SpinVector;

fn main() -> qsplit::Result<()> {
    let n = 30;
    let mut rng = stream_rng(21, 0);
    let model = random_ising(n, &mut rng);

    // Restricting to an index set has no linearization error: subproblem
    // objective plus the frozen-part constant is the exact model energy.
    let s = SpinVector::new(random_spins(n, &mut rng))?;
    let sub = lnls_subproblem(&model, &s, &[0, 3, 7, 9])?;
    println!(
        "restricted subproblem over {:?}: {} couplings, frozen constant {:.4}",
        sub.indices,
        sub.b.offdiag_edge_count(),
        sub.constant
    );

    for m in [5, 10, 20] {
        let cfg = LnlsConfig { m, maxiter: 40, seed: 1 };
        let (state, _) = lnls_run(&model, &cfg, &BruteForceSampler, &SolverConfig::default())?;
        println!("lnls m={m:<2} best {:.4}", state.best_energy);
    }

    let s0 = SpinVector::new(random_spins(n, &mut rng))?;
    for k in [1, 2] {
        let (s_out, trace) = k_opt(&model, &s0, k)?;
        println!(
            "{k}-Opt from the same start: {:.4} after {} scans",
            model.energy(&s_out)?,
            trace.len() - 1
        );
    }
    Ok(())
}
