//! The seeded simulated-annealing subsolver against exact brute force.

use qsplit::instances::random_ising;
use qsplit::rng::stream_rng;
use qsplit::subsolver::{brute_force_solve, sa_solve, subproblem_energy, Schedule, SolverConfig};

fn main() -> qsplit::Result<()> {
    let n = 18;
    let mut rng = stream_rng(2, 0);
    let model = random_ising(n, &mut rng);

    let (s_exact, e_exact) = brute_force_solve(model.a(), model.b())?;
    println!("exact minimum {e_exact:.4}");

    // Metropolis single-flip with a geometric inverse-temperature ramp;
    // num_reads independent restarts, best state wins. Same seed, same
    // answer, every time.
    for (reads, sweeps) in [(2, 20), (10, 100), (50, 500)] {
        let cfg = SolverConfig {
            num_reads: reads,
            sweeps,
            beta_schedule: Schedule::geometric(0.1, 10.0),
            seed: 9,
        };
        let s = sa_solve(model.a(), model.b(), &cfg)?;
        let e = subproblem_energy(model.a(), model.b(), &s);
        println!(
            "sa {reads:>2} reads x {sweeps:>3} sweeps: {e:.4} (gap {:.4})",
            e - e_exact
        );
        assert_eq!(
            s.as_slice(),
            sa_solve(model.a(), model.b(), &cfg)?.as_slice(),
            "same seed must reproduce"
        );
    }

    println!("exact argmin: {:?}", s_exact.as_slice());
    Ok(())
}
