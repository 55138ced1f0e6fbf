//! The core decomposition: split a coupling matrix against a permuted mask,
//! form the linearized subproblem, and list the damping candidates a scan
//! would try.

use qsplit::instances::reg_instance;
use qsplit::rng::stream_rng;
use qsplit::splitting::{lambda_candidates, linearized_subproblem, split};
use qsplit::topology::{mask_for_problem, random_permutation, TopologyFamily};
use qsplit::SpinVector;

fn main() -> qsplit::Result<()> {
    let model = reg_instance(20)?.into_model();
    let mask = mask_for_problem(20, &TopologyFamily::chimera_shore(4))?;
    let mut rng = stream_rng(42, 0);
    let p = random_permutation(20, &mut rng);

    // A = a_quad + a_lin, entrywise: a_quad keeps exactly the entries the
    // permuted mask can carry, a_lin gets the rest (and the diagonal).
    let pair = split(&model, &mask, &p)?;
    let total = model.a().offdiag_edge_count();
    println!(
        "couplings: {} total = {} on hardware + {} linearized",
        total,
        pair.a_quad.offdiag_edge_count(),
        pair.a_lin.offdiag_edge_count()
    );

    // Around the current iterate the leftover part becomes a linear term:
    // minimize sᵀ·a_quad·s + cᵀs with c = 2·a_lin·s_prev − λ·s_prev.
    let s_prev = SpinVector::ones(20);
    let (b_sub, c) = linearized_subproblem(&pair, &s_prev, 1.0, true)?;
    println!("subproblem: {} hardware couplings, c[0..4] = {:?}", b_sub.offdiag_edge_count(), &c[..4]);

    // The scan tries midpoints between sorted gradient magnitudes: each
    // interval is one sign pattern of the damped gradient.
    let candidates = lambda_candidates(&pair, &s_prev, 8)?;
    println!("damping candidates ({}): {:?}", candidates.len(), candidates);
    Ok(())
}
