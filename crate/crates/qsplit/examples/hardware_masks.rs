//! Hardware connectivity graphs: Chimera grids, Pegasus graphs, truncation
//! to problem size, and random relabeling.

use qsplit::rng::stream_rng;
use qsplit::topology::{
    chimera_mask, mask_for_problem, pegasus_mask, permuted_mask, random_permutation,
    TopologyFamily,
};

fn main() -> qsplit::Result<()> {
    let cell = chimera_mask(1, 1, 4)?;
    println!("{}: {} nodes, {} edges", cell.label(), cell.n(), cell.edge_count());
    println!("neighbors of 0: {:?}", cell.neighbors(0));

    let grid = chimera_mask(3, 3, 4)?;
    println!("{}: {} nodes, {} edges", grid.label(), grid.n(), grid.edge_count());

    for size in 2..=4 {
        let p = pegasus_mask(size)?;
        println!("{}: {} nodes, {} edges", p.label(), p.n(), p.edge_count());
    }

    // A family grows until it covers the problem, then truncates to exactly
    // n nodes. 60 spins exceed P_2 (48 qubits), so P_3 gets cut down.
    let mask = mask_for_problem(60, &TopologyFamily::pegasus())?;
    println!("fitted 60-spin mask: {} ({} edges)", mask.label(), mask.edge_count());

    // Random relabeling exposes different couplings to the quadratic part
    // each iteration while preserving the structure.
    let mut rng = stream_rng(7, 0);
    let p = random_permutation(mask.n(), &mut rng);
    let shuffled = permuted_mask(&mask, &p)?;
    println!(
        "permuted mask keeps {} edges (was {})",
        shuffled.edge_count(),
        mask.edge_count()
    );
    Ok(())
}
