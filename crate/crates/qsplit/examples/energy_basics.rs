//! Model construction and energy evaluation: dense input, QUBO conversion,
//! and single-flip deltas.

use qsplit::ising::{qubo_to_ising, IsingModel, QuboModel, SpinVector};

fn main() -> qsplit::Result<()> {
    // E(s) = sᵀAs + bᵀs + offset over s ∈ {−1, +1}ⁿ. Dense input is
    // symmetrized on load; the flag records when that happened.
    let a = vec![
        vec![0.0, 1.0, -0.5],
        vec![1.0, 0.0, 2.0],
        vec![-0.5, 2.0, 0.0],
    ];
    let model = IsingModel::from_dense(&a, vec![0.5, 0.0, -1.0], 3.0)?;
    println!("n = {}, symmetrized = {}", model.n(), model.was_symmetrized());

    let s = SpinVector::new(vec![1, -1, 1])?;
    println!("E({:?}) = {}", s.as_slice(), model.energy(&s)?);

    // delta_energy(i) is E(flip i) − E(s), computed from local fields.
    for i in 0..model.n() {
        let delta = model.delta_energy(&s, i)?;
        let direct = model.energy(&s.flipped(i))? - model.energy(&s)?;
        println!("flip {i}: delta = {delta:+.3} (direct {direct:+.3})");
    }

    // A QUBO min xᵀQx over x ∈ {0,1}ⁿ maps to spins via x = (1+s)/2.
    let q = QuboModel::from_dense(&[vec![-1.0, 2.0], vec![2.0, -1.0]])?;
    let ising = qubo_to_ising(&q);
    for bits in 0..4u32 {
        let x: Vec<u8> = (0..2).map(|i| (bits >> i & 1) as u8).collect();
        let qubo_value = q.energy_binary(&x)?;
        let s = SpinVector::new(x.iter().map(|&v| if v == 1 { 1 } else { -1 }).collect())?;
        println!(
            "x = {:?}: qubo {qubo_value:+.2}, ising {:+.2}",
            x,
            ising.energy(&s)?
        );
    }
    Ok(())
}
