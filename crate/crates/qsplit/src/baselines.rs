//! Comparison methods: large-neighborhood local search over random fixed
//! index sets (LNLS) and exhaustive k-flip steepest descent (k-Opt).

use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::{CouplingMatrix, IsingModel, SpinVector};
use crate::rng::{random_spins, stream_rng};
use crate::splitting::{IterationState, Trace, TraceRow};
use crate::subsolver::{Sampler, SolverConfig};

/// LNLS run parameters. `m` is the number of variables re-optimized per
/// iteration; the rest stay frozen at their previous values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LnlsConfig {
    pub m: usize,
    pub maxiter: usize,
    pub seed: u64,
}

impl LnlsConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.m < 1 || self.m > n {
            return Err(Error::invalid(format!(
                "subproblem size {} out of range 1..={n}",
                self.m
            )));
        }
        Ok(())
    }
}

/// Restriction of the model to `indices` with everything else frozen.
/// `objective(B, c, s_sub) + constant` equals the true model energy of the
/// written-back state; the restriction is exact, with no linearization gap.
#[derive(Debug, Clone)]
pub struct LnlsSubproblem {
    pub indices: Vec<usize>,
    pub b: CouplingMatrix,
    pub c: Vec<f64>,
    pub constant: f64,
}

impl LnlsSubproblem {
    /// Writes a subproblem solution back into a copy of `s_prev`.
    pub fn write_back(&self, s_prev: &SpinVector, s_sub: &SpinVector) -> Result<SpinVector> {
        if s_sub.len() != self.indices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.indices.len(),
                found: s_sub.len(),
            });
        }
        let mut out = s_prev.clone();
        for (x, &j) in self.indices.iter().enumerate() {
            out.set(j, s_sub[x]);
        }
        Ok(out)
    }
}

/// `B = A[J×J]`, `c_i = b_i + 2·Σ_{j∉J} A[i][j]·s_prev[j]` for `i ∈ J`,
/// plus the frozen-part energy as `constant`. An empty `j_set` produces the
/// empty subproblem, which solves to a no-op write-back.
pub fn lnls_subproblem(
    model: &IsingModel,
    s_prev: &SpinVector,
    j_set: &[usize],
) -> Result<LnlsSubproblem> {
    let n = model.n();
    if s_prev.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s_prev.len() });
    }
    let mut seen = vec![false; n];
    for &j in j_set {
        if j >= n {
            return Err(Error::IndexOutOfBounds { index: j, len: n });
        }
        if seen[j] {
            return Err(Error::invalid(format!("duplicate index {j} in j_set")));
        }
        seen[j] = true;
    }
    let m = j_set.len();
    let a = model.a();
    let b_sub = CouplingMatrix::from_symmetric_entries(
        m,
        (0..m).flat_map(|x| (x + 1..m).map(move |y| (x, y, a.get(j_set[x], j_set[y])))),
    )?;
    let c: Vec<f64> = j_set
        .iter()
        .map(|&j| {
            let frozen: f64 = a
                .row_iter(j)
                .filter(|&(q, _)| q != j && !seen[q])
                .map(|(q, v)| v * f64::from(s_prev[q]))
                .sum();
            model.b()[j] + 2.0 * frozen
        })
        .collect();
    // Frozen-part energy: quadratic over the complement, its bias, the
    // model offset, and the diagonal of A over j_set (constant in spins).
    let mut constant = model.offset();
    for p in 0..n {
        if seen[p] {
            constant += a.get(p, p);
            continue;
        }
        constant += model.b()[p] * f64::from(s_prev[p]);
        constant += f64::from(s_prev[p])
            * a.row_iter(p)
                .filter(|&(q, _)| q == p || !seen[q])
                .map(|(q, v)| {
                    if q == p {
                        v
                    } else {
                        v * f64::from(s_prev[q])
                    }
                })
                .sum::<f64>();
    }
    Ok(LnlsSubproblem { indices: j_set.to_vec(), b: b_sub, c, constant })
}

/// LNLS: each iteration draws a uniform random `m`-subset, re-optimizes it
/// with the sampler, and accepts the write-back unconditionally. With an
/// exact sampler the energy sequence is non-increasing because the previous
/// assignment stays feasible in every subproblem.
pub fn lnls_run(
    model: &IsingModel,
    cfg: &LnlsConfig,
    sampler: &dyn Sampler,
    solver_cfg: &SolverConfig,
) -> Result<(IterationState, Trace)> {
    let n = model.n();
    cfg.validate(n)?;
    let mut rng = stream_rng(cfg.seed, 0);
    let s0 = SpinVector::new(random_spins(n, &mut rng))?;
    let mut state = IterationState::initial(model, s0)?;
    let mut trace = Trace::new();
    trace.push(TraceRow {
        iteration: 0,
        subiteration: 0,
        lambda: None,
        energy: state.best_energy,
        best_energy: state.best_energy,
        wall_ms: 0.0,
    });
    for k in 1..=cfg.maxiter {
        let mut j_set = rand::seq::index::sample(&mut rng, n, cfg.m).into_vec();
        j_set.sort_unstable();
        let sub = lnls_subproblem(model, &state.s_current, &j_set)?;
        let call_seed = rng.gen();
        let start = Instant::now();
        let s_sub = sampler.solve(&sub.b, &sub.c, &solver_cfg.with_seed(call_seed))?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let cand = sub.write_back(&state.s_current, &s_sub)?;
        let energy = model.energy(&cand)?;
        let (best_s, best_energy) = if energy <= state.best_energy {
            (cand.clone(), energy)
        } else {
            (state.best_s, state.best_energy)
        };
        state = IterationState { s_current: cand, best_s, best_energy, k };
        trace.push(TraceRow {
            iteration: k,
            subiteration: 0,
            lambda: None,
            energy,
            best_energy,
            wall_ms,
        });
    }
    Ok((state, trace))
}

/// Steepest-descent k-Opt for k ∈ {1,2}: scan the whole ≤k-flip
/// neighborhood by delta evaluation, move to the best strictly improving
/// neighbor, stop at a local optimum. One trace row per full scan,
/// including the terminal scan that finds nothing.
pub fn k_opt(model: &IsingModel, s_start: &SpinVector, k: usize) -> Result<(SpinVector, Trace)> {
    let n = model.n();
    if s_start.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s_start.len() });
    }
    if k < 1 || k > 2 {
        return Err(Error::invalid(format!("k-Opt supports k in {{1,2}}, got {k}")));
    }
    let mut s = s_start.clone();
    let mut energy = model.energy(&s)?;
    let mut best_energy = energy;
    let mut trace = Trace::new();
    trace.push(TraceRow {
        iteration: 0,
        subiteration: 0,
        lambda: None,
        energy,
        best_energy,
        wall_ms: 0.0,
    });
    let a = model.a();
    let b = model.b();
    // The neighborhood is finite and every accepted move strictly improves,
    // so termination is certain; the cap only guards against float cycling.
    let scan_cap = 1000.max(50 * n);
    for scan in 1..=scan_cap {
        let start = Instant::now();
        let deltas: Vec<f64> = (0..n)
            .map(|i| {
                let h = a.offdiag_row_dot(i, s.as_slice());
                -4.0 * f64::from(s[i]) * h - 2.0 * b[i] * f64::from(s[i])
            })
            .collect();
        let mut best_move: Option<(f64, usize, Option<usize>)> = None;
        for i in 0..n {
            if best_move.map_or(deltas[i] < 0.0, |(d, _, _)| deltas[i] < d) {
                best_move = Some((deltas[i], i, None));
            }
        }
        if k == 2 {
            for i in 0..n {
                for j in i + 1..n {
                    let d = deltas[i]
                        + deltas[j]
                        + 8.0 * a.get(i, j) * f64::from(s[i]) * f64::from(s[j]);
                    if best_move.map_or(d < 0.0, |(bd, _, _)| d < bd) {
                        best_move = Some((d, i, Some(j)));
                    }
                }
            }
        }
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        match best_move {
            Some((d, i, j)) if d < 0.0 => {
                s.flip(i);
                if let Some(j) = j {
                    s.flip(j);
                }
                energy += d;
                best_energy = best_energy.min(energy);
                trace.push(TraceRow {
                    iteration: scan,
                    subiteration: 0,
                    lambda: None,
                    energy,
                    best_energy,
                    wall_ms,
                });
            }
            _ => {
                trace.push(TraceRow {
                    iteration: scan,
                    subiteration: 0,
                    lambda: None,
                    energy,
                    best_energy,
                    wall_ms,
                });
                return Ok((s, trace));
            }
        }
    }
    Ok((s, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_ising, reg_ground_state, reg_instance};
    use crate::subsolver::{brute_force_solve, subproblem_energy, BruteForceSampler};

    #[test]
    fn subproblem_hand_example() {
        // Only coupling A[0][1] = 1; freezing 1 and 2 at +1 leaves
        // c_0 = b_0 + 2·A[0][1]·1.
        let mut rows = vec![vec![0.0; 3]; 3];
        rows[0][1] = 1.0;
        rows[1][0] = 1.0;
        let model = IsingModel::from_dense(&rows, vec![0.3, 0.0, 0.0], 0.0).unwrap();
        let s = SpinVector::ones(3);
        let sub = lnls_subproblem(&model, &s, &[0]).unwrap();
        assert_eq!(sub.c, vec![0.3 + 2.0]);
        assert_eq!(sub.b.offdiag_edge_count(), 0);
    }

    #[test]
    fn subproblem_full_index_set_is_whole_problem() {
        let mut rng = stream_rng(20, 0);
        let model = random_ising(7, &mut rng);
        let s = SpinVector::new(random_spins(7, &mut rng)).unwrap();
        let j: Vec<usize> = (0..7).collect();
        let sub = lnls_subproblem(&model, &s, &j).unwrap();
        for i in 0..7 {
            for q in 0..7 {
                assert_eq!(sub.b.get(i, q), model.a().get(i, q));
            }
        }
        assert_eq!(sub.c, model.b());
        assert_eq!(sub.constant, model.offset());
    }

    #[test]
    fn subproblem_rejects_bad_index_sets() {
        let mut rng = stream_rng(21, 0);
        let model = random_ising(5, &mut rng);
        let s = SpinVector::ones(5);
        assert!(lnls_subproblem(&model, &s, &[5]).is_err());
        assert!(lnls_subproblem(&model, &s, &[1, 1]).is_err());
    }

    #[test]
    fn empty_index_set_solves_to_noop() {
        let mut rng = stream_rng(22, 0);
        let model = random_ising(5, &mut rng);
        let s = SpinVector::new(random_spins(5, &mut rng)).unwrap();
        let sub = lnls_subproblem(&model, &s, &[]).unwrap();
        let (s_sub, _) = brute_force_solve(&sub.b, &sub.c).unwrap();
        let out = sub.write_back(&s, &s_sub).unwrap();
        assert_eq!(out, s);
        assert!((sub.constant - model.energy(&s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn restriction_has_no_linearization_gap() {
        // Subproblem objective plus frozen constant reproduces the true
        // energy of the written-back state exactly.
        let mut rng = stream_rng(23, 0);
        for _ in 0..50 {
            let model = random_ising(10, &mut rng);
            let s = SpinVector::new(random_spins(10, &mut rng)).unwrap();
            let mut j = rand::seq::index::sample(&mut rng, 10, 4).into_vec();
            j.sort_unstable();
            let sub = lnls_subproblem(&model, &s, &j).unwrap();
            let (s_sub, e_sub) = brute_force_solve(&sub.b, &sub.c).unwrap();
            let cand = sub.write_back(&s, &s_sub).unwrap();
            let direct = model.energy(&cand).unwrap();
            assert!(
                (e_sub + sub.constant - direct).abs() < 1e-9,
                "{} vs {direct}",
                e_sub + sub.constant
            );
            assert!(
                (subproblem_energy(&sub.b, &sub.c, &s_sub) + sub.constant - direct).abs() < 1e-9
            );
        }
    }

    #[test]
    fn exact_subsolver_is_weakly_monotone() {
        let mut rng = stream_rng(24, 0);
        for trial in 0..5 {
            let model = random_ising(12, &mut rng);
            let cfg = LnlsConfig { m: 5, maxiter: 30, seed: trial };
            let (state, trace) =
                lnls_run(&model, &cfg, &BruteForceSampler, &SolverConfig::default()).unwrap();
            let mut prev = f64::INFINITY;
            for row in trace.rows() {
                assert!(row.energy <= prev + 1e-9, "trial {trial}: {prev} -> {}", row.energy);
                prev = row.energy;
            }
            assert_eq!(state.best_energy, model.energy(&state.best_s).unwrap());
            assert_eq!(trace.len(), 31);
        }
    }

    #[test]
    fn full_size_neighborhood_solves_in_one_iteration() {
        let mut rng = stream_rng(25, 0);
        let model = random_ising(10, &mut rng);
        let cfg = LnlsConfig { m: 10, maxiter: 1, seed: 0 };
        let (state, _) =
            lnls_run(&model, &cfg, &BruteForceSampler, &SolverConfig::default()).unwrap();
        let (_, opt) = brute_force_solve(model.a(), model.b()).unwrap();
        assert!((state.best_energy - opt).abs() < 1e-9);
    }

    #[test]
    fn single_variable_neighborhood_moves_one_flip_at_a_time() {
        let mut rng = stream_rng(26, 0);
        let model = random_ising(8, &mut rng);
        let cfg = LnlsConfig { m: 1, maxiter: 50, seed: 1 };
        let (_, trace) =
            lnls_run(&model, &cfg, &BruteForceSampler, &SolverConfig::default()).unwrap();
        let rows = trace.rows();
        for w in rows.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-9);
        }
        // Re-run to recover the states and check the one-flip property.
        let cfg2 = LnlsConfig { maxiter: 0, ..cfg };
        let (s0, _) = lnls_run(&model, &cfg2, &BruteForceSampler, &SolverConfig::default()).unwrap();
        let mut prev = s0.s_current;
        for iters in 1..=50 {
            let cfg_i = LnlsConfig { maxiter: iters, ..cfg };
            let (si, _) =
                lnls_run(&model, &cfg_i, &BruteForceSampler, &SolverConfig::default()).unwrap();
            let diff = prev
                .as_slice()
                .iter()
                .zip(si.s_current.as_slice())
                .filter(|(a, b)| a != b)
                .count();
            assert!(diff <= 1, "iteration {iters} changed {diff} spins");
            prev = si.s_current;
        }
    }

    #[test]
    fn reg_20_neighborhood_10_reaches_oracle() {
        // Fixed regression seeds. Reg instances have a second attractor at
        // the global sign flip of the ground state (energy (1−T*)·|bᵀs*|
        // instead of (1+T*)·(bᵀs*)) that captures about half of uniform
        // random starts and that no 10-variable exact re-optimization can
        // leave. These seeds start in the ground-state basin and must keep
        // converging there.
        let inst = reg_instance(20).unwrap();
        let (_, oracle) = reg_ground_state(20).unwrap();
        let seeds: [u64; 10] = [0, 6, 7, 11, 12, 13, 14, 15, 18, 19];
        let mut hits = 0;
        for seed in seeds {
            let cfg = LnlsConfig { m: 10, maxiter: 30, seed };
            let (state, _) =
                lnls_run(inst.model(), &cfg, &BruteForceSampler, &SolverConfig::default()).unwrap();
            if state.best_energy <= oracle + 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 8, "only {hits}/10 seeds reached the oracle optimum");
    }

    #[test]
    fn k_opt_returns_global_optimum_unchanged() {
        let mut rng = stream_rng(27, 0);
        let model = random_ising(8, &mut rng);
        let (opt, opt_e) = brute_force_solve(model.a(), model.b()).unwrap();
        for k in [1, 2] {
            let (out, trace) = k_opt(&model, &opt, k).unwrap();
            assert_eq!(out, opt);
            // Initial row plus one terminal scan.
            assert_eq!(trace.len(), 2);
            assert!((trace.rows()[1].energy - opt_e).abs() < 1e-9);
        }
    }

    #[test]
    fn k_opt_ferromagnetic_pair() {
        let rows = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        let model = IsingModel::from_dense(&rows, vec![0.0; 2], 0.0).unwrap();
        let start = SpinVector::new(vec![1, -1]).unwrap();
        let (out, trace) = k_opt(&model, &start, 1).unwrap();
        assert!((model.energy(&out).unwrap() - (-2.0)).abs() < 1e-12);
        assert_eq!(trace.rows().last().unwrap().energy, -2.0);
        assert!(k_opt(&model, &start, 3).is_err());
    }

    #[test]
    fn one_opt_fixed_points_have_no_improving_flip() {
        let mut rng = stream_rng(28, 0);
        for trial in 0..30 {
            let model = random_ising(10, &mut rng);
            let start = SpinVector::new(random_spins(10, &mut rng)).unwrap();
            let (out, trace) = k_opt(&model, &start, 1).unwrap();
            let e = model.energy(&out).unwrap();
            assert!((trace.rows().last().unwrap().energy - e).abs() < 1e-9);
            for i in 0..10 {
                let e_flip = model.energy(&out.flipped(i)).unwrap();
                assert!(e_flip >= e - 1e-12, "trial {trial}: flip {i} improves");
            }
        }
    }

    #[test]
    fn two_opt_fixed_points_survive_pair_flips() {
        let mut rng = stream_rng(29, 0);
        for trial in 0..10 {
            let model = random_ising(10, &mut rng);
            let start = SpinVector::new(random_spins(10, &mut rng)).unwrap();
            let (out, _) = k_opt(&model, &start, 2).unwrap();
            let e = model.energy(&out).unwrap();
            for i in 0..10 {
                let ei = model.energy(&out.flipped(i)).unwrap();
                assert!(ei >= e - 1e-12, "trial {trial}: single flip {i} improves");
                for j in i + 1..10 {
                    let mut s2 = out.flipped(i);
                    s2.flip(j);
                    let eij = model.energy(&s2).unwrap();
                    assert!(eij >= e - 1e-12, "trial {trial}: pair ({i},{j}) improves");
                }
            }
        }
    }

    #[test]
    fn wider_neighborhood_usually_but_not_always_wins() {
        // The 2-flip neighborhood strictly contains the 1-flip one, so every
        // 2-Opt fixed point is 1-flip stable (tested above). The descent
        // PATHS are not ordered, though: steeper pair moves can steer into a
        // worse local optimum from the same start. This freezes one concrete
        // counterexample plus the typical case.
        let mut rng = stream_rng(30, 0);
        let mut two_wins_or_ties = 0;
        let mut one_wins = 0;
        for _ in 0..20 {
            let model = random_ising(11, &mut rng);
            let start = SpinVector::new(random_spins(11, &mut rng)).unwrap();
            let (s1, _) = k_opt(&model, &start, 1).unwrap();
            let (s2, _) = k_opt(&model, &start, 2).unwrap();
            let e1 = model.energy(&s1).unwrap();
            let e2 = model.energy(&s2).unwrap();
            if e2 <= e1 + 1e-12 {
                two_wins_or_ties += 1;
            } else {
                one_wins += 1;
            }
        }
        assert!(two_wins_or_ties >= 15, "2-Opt won only {two_wins_or_ties}/20");
        assert!(
            one_wins >= 1,
            "path counterexample disappeared; revisit the neighborhood-ordering assumption"
        );
    }

    #[test]
    fn delta_scan_matches_direct_energy_accounting() {
        // Incremental energies along the k-Opt path agree with fresh
        // evaluation at the end point.
        let mut rng = stream_rng(31, 0);
        for _ in 0..20 {
            let model = random_ising(9, &mut rng);
            let start = SpinVector::new(random_spins(9, &mut rng)).unwrap();
            for k in [1, 2] {
                let (out, trace) = k_opt(&model, &start, k).unwrap();
                let direct = model.energy(&out).unwrap();
                let traced = trace.rows().last().unwrap().energy;
                assert!((traced - direct).abs() < 1e-9, "k={k}: {traced} vs {direct}");
                let mut prev = f64::INFINITY;
                for row in trace.rows() {
                    assert!(row.energy <= prev + 1e-12);
                    prev = row.energy;
                }
            }
        }
    }
}
