//! Inner solvers for the masked subproblems `min_s sᵀBs + cᵀs`: seeded
//! simulated annealing, exhaustive brute force, and the sampler seam where a
//! hardware client could plug in.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{CouplingMatrix, IsingModel, SpinVector};
use crate::rng::{random_spins, stream_rng};
use crate::topology::{apply_mask, HardwareMask};

/// Inverse-temperature schedule for annealing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Geometric,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub beta_start: f64,
    pub beta_end: f64,
    pub kind: ScheduleKind,
}

impl Schedule {
    pub fn geometric(beta_start: f64, beta_end: f64) -> Self {
        Schedule { beta_start, beta_end, kind: ScheduleKind::Geometric }
    }

    pub fn linear(beta_start: f64, beta_end: f64) -> Self {
        Schedule { beta_start, beta_end, kind: ScheduleKind::Linear }
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta_start < self.beta_end) {
            return Err(Error::invalid(format!(
                "beta schedule must increase: {} .. {}",
                self.beta_start, self.beta_end
            )));
        }
        if self.kind == ScheduleKind::Geometric && self.beta_start <= 0.0 {
            return Err(Error::invalid("geometric schedule needs beta_start > 0"));
        }
        Ok(())
    }

    /// One inverse temperature per sweep, endpoints included.
    pub fn betas(&self, sweeps: usize) -> Vec<f64> {
        if sweeps == 1 {
            return vec![self.beta_end];
        }
        let steps = (sweeps - 1) as f64;
        (0..sweeps)
            .map(|t| {
                let f = t as f64 / steps;
                match self.kind {
                    ScheduleKind::Geometric => {
                        self.beta_start * (self.beta_end / self.beta_start).powf(f)
                    }
                    ScheduleKind::Linear => self.beta_start + f * (self.beta_end - self.beta_start),
                }
            })
            .collect()
    }
}

/// Hyperparameters of the annealing subsolver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Independent restarts; the best sampled state across all of them wins.
    pub num_reads: usize,
    /// Full single-flip passes over the spins per read.
    pub sweeps: usize,
    pub beta_schedule: Schedule,
    /// Base seed; read r draws from the stream (seed, r).
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            num_reads: 100,
            sweeps: 1000,
            beta_schedule: Schedule::geometric(0.1, 10.0),
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_reads < 1 {
            return Err(Error::invalid("num_reads must be at least 1"));
        }
        if self.sweeps < 1 {
            return Err(Error::invalid("sweeps must be at least 1"));
        }
        self.beta_schedule.validate()
    }
}

/// `sᵀBs + cᵀs` for a subproblem without constant term.
pub fn subproblem_energy(b: &CouplingMatrix, c: &[f64], s: &SpinVector) -> f64 {
    let lin: f64 = c
        .iter()
        .zip(s.as_slice())
        .map(|(&ci, &si)| ci * f64::from(si))
        .sum();
    b.quad_form_spins(s.as_slice()) + lin
}

/// The seam between the outer iteration and whatever minimizes
/// `sᵀBs + cᵀs`. `B` is always supported on the active hardware mask by the
/// time it reaches an implementation; a physical annealer client would
/// implement this trait.
pub trait Sampler {
    fn solve(&self, b: &CouplingMatrix, c: &[f64], cfg: &SolverConfig) -> Result<SpinVector>;
}

/// Simulated-annealing sampler (best-of-reads Metropolis single flip).
#[derive(Debug, Clone, Copy, Default)]
pub struct SaSampler;

impl Sampler for SaSampler {
    fn solve(&self, b: &CouplingMatrix, c: &[f64], cfg: &SolverConfig) -> Result<SpinVector> {
        sa_solve(b, c, cfg)
    }
}

/// Exhaustive sampler for small subproblems; ignores the annealing fields of
/// the config.
#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForceSampler;

impl Sampler for BruteForceSampler {
    fn solve(&self, b: &CouplingMatrix, c: &[f64], _cfg: &SolverConfig) -> Result<SpinVector> {
        brute_force_solve(b, c).map(|(s, _)| s)
    }
}

/// Flat neighbor lists for the annealing hot loop. The diagonal of `B` is
/// constant on spin vectors, so it is dropped from the dynamics.
struct Csr {
    offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Csr {
    fn from_offdiag(b: &CouplingMatrix) -> Csr {
        let n = b.n();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        offsets.push(0);
        for i in 0..n {
            for (j, v) in b.row_iter(i) {
                if j != i {
                    cols.push(j as u32);
                    vals.push(v);
                }
            }
            offsets.push(cols.len());
        }
        Csr { offsets, cols, vals }
    }

    fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
        (&self.cols[lo..hi], &self.vals[lo..hi])
    }
}

/// Best-of-`num_reads` Metropolis single-flip annealing on
/// `E(s) = sᵀBs + cᵀs`. Deterministic per seed: read r uses an independent
/// generator derived from (seed, r), so results do not depend on whether
/// reads run concurrently. Variables with no couplings are set exactly to
/// `−sign(c_i)` afterwards, with zero bias mapping to +1.
pub fn sa_solve(b: &CouplingMatrix, c: &[f64], cfg: &SolverConfig) -> Result<SpinVector> {
    let n = b.n();
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: c.len() });
    }
    cfg.validate()?;
    if n == 0 {
        return Ok(SpinVector::ones(0));
    }

    let csr = Csr::from_offdiag(b);
    let betas = cfg.beta_schedule.betas(cfg.sweeps);

    let mut best: Option<(f64, Vec<i8>)> = None;
    for read in 0..cfg.num_reads {
        let mut rng = stream_rng(cfg.seed, read as u64);
        let mut s = random_spins(n, &mut rng);
        // Local fields h_i = Σ_{j≠i} B_ij s_j, maintained under flips.
        let mut h: Vec<f64> = (0..n)
            .map(|i| {
                let (cols, vals) = csr.row(i);
                cols.iter()
                    .zip(vals)
                    .map(|(&j, &v)| v * f64::from(s[j as usize]))
                    .sum()
            })
            .collect();
        let mut energy = {
            let quad: f64 = (0..n).map(|i| h[i] * f64::from(s[i])).sum();
            let lin: f64 = (0..n).map(|i| c[i] * f64::from(s[i])).sum();
            quad + lin
        };
        let mut read_best = energy;
        let mut read_best_s = s.clone();

        for &beta in &betas {
            for i in 0..n {
                let si = f64::from(s[i]);
                let delta = -4.0 * si * h[i] - 2.0 * c[i] * si;
                if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                    s[i] = -s[i];
                    energy += delta;
                    let snew = f64::from(s[i]);
                    let (cols, vals) = csr.row(i);
                    for (&j, &v) in cols.iter().zip(vals) {
                        h[j as usize] += 2.0 * snew * v;
                    }
                    if energy < read_best {
                        read_best = energy;
                        read_best_s.copy_from_slice(&s);
                    }
                }
            }
        }

        match &best {
            Some((e, _)) if *e <= read_best => {}
            _ => best = Some((read_best, read_best_s)),
        }
    }

    let (_, mut s) = best.expect("num_reads >= 1");
    for i in 0..n {
        if csr.row(i).0.is_empty() {
            s[i] = if c[i] > 0.0 { -1 } else { 1 };
        }
    }
    SpinVector::new(s)
}

/// Largest subproblem `brute_force_solve` will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 26;

/// Exact minimizer of `sᵀBs + cᵀs` by enumeration, with ties broken toward
/// the lexicographically smallest vector under −1 < +1.
pub fn brute_force_solve(b: &CouplingMatrix, c: &[f64]) -> Result<(SpinVector, f64)> {
    let n = b.n();
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: c.len() });
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    if n == 0 {
        return Ok((SpinVector::ones(0), 0.0));
    }

    let csr = Csr::from_offdiag(b);
    let diag: f64 = (0..n).map(|i| b.get(i, i)).sum();

    // Enumerate in lexicographic order: spin i is bit n−1−i of the counter,
    // bit 0 → −1, so counter order is exactly lex order and strict-improvement
    // replacement keeps the lex-smallest tie winner. Increments flip the
    // trailing-ones block plus one more bit (amortized two flips), and the
    // running energy moves by single-flip deltas.
    let mut s = vec![-1i8; n];
    let mut h: Vec<f64> = (0..n)
        .map(|i| {
            let (cols, vals) = csr.row(i);
            cols.iter()
                .zip(vals)
                .map(|(&j, &v)| v * f64::from(s[j as usize]))
                .sum()
        })
        .collect();
    let mut energy = {
        let quad: f64 = (0..n).map(|i| h[i] * f64::from(s[i])).sum();
        let lin: f64 = (0..n).map(|i| c[i] * f64::from(s[i])).sum();
        quad + lin + diag
    };

    let mut best_energy = energy;
    let mut best_s = s.clone();

    let flip = |s: &mut Vec<i8>, h: &mut Vec<f64>, energy: &mut f64, i: usize| {
        let si = f64::from(s[i]);
        *energy += -4.0 * si * h[i] - 2.0 * c[i] * si;
        s[i] = -s[i];
        let snew = f64::from(s[i]);
        let (cols, vals) = csr.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            h[j as usize] += 2.0 * snew * v;
        }
    };

    for x in 1u64..(1u64 << n) {
        // Bits that change from x−1 to x.
        let mut changed = x ^ (x - 1);
        while changed != 0 {
            let bit = changed.trailing_zeros() as usize;
            flip(&mut s, &mut h, &mut energy, n - 1 - bit);
            changed &= changed - 1;
        }
        if energy < best_energy {
            // Resync against delta drift before accepting: recompute exactly
            // and only replace on a genuine improvement.
            let exact = subproblem_energy(b, c, &SpinVector::new(s.clone())?);
            energy = exact;
            if exact < best_energy {
                best_energy = exact;
                best_s.copy_from_slice(&s);
            }
        }
    }

    Ok((SpinVector::new(best_s)?, best_energy))
}

/// Annealing on the mask-truncated objective `(A ⊙ M, b)`. This is the
/// hardware-restricted baseline: it optimizes only the couplings the mask
/// keeps, and callers report the returned state's energy under the full
/// model.
pub fn restricted_sa_solve(
    m: &IsingModel,
    mask: &HardwareMask,
    cfg: &SolverConfig,
) -> Result<SpinVector> {
    if mask.n() != m.n() {
        return Err(Error::DimensionMismatch { expected: m.n(), found: mask.n() });
    }
    let masked = apply_mask(m.a(), mask)?;
    sa_solve(&masked, m.b(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::chimera_mask;

    fn dense(rows: &[Vec<f64>]) -> CouplingMatrix {
        CouplingMatrix::from_dense_rows(rows).unwrap().0
    }

    /// Independent exhaustive reference: recursive full recompute, first
    /// minimum in lexicographic generation order.
    fn oracle_min(b: &CouplingMatrix, c: &[f64]) -> (Vec<i8>, f64) {
        let n = c.len();
        let mut best: Option<(Vec<i8>, f64)> = None;
        let mut s = vec![-1i8; n];
        loop {
            let sv = SpinVector::new(s.clone()).unwrap();
            let e = subproblem_energy(b, c, &sv);
            if best.as_ref().map_or(true, |(_, be)| e < *be) {
                best = Some((s.clone(), e));
            }
            // Advance lexicographically: rightmost −1 becomes +1.
            let mut i = n;
            while i > 0 && s[i - 1] == 1 {
                s[i - 1] = -1;
                i -= 1;
            }
            if i == 0 {
                break;
            }
            s[i - 1] = 1;
        }
        best.unwrap()
    }

    fn quick_cfg(seed: u64) -> SolverConfig {
        SolverConfig {
            num_reads: 20,
            sweeps: 200,
            ..SolverConfig::default()
        }
        .with_seed(seed)
    }

    #[test]
    fn decoupled_spins_follow_bias_signs() {
        let b = CouplingMatrix::zeros(2);
        let s = sa_solve(&b, &[3.0, -2.0], &quick_cfg(1)).unwrap();
        assert_eq!(s.as_slice(), &[-1, 1]);

        // Zero bias on a decoupled spin resolves to +1.
        let b = CouplingMatrix::zeros(3);
        let s = sa_solve(&b, &[0.0, -1.0, 0.0], &quick_cfg(2)).unwrap();
        assert_eq!(s.as_slice(), &[1, 1, 1]);
    }

    #[test]
    fn ferromagnetic_pair_reaches_ground_state() {
        let b = dense(&[vec![0.0, -1.0], vec![-1.0, 0.0]]);
        let s = sa_solve(&b, &[0.0, 0.0], &quick_cfg(3)).unwrap();
        assert_eq!(s.as_slice()[0], s.as_slice()[1]);
        assert_eq!(subproblem_energy(&b, &[0.0, 0.0], &s), -2.0);
    }

    #[test]
    fn sa_is_seed_deterministic() {
        let mut rng = stream_rng(77, 0);
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let b = dense(&rows);
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = sa_solve(&b, &c, &quick_cfg(42)).unwrap();
        let b2 = sa_solve(&b, &c, &quick_cfg(42)).unwrap();
        assert_eq!(a, b2);
        for &v in a.as_slice() {
            assert!(v == 1 || v == -1);
        }
    }

    #[test]
    fn brute_force_basics_and_tie_rule() {
        let b = CouplingMatrix::zeros(1);
        let (s, e) = brute_force_solve(&b, &[1.0]).unwrap();
        assert_eq!(s.as_slice(), &[-1]);
        assert_eq!(e, -1.0);

        // Ferromagnetic pair: both aligned states reach −2; the tie rule
        // picks (−1,−1).
        let b = dense(&[vec![0.0, -1.0], vec![-1.0, 0.0]]);
        let (s, e) = brute_force_solve(&b, &[0.0, 0.0]).unwrap();
        assert_eq!(s.as_slice(), &[-1, -1]);
        assert_eq!(e, -2.0);

        let too_big = CouplingMatrix::zeros(27);
        assert!(brute_force_solve(&too_big, &vec![0.0; 27]).is_err());
    }

    #[test]
    fn brute_force_matches_independent_enumeration() {
        for seed in 0..20u64 {
            let mut rng = stream_rng(900 + seed, 0);
            let n = 1 + (seed as usize % 9);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let b = dense(&rows);
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (s, e) = brute_force_solve(&b, &c).unwrap();
            let (os, oe) = oracle_min(&b, &c);
            assert_eq!(s.as_slice(), os.as_slice(), "seed {seed}");
            assert!((e - oe).abs() < 1e-9, "seed {seed}: {e} vs {oe}");
        }
    }

    #[test]
    fn brute_force_diagonal_contributes_constant() {
        // Diagonal shifts every energy equally and must not change argmin.
        let b = dense(&[vec![5.0, -1.0], vec![-1.0, 5.0]]);
        let (s, e) = brute_force_solve(&b, &[0.0, 0.0]).unwrap();
        assert_eq!(s.as_slice(), &[-1, -1]);
        assert_eq!(e, 8.0);
    }

    #[test]
    fn sa_finds_optimum_on_dense_12_spin_instances() {
        // Regression over fixed seeds: generous schedule against the
        // exhaustive optimum.
        let cfg = SolverConfig {
            num_reads: 100,
            sweeps: 2000,
            ..SolverConfig::default()
        };
        let n = 12;
        let trials = 100;
        let mut hits = 0;
        for t in 0..trials {
            let mut rng = stream_rng(5000 + t as u64, 0);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let b = dense(&rows);
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = sa_solve(&b, &c, &cfg.with_seed(t as u64)).unwrap();
            let (_, opt) = brute_force_solve(&b, &c).unwrap();
            if (subproblem_energy(&b, &c, &s) - opt).abs() < 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 95, "SA matched brute force on {hits}/{trials} instances");
    }

    #[test]
    fn restricted_sa_full_and_empty_masks() {
        let mut rng = stream_rng(31, 0);
        let n = 8;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let b = dense(&rows);
        let bias: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let model = IsingModel::new(b.clone(), bias.clone(), 0.0).unwrap();

        // Complete mask: identical to annealing the full model. The full
        // matrix keeps a diagonal the mask drops, but the diagonal is inert.
        let complete = HardwareMask::from_edges(
            n,
            (0..n as u32).flat_map(|i| (i + 1..n as u32).map(move |j| (i, j))),
            "complete".into(),
        )
        .unwrap();
        let cfg = quick_cfg(9);
        let restricted = restricted_sa_solve(&model, &complete, &cfg).unwrap();
        let full = sa_solve(&crate::topology::apply_mask(&b, &complete).unwrap(), &bias, &cfg).unwrap();
        assert_eq!(restricted, full);

        // Empty mask: only the bias term remains, solved sign-exactly.
        let empty = HardwareMask::from_edges(n, std::iter::empty(), "empty".into()).unwrap();
        let s = restricted_sa_solve(&model, &empty, &cfg).unwrap();
        for (i, &si) in s.as_slice().iter().enumerate() {
            let want = if bias[i] > 0.0 { -1 } else { 1 };
            assert_eq!(si, want, "spin {i}");
        }
    }

    #[test]
    fn restricted_sa_respects_mask_size() {
        let model = IsingModel::new(CouplingMatrix::zeros(4), vec![0.0; 4], 0.0).unwrap();
        let mask = chimera_mask(1, 1, 4).unwrap();
        assert!(restricted_sa_solve(&model, &mask, &quick_cfg(0)).is_err());
    }

    #[test]
    fn schedule_shapes_and_validation() {
        let g = Schedule::geometric(0.1, 10.0);
        let betas = g.betas(5);
        assert!((betas[0] - 0.1).abs() < 1e-12);
        assert!((betas[4] - 10.0).abs() < 1e-9);
        assert!(betas.windows(2).all(|w| w[0] < w[1]));
        // Geometric: constant ratio between consecutive betas.
        let r0 = betas[1] / betas[0];
        for w in betas.windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-9);
        }

        let l = Schedule::linear(1.0, 3.0);
        assert_eq!(l.betas(3), vec![1.0, 2.0, 3.0]);
        assert_eq!(l.betas(1), vec![3.0]);

        assert!(Schedule::geometric(2.0, 1.0).validate().is_err());
        assert!(Schedule::geometric(0.0, 1.0).validate().is_err());
        assert!(Schedule::linear(0.0, 1.0).validate().is_ok());

        let bad = SolverConfig { num_reads: 0, ..SolverConfig::default() };
        assert!(bad.validate().is_err());
        let bad = SolverConfig { sweeps: 0, ..SolverConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sampler_trait_objects_agree_on_easy_instance() {
        let b = dense(&[vec![0.0, -1.0], vec![-1.0, 0.0]]);
        let c = [0.5, 0.0];
        let cfg = quick_cfg(4);
        let samplers: [&dyn Sampler; 2] = [&SaSampler, &BruteForceSampler];
        for sampler in samplers {
            let s = sampler.solve(&b, &c, &cfg).unwrap();
            // Unique optimum (−1,−1): aligned by the coupling, pushed down by
            // the bias.
            assert_eq!(s.as_slice(), &[-1, -1]);
        }
    }
}
