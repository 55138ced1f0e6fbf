//! The masked splitting iteration: decompose `A = a_quad + a_lin` so the
//! quadratic part fits a permuted hardware mask, linearize the remainder
//! around the current iterate with a damping term, and solve the resulting
//! masked subproblem with an inner sampler. Includes the λ-candidate scan,
//! the provably monotone λ choice, the λ=0 permutation-refresh ablation, and
//! an experimental annealing-style regularization step.

use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::{CouplingMatrix, IsingModel, SpinVector};
use crate::rng::{random_spins, stream_rng};
use crate::subsolver::{brute_force_solve, Sampler, SolverConfig};
use crate::topology::{permuted_mask, random_permutation, HardwareMask, Permutation};

/// One decomposition `A = a_quad + a_lin`. `a_quad` is supported only on
/// permuted-mask edges; the sum reproduces `A` exactly because every stored
/// entry of `A` is routed to exactly one side.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub a_quad: CouplingMatrix,
    pub a_lin: CouplingMatrix,
}

/// How the damping weight λ is chosen in each outer iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    /// Scan the sign-change candidate set, at most `maxsubiter` values.
    CandidateScan,
    /// One fixed λ per iteration.
    Fixed(f64),
    /// λ = 2·‖a_lin‖₂, making exact inner solves non-increasing in energy.
    Monotone,
    /// λ = 0 with a fresh permutation every subiteration instead of a λ scan.
    Zero,
}

impl std::str::FromStr for LambdaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scan" => Ok(LambdaMode::CandidateScan),
            "monotone" => Ok(LambdaMode::Monotone),
            "zero" => Ok(LambdaMode::Zero),
            _ => {
                if let Some(rest) = s.strip_prefix("fixed:") {
                    let v: f64 = rest
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad fixed lambda: {rest}")))?;
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::invalid("fixed lambda must be finite and >= 0"));
                    }
                    return Ok(LambdaMode::Fixed(v));
                }
                Err(Error::invalid(format!(
                    "unknown lambda mode {s:?} (expected scan|fixed:<v>|monotone|zero)"
                )))
            }
        }
    }
}

impl std::fmt::Display for LambdaMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LambdaMode::CandidateScan => write!(f, "scan"),
            LambdaMode::Fixed(v) => write!(f, "fixed:{v}"),
            LambdaMode::Monotone => write!(f, "monotone"),
            LambdaMode::Zero => write!(f, "zero"),
        }
    }
}

/// Outer-iteration configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    pub maxiter: usize,
    /// λ candidates (or fresh permutations in zero mode) per iteration.
    pub maxsubiter: usize,
    pub lambda_mode: LambdaMode,
    /// Eq.-faithful gradient uses 2·a_lin·s_prev; disabling drops the 2.
    pub include_gradient_factor_two: bool,
    /// Constant added to the diagonal of A before splitting. Leaves all
    /// energies unchanged but shifts the linearized gradient.
    pub diagonal_shift: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            maxiter: 50,
            maxsubiter: 15,
            lambda_mode: LambdaMode::CandidateScan,
            include_gradient_factor_two: true,
            diagonal_shift: 0.0,
            seed: 0,
        }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.maxsubiter < 1 {
            return Err(Error::invalid("maxsubiter must be at least 1"));
        }
        if let LambdaMode::Fixed(v) = self.lambda_mode {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid("fixed lambda must be finite and >= 0"));
            }
        }
        if !self.diagonal_shift.is_finite() {
            return Err(Error::invalid("diagonal shift must be finite"));
        }
        Ok(())
    }
}

/// Current iterate plus the best state seen so far. `best_energy` always
/// equals the model energy of `best_s` and never increases; `s_current` may
/// move uphill in non-monotone modes.
#[derive(Debug, Clone)]
pub struct IterationState {
    pub s_current: SpinVector,
    pub best_s: SpinVector,
    pub best_energy: f64,
    pub k: usize,
}

impl IterationState {
    pub fn initial(model: &IsingModel, s0: SpinVector) -> Result<Self> {
        let e = model.energy(&s0)?;
        Ok(IterationState {
            best_s: s0.clone(),
            s_current: s0,
            best_energy: e,
            k: 0,
        })
    }
}

/// One sampler call: which iteration/subiteration it belonged to, the λ in
/// effect (none for the initial-state row), the candidate's true model
/// energy, the best energy after the call, and the call's wall time.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub subiteration: usize,
    pub lambda: Option<f64>,
    pub energy: f64,
    pub best_energy: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Trace {
    rows: Vec<TraceRow>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// `a_quad = permuted_mask(M, p) ⊙ A`, `a_lin = A − a_quad`. The problem
/// stays fixed and the mask is permuted; entries are routed, not recomputed,
/// so the decomposition is exact. The diagonal of `A` always lands in
/// `a_lin` (masks carry no self-loops).
pub fn split(model: &IsingModel, mask: &HardwareMask, p: &Permutation) -> Result<SplitPair> {
    let n = model.n();
    if mask.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mask.n() });
    }
    if p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    let pm = permuted_mask(mask, p)?;
    let mut quad = Vec::new();
    let mut lin = Vec::new();
    for (i, j, v) in model.a().iter_upper() {
        if pm.has_edge(i, j) {
            quad.push((i, j, v));
        } else {
            lin.push((i, j, v));
        }
    }
    Ok(SplitPair {
        a_quad: CouplingMatrix::from_symmetric_entries(n, quad)?,
        a_lin: CouplingMatrix::from_symmetric_entries(n, lin)?,
    })
}

/// Subproblem of one subiteration: `B = a_quad`,
/// `c = f·a_lin·s_prev − λ·s_prev` with `f = 2` when the gradient factor is
/// included (the derivation's form) and `f = 1` otherwise. Model bias is not
/// part of the pair; callers add it before sampling.
pub fn linearized_subproblem(
    pair: &SplitPair,
    s_prev: &SpinVector,
    lambda: f64,
    include_gradient_factor_two: bool,
) -> Result<(CouplingMatrix, Vec<f64>)> {
    let n = pair.a_quad.n();
    if s_prev.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s_prev.len() });
    }
    if !(lambda >= 0.0) {
        return Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    let factor = if include_gradient_factor_two { 2.0 } else { 1.0 };
    let grad = pair.a_lin.matvec_spins(s_prev.as_slice());
    let c: Vec<f64> = grad
        .iter()
        .zip(s_prev.as_slice())
        .map(|(&g, &si)| factor * g - lambda * f64::from(si))
        .collect();
    Ok((pair.a_quad.clone(), c))
}

/// λ candidates from the sign-change set of `L = 2·a_lin·s_prev`: sort |L|
/// ascending, pad with 0 below and twice the maximum above, take the
/// midpoints of consecutive values, then keep every ⌈(n+1)/maxsubiter⌉-th
/// midpoint starting from the smallest. Consecutive duplicates collapse;
/// an all-zero L yields {0}.
pub fn lambda_candidates(
    pair: &SplitPair,
    s_prev: &SpinVector,
    maxsubiter: usize,
) -> Result<Vec<f64>> {
    let n = pair.a_lin.n();
    if s_prev.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s_prev.len() });
    }
    if maxsubiter < 1 {
        return Err(Error::invalid("maxsubiter must be at least 1"));
    }
    let mut mags: Vec<f64> = pair
        .a_lin
        .matvec_spins(s_prev.as_slice())
        .iter()
        .map(|v| (2.0 * v).abs())
        .collect();
    if mags.iter().all(|&v| v == 0.0) {
        return Ok(vec![0.0]);
    }
    mags.sort_by(f64::total_cmp);
    let mut padded = Vec::with_capacity(n + 2);
    padded.push(0.0);
    padded.append(&mut mags);
    padded.push(2.0 * padded[n]);
    let mids: Vec<f64> = padded.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    let stride = mids.len().div_ceil(maxsubiter);
    let mut out: Vec<f64> = mids.into_iter().step_by(stride).collect();
    out.dedup();
    Ok(out)
}

/// λ large enough for guaranteed descent with an exact inner solver:
/// 2·‖a_lin‖₂, computed by power iteration on a_lin² (50 iterations or 1e-6
/// relative change). Deterministic: the start vector comes from a fixed
/// internal stream.
pub fn monotone_lambda(pair: &SplitPair) -> f64 {
    let n = pair.a_lin.n();
    if n == 0 {
        return 0.0;
    }
    let mut rng = stream_rng(0x6d6f_6e6f, 0);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = norm(&v);
    if nv == 0.0 {
        return 0.0;
    }
    v.iter_mut().for_each(|x| *x /= nv);

    let mut est = 0.0f64;
    for _ in 0..50 {
        let w = pair.a_lin.matvec(&pair.a_lin.matvec(&v));
        // Rayleigh quotient of a_lin² at unit v equals ‖a_lin·v‖².
        let new_est: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let nw = norm(&w);
        if nw == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|x| x / nw).collect();
        let done = (new_est - est).abs() <= 1e-6 * new_est.abs();
        est = new_est;
        if done {
            break;
        }
    }
    2.0 * est.max(0.0).sqrt()
}

/// Error of the first-order expansion of the `a_lin` energy:
/// `sᵀa_lin s − s_prevᵀa_lin s_prev − 2·s_prevᵀa_lin(s − s_prev)`. Equals
/// `(s−s_prev)ᵀ a_lin (s−s_prev)`, and vanishes for single-flip moves when
/// `a_lin` has zero diagonal.
pub fn linearization_gap(pair: &SplitPair, s: &SpinVector, s_prev: &SpinVector) -> f64 {
    let a = &pair.a_lin;
    let quad_s = a.quad_form_spins(s.as_slice());
    let quad_prev = a.quad_form_spins(s_prev.as_slice());
    let grad = a.matvec_spins(s_prev.as_slice());
    let cross: f64 = grad
        .iter()
        .zip(s.as_slice().iter().zip(s_prev.as_slice()))
        .map(|(&g, (&si, &pi))| g * f64::from(si - pi))
        .sum();
    quad_s - quad_prev - 2.0 * cross
}

struct StepScratch<'a> {
    model: &'a IsingModel,
    sampler: &'a dyn Sampler,
    solver_cfg: &'a SolverConfig,
    best_s: SpinVector,
    best_energy: f64,
    champion: Option<(SpinVector, f64)>,
}

impl StepScratch<'_> {
    /// Solves one subproblem, evaluates it on the true model, and updates
    /// the global best and the iteration champion (ties replace, matching
    /// the ≥ acceptance of the reference procedure).
    fn try_candidate(
        &mut self,
        pair: &SplitPair,
        s_prev: &SpinVector,
        lambda: f64,
        factor_two: bool,
        iteration: usize,
        subiteration: usize,
        call_seed: u64,
        trace: &mut Trace,
    ) -> Result<()> {
        let (b_sub, mut c) = linearized_subproblem(pair, s_prev, lambda, factor_two)?;
        for (ci, bi) in c.iter_mut().zip(self.model.b()) {
            *ci += bi;
        }
        let start = Instant::now();
        let cand = if b_sub.offdiag_edge_count() == 0 {
            // Purely linear subproblem: exact sign solve, +1 on zero bias.
            // Keeps the projected-gradient reduction sampler-independent.
            SpinVector::new(c.iter().map(|&ci| if ci > 0.0 { -1 } else { 1 }).collect())?
        } else {
            self.sampler
                .solve(&b_sub, &c, &self.solver_cfg.with_seed(call_seed))?
        };
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let energy = self.model.energy(&cand)?;
        if energy <= self.best_energy {
            self.best_energy = energy;
            self.best_s = cand.clone();
        }
        match &self.champion {
            Some((_, ce)) if *ce < energy => {}
            _ => self.champion = Some((cand, energy)),
        }
        trace.push(TraceRow {
            iteration,
            subiteration,
            lambda: Some(lambda),
            energy,
            best_energy: self.best_energy,
            wall_ms,
        });
        Ok(())
    }
}

/// One outer iteration. Draws a permutation (or one per subiteration in zero
/// mode), runs the configured λ candidates through the sampler, updates the
/// best state on `energy ≤ best_energy`, and sets `s_current` to the
/// iteration champion. In the subiteration batch modes (candidate scan and
/// the zero ablation) the champion starts at `s_prev` with its energy and a
/// candidate must tie or beat it to replace it; in the single-candidate
/// modes (fixed, monotone) the iterate moves to the sampler output
/// unconditionally. Every sampler call appends one trace row; candidate
/// solver seeds are drawn from `rng` before dispatch, so execution order
/// cannot change results.
pub fn split_step(
    model: &IsingModel,
    mask: &HardwareMask,
    state: &IterationState,
    cfg: &SplitConfig,
    sampler: &dyn Sampler,
    solver_cfg: &SolverConfig,
    rng: &mut impl Rng,
    trace: &mut Trace,
) -> Result<IterationState> {
    cfg.validate()?;
    let n = model.n();
    let iteration = state.k + 1;
    let s_prev = &state.s_current;
    let seeded_champion = matches!(
        cfg.lambda_mode,
        LambdaMode::CandidateScan | LambdaMode::Zero
    );
    let champion = if seeded_champion {
        Some((s_prev.clone(), model.energy(s_prev)?))
    } else {
        None
    };
    let mut scratch = StepScratch {
        model,
        sampler,
        solver_cfg,
        best_s: state.best_s.clone(),
        best_energy: state.best_energy,
        champion,
    };

    match cfg.lambda_mode {
        LambdaMode::Zero => {
            for sub in 0..cfg.maxsubiter {
                let p = random_permutation(n, rng);
                let pair = split(model, mask, &p)?;
                let call_seed = rng.gen();
                scratch.try_candidate(
                    &pair,
                    s_prev,
                    0.0,
                    cfg.include_gradient_factor_two,
                    iteration,
                    sub,
                    call_seed,
                    trace,
                )?;
            }
        }
        _ => {
            let p = random_permutation(n, rng);
            let pair = split(model, mask, &p)?;
            let lambdas = match cfg.lambda_mode {
                LambdaMode::CandidateScan => lambda_candidates(&pair, s_prev, cfg.maxsubiter)?,
                LambdaMode::Fixed(v) => vec![v],
                LambdaMode::Monotone => vec![monotone_lambda(&pair)],
                LambdaMode::Zero => unreachable!(),
            };
            for (sub, &lambda) in lambdas.iter().enumerate() {
                let call_seed = rng.gen();
                scratch.try_candidate(
                    &pair,
                    s_prev,
                    lambda,
                    cfg.include_gradient_factor_two,
                    iteration,
                    sub,
                    call_seed,
                    trace,
                )?;
            }
        }
    }

    let (champ_s, _) = scratch.champion.expect("maxsubiter >= 1 candidates");
    Ok(IterationState {
        s_current: champ_s,
        best_s: scratch.best_s,
        best_energy: scratch.best_energy,
        k: iteration,
    })
}

/// Full run: seeded random initial state, `maxiter` outer iterations, full
/// trace. The trace always begins with one row for the initial state
/// (iteration 0, no λ); `maxiter = 0` returns just that.
pub fn run_splitting(
    model: &IsingModel,
    mask: &HardwareMask,
    cfg: &SplitConfig,
    sampler: &dyn Sampler,
    solver_cfg: &SolverConfig,
) -> Result<(IterationState, Trace)> {
    if mask.n() != model.n() {
        return Err(Error::DimensionMismatch { expected: model.n(), found: mask.n() });
    }
    cfg.validate()?;
    let shifted;
    let model = if cfg.diagonal_shift != 0.0 {
        shifted = model.apply_diagonal_shift(cfg.diagonal_shift);
        &shifted
    } else {
        model
    };
    let mut rng = stream_rng(cfg.seed, 0);
    let s0 = SpinVector::new(random_spins(model.n(), &mut rng))?;
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
    for _ in 0..cfg.maxiter {
        state = split_step(model, mask, &state, cfg, sampler, solver_cfg, &mut rng, &mut trace)?;
    }
    Ok((state, trace))
}

/// Annealing-style acceptance weight `exp(−ΔE/T) − R`: positive when the
/// Metropolis rule would accept the flipped neighbor, negative otherwise.
pub fn sa_reg_coefficient(delta_e: f64, temperature: f64, r_k: f64) -> f64 {
    (-delta_e / temperature).exp() - r_k
}

/// Solves the subproblem over `j_set` with every other spin frozen at
/// `s_prev`, with the regularization `coefficient·Σ_{i∈J} s_i·s_prev_i`
/// added to the objective, and writes the result back. Positive coefficients
/// reward flipping the `j_set` spins away from `s_prev`. Exact inner solve;
/// `j_set` must fit the brute-force limit.
pub fn sa_reg_apply(
    model: &IsingModel,
    s_prev: &SpinVector,
    j_set: &[usize],
    coefficient: f64,
) -> Result<SpinVector> {
    let n = model.n();
    if s_prev.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s_prev.len() });
    }
    if j_set.is_empty() {
        return Ok(s_prev.clone());
    }
    for &j in j_set {
        if j >= n {
            return Err(Error::IndexOutOfBounds { index: j, len: n });
        }
    }
    let m = j_set.len();
    let a = model.a();
    let b_sub = CouplingMatrix::from_symmetric_entries(
        m,
        (0..m).flat_map(|x| {
            (x + 1..m).map(move |y| (x, y, a.get(j_set[x], j_set[y])))
        }),
    )?;
    let in_set: std::collections::HashSet<usize> = j_set.iter().copied().collect();
    let c: Vec<f64> = j_set
        .iter()
        .map(|&j| {
            let frozen: f64 = a
                .row_iter(j)
                .filter(|&(q, _)| q != j && !in_set.contains(&q))
                .map(|(q, v)| v * f64::from(s_prev[q]))
                .sum();
            model.b()[j] + 2.0 * frozen + coefficient * f64::from(s_prev[j])
        })
        .collect();
    let (s_sub, _) = brute_force_solve(&b_sub, &c)?;
    let mut out = s_prev.clone();
    for (x, &j) in j_set.iter().enumerate() {
        out.set(j, s_sub[x]);
    }
    Ok(out)
}

/// Experimental non-monotone step with a logarithmic temperature schedule
/// `T(k) = c/ln(1+k)`: draws a random index set and its flipped neighbor,
/// weighs the neighbor by the Metropolis coefficient against a uniform
/// threshold, and re-solves the subproblem with that term attached.
pub fn sa_reg_step(
    model: &IsingModel,
    state: &IterationState,
    temperature_c: f64,
    k: usize,
    rng: &mut impl Rng,
) -> Result<IterationState> {
    if k < 1 {
        return Err(Error::invalid("sa_reg_step needs k >= 1"));
    }
    if !(temperature_c > 0.0) {
        return Err(Error::invalid("temperature scale must be positive"));
    }
    let n = model.n();
    let max_size = n.min(12);
    let size = rng.gen_range(0..=max_size);
    let mut j_set = rand::seq::index::sample(rng, n, size).into_vec();
    j_set.sort_unstable();

    let mut neighbor = state.s_current.clone();
    for &j in &j_set {
        neighbor.flip(j);
    }
    let delta_e = model.energy(&neighbor)? - model.energy(&state.s_current)?;
    let r_k: f64 = rng.gen();
    let temperature = temperature_c / (1.0 + k as f64).ln();
    let coefficient = sa_reg_coefficient(delta_e, temperature, r_k);

    let s_new = sa_reg_apply(model, &state.s_current, &j_set, coefficient)?;
    let e_new = model.energy(&s_new)?;
    let (best_s, best_energy) = if e_new <= state.best_energy {
        (s_new.clone(), e_new)
    } else {
        (state.best_s.clone(), state.best_energy)
    };
    Ok(IterationState {
        s_current: s_new,
        best_s,
        best_energy,
        k: state.k + 1,
    })
}
