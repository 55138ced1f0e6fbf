//! Benchmark execution. Every (instance, method, seed) cell is independent,
//! with its own seed stream, so cells run in parallel without changing any
//! output: row order, energies, and summaries depend only on the `RunSpec`.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{k_opt, lnls_run, LnlsConfig};
use crate::bench::analysis::{ratio_kind, resolve_references};
use crate::bench::io::{rows_from_trace, write_trace_csv, BenchRow};
use crate::bench::{InstanceSpec, Method};
use crate::error::{Error, Result};
use crate::instances::{approximation_ratio, BestKnownTable};
use crate::ising::{IsingModel, SpinVector};
use crate::rng::{random_spins, stream_rng};
use crate::splitting::{run_splitting, SplitConfig, Trace, TraceRow};
use crate::subsolver::{restricted_sa_solve, sa_solve, SaSampler, SolverConfig};
use crate::topology::{mask_for_problem, TopologyFamily};

/// Everything a benchmark run needs. `solver.seed` is ignored: each cell
/// derives its own call seeds from the cell seed.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub instances: Vec<InstanceSpec>,
    pub methods: Vec<Method>,
    pub topology: TopologyFamily,
    pub maxiter: usize,
    pub maxsubiter: usize,
    pub solver: SolverConfig,
    pub seeds: Vec<u64>,
    pub best_known: BestKnownTable,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Outcome of one cell. Energies are absent when the cell errored; the run
/// itself keeps going either way.
#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub instance: String,
    pub method: String,
    pub seed: u64,
    pub final_energy: Option<f64>,
    pub best_energy: Option<f64>,
    pub ratio: Option<f64>,
    pub wall_ms_total: f64,
    pub error: Option<String>,
}

#[derive(Debug)]
pub struct RunReport {
    /// Trace rows for all cells, concatenated in cell order.
    pub rows: Vec<BenchRow>,
    /// One entry per (instance, method, seed), in spec order.
    pub cells: Vec<CellSummary>,
}

/// Repeated full-problem annealing: one timed solver call per iteration,
/// scored under the true model, best-of across calls. With `mask` set the
/// sampled model drops every coupling the mask cannot carry, which is the
/// hardware-feasible baseline the masked iteration competes against.
fn repeated_sa(
    model: &IsingModel,
    mask: Option<&crate::topology::HardwareMask>,
    maxiter: usize,
    solver: &SolverConfig,
    seed: u64,
) -> Result<Trace> {
    let mut rng = stream_rng(seed, 0);
    let s0 = SpinVector::new(random_spins(model.n(), &mut rng))?;
    let e0 = model.energy(&s0)?;
    let mut trace = Trace::new();
    trace.push(TraceRow {
        iteration: 0,
        subiteration: 0,
        lambda: None,
        energy: e0,
        best_energy: e0,
        wall_ms: 0.0,
    });
    let mut best = e0;
    for iteration in 1..=maxiter {
        let call_seed: u64 = rng.gen();
        let cfg = solver.with_seed(call_seed);
        let started = Instant::now();
        let s = match mask {
            None => sa_solve(model.a(), model.b(), &cfg)?,
            Some(mask) => restricted_sa_solve(model, mask, &cfg)?,
        };
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        let energy = model.energy(&s)?;
        if energy <= best {
            best = energy;
        }
        trace.push(TraceRow {
            iteration,
            subiteration: 0,
            lambda: None,
            energy,
            best_energy: best,
            wall_ms,
        });
    }
    Ok(trace)
}

fn run_cell(
    model: &IsingModel,
    instance: &str,
    method: &Method,
    seed: u64,
    spec: &RunSpec,
) -> Result<Vec<BenchRow>> {
    let trace = match method {
        Method::Splitting { lambda_mode } => {
            let mask = mask_for_problem(model.n(), &spec.topology)?;
            let cfg = SplitConfig {
                maxiter: spec.maxiter,
                maxsubiter: spec.maxsubiter,
                lambda_mode: lambda_mode.clone(),
                seed,
                ..SplitConfig::default()
            };
            run_splitting(model, &mask, &cfg, &SaSampler, &spec.solver)?.1
        }
        Method::Lnls { m } => {
            let cfg = LnlsConfig { m: *m, maxiter: spec.maxiter, seed };
            lnls_run(model, &cfg, &SaSampler, &spec.solver)?.1
        }
        Method::KOpt { k } => {
            let mut rng = stream_rng(seed, 0);
            let s0 = SpinVector::new(random_spins(model.n(), &mut rng))?;
            k_opt(model, &s0, *k)?.1
        }
        Method::SaFull => repeated_sa(model, None, spec.maxiter, &spec.solver, seed)?,
        Method::SaRestricted => {
            let mask = mask_for_problem(model.n(), &spec.topology)?;
            repeated_sa(model, Some(&mask), spec.maxiter, &spec.solver, seed)?
        }
    };
    Ok(rows_from_trace(instance, &method.label(), seed, &trace))
}

/// Runs the full cell grid, writes `trace.csv` and `summary.json` when an
/// output directory is given, and returns everything in memory as well.
pub fn cli_run(spec: &RunSpec) -> Result<RunReport> {
    if spec.instances.is_empty() || spec.methods.is_empty() || spec.seeds.is_empty() {
        return Err(Error::invalid("need at least one instance, method, and seed"));
    }

    // Load each instance once; a failed load becomes an errored cell per
    // (method, seed) instead of aborting the run.
    let loaded: Vec<(String, std::result::Result<Arc<IsingModel>, String>)> = spec
        .instances
        .iter()
        .map(|inst| (inst.name.clone(), inst.load().map(Arc::new).map_err(|e| e.to_string())))
        .collect();

    let names: Vec<String> = loaded.iter().map(|(name, _)| name.clone()).collect();
    let (references, _) = resolve_references(&names, &spec.best_known);

    struct Cell<'a> {
        instance: &'a str,
        model: std::result::Result<&'a Arc<IsingModel>, &'a str>,
        method: &'a Method,
        seed: u64,
    }
    let mut cells = Vec::new();
    for (name, model) in &loaded {
        for method in &spec.methods {
            for &seed in &spec.seeds {
                cells.push(Cell {
                    instance: name,
                    model: model.as_ref().map_err(|e| e.as_str()),
                    method,
                    seed,
                });
            }
        }
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = spec.threads {
        builder = builder.num_threads(threads);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let outcomes: Vec<(Vec<BenchRow>, CellSummary)> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let mut summary = CellSummary {
                    instance: cell.instance.to_string(),
                    method: cell.method.label(),
                    seed: cell.seed,
                    final_energy: None,
                    best_energy: None,
                    ratio: None,
                    wall_ms_total: 0.0,
                    error: None,
                };
                let rows = match cell.model {
                    Err(msg) => {
                        summary.error = Some(msg.to_string());
                        Vec::new()
                    }
                    Ok(model) => {
                        match run_cell(model, cell.instance, cell.method, cell.seed, spec) {
                            Err(e) => {
                                summary.error = Some(e.to_string());
                                Vec::new()
                            }
                            Ok(rows) => rows,
                        }
                    }
                };
                if let Some(last) = rows.last() {
                    summary.final_energy = Some(last.energy);
                    summary.best_energy = Some(last.best_energy);
                    summary.wall_ms_total = rows.iter().map(|r| r.wall_ms).sum();
                    summary.ratio = references.get(cell.instance).and_then(|&reference| {
                        approximation_ratio(last.best_energy, reference, ratio_kind(cell.instance))
                            .ok()
                    });
                }
                (rows, summary)
            })
            .collect()
    });

    let mut rows = Vec::new();
    let mut summaries = Vec::with_capacity(outcomes.len());
    for (cell_rows, summary) in outcomes {
        rows.extend(cell_rows);
        summaries.push(summary);
    }

    if let Some(dir) = &spec.out_dir {
        std::fs::create_dir_all(dir)?;
        write_trace_csv(&dir.join("trace.csv"), &rows)?;
        let json = serde_json::to_string_pretty(&summaries)?;
        std::fs::write(dir.join("summary.json"), json + "\n")?;
    }

    Ok(RunReport { rows, cells: summaries })
}
