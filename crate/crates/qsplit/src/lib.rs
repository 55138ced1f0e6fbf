//! Ising optimization by operator splitting on sparse hardware graphs.
//!
//! The central routine factors a dense coupling matrix into a part that fits
//! a fixed hardware topology and a linearized remainder, then alternates
//! hardware-sized subproblem solves with a damped outer update. Around it:
//! model types and conversions ([`ising`]), hardware graph generators
//! ([`topology`]), subproblem samplers ([`subsolver`]), local-search
//! baselines ([`baselines`]), benchmark instance families ([`instances`]),
//! and a benchmarking harness with trace analysis ([`bench`]).
//!
//! The `examples/` directory walks through each capability; the `qsplit`
//! binary exposes the benchmark harness from the command line.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod instances;
pub mod ising;
pub mod rng;
pub mod splitting;
pub mod subsolver;
pub mod topology;

pub use baselines::{k_opt, lnls_run, lnls_subproblem, LnlsConfig, LnlsSubproblem};
pub use bench::{
    ablation_counts, cli_run, curves, rank, BenchRow, CellSummary, Defaults, InstanceFilter,
    InstanceSpec, Method, RunReport, RunSpec,
};
pub use error::{Error, Result};
pub use ising::{CouplingMatrix, IsingModel, QuboModel, SpinVector, WeightedGraph};
pub use splitting::{
    IterationState, LambdaMode, SplitConfig, SplitPair, Trace, TraceRow,
};
pub use subsolver::{BruteForceSampler, Sampler, SaSampler, Schedule, SolverConfig};
pub use topology::{HardwareMask, Permutation, TopologyFamily};
