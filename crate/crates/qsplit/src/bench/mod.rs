//! Benchmark harness: run any method on any instance set with per-call
//! traces, then aggregate ratio curves, rank tables, and ablation counts.

pub mod analysis;
pub mod io;
pub mod runner;

use std::path::PathBuf;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::instances::{parse_maxcut_edgelist, reg_instance};
use crate::ising::{maxcut_to_ising, IsingModel, WeightedGraph};
use crate::splitting::LambdaMode;
use crate::subsolver::{Schedule, ScheduleKind, SolverConfig};

pub use analysis::{
    ablation_counts, curves, curves_to_csv, rank, AblationCounts, CurveRow, InstanceFilter,
    RankRow, RankTable,
};
pub use io::{read_trace_csv, rows_from_trace, write_trace_csv, BenchRow};
pub use runner::{cli_run, CellSummary, RunReport, RunSpec};

/// A benchmark method with its parameters baked in. Labels are stable and
/// parseable, so traces identify their method unambiguously.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Splitting { lambda_mode: LambdaMode },
    Lnls { m: usize },
    KOpt { k: usize },
    SaFull,
    SaRestricted,
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Splitting { lambda_mode } => match lambda_mode {
                LambdaMode::CandidateScan => "splitting".into(),
                other => format!("splitting-{other}"),
            },
            Method::Lnls { m } => format!("lnls-m{m}"),
            Method::KOpt { k } => format!("kopt-{k}"),
            Method::SaFull => "sa-full".into(),
            Method::SaRestricted => "sa-restricted".into(),
        }
    }

    /// Parses a fully qualified label as written to traces.
    pub fn from_label(label: &str) -> Result<Method> {
        match label {
            "splitting" => {
                return Ok(Method::Splitting { lambda_mode: LambdaMode::CandidateScan })
            }
            "sa-full" => return Ok(Method::SaFull),
            "sa-restricted" => return Ok(Method::SaRestricted),
            _ => {}
        }
        if let Some(mode) = label.strip_prefix("splitting-") {
            return Ok(Method::Splitting { lambda_mode: mode.parse()? });
        }
        if let Some(m) = label.strip_prefix("lnls-m") {
            let m: usize = m
                .parse()
                .map_err(|_| Error::invalid(format!("bad neighborhood size in {label:?}")))?;
            return Ok(Method::Lnls { m });
        }
        if let Some(k) = label.strip_prefix("kopt-") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::invalid(format!("bad flip bound in {label:?}")))?;
            return Ok(Method::KOpt { k });
        }
        Err(Error::invalid(format!("unknown method {label:?}")))
    }
}

/// Where an instance comes from. Names double as reference-table keys.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Reg { n: usize },
    MaxCutFile(PathBuf),
    ModelJsonFile(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub name: String,
    pub source: InstanceSource,
}

impl InstanceSpec {
    /// `reg:N` selects the closed-form family; `*.json` loads a serialized
    /// model; anything else is read as a Max-Cut edge list. File-backed
    /// instances are named by file stem.
    pub fn parse(arg: &str) -> Result<InstanceSpec> {
        if let Some(n) = arg.strip_prefix("reg:") {
            let n: usize = n
                .parse()
                .map_err(|_| Error::invalid(format!("bad instance size in {arg:?}")))?;
            return Ok(InstanceSpec {
                name: format!("reg:{n}"),
                source: InstanceSource::Reg { n },
            });
        }
        let path = PathBuf::from(arg);
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::invalid(format!("bad instance path {arg:?}")))?
            .to_string();
        let source = if path.extension().is_some_and(|e| e == "json") {
            InstanceSource::ModelJsonFile(path)
        } else {
            InstanceSource::MaxCutFile(path)
        };
        Ok(InstanceSpec { name, source })
    }

    pub fn load(&self) -> Result<IsingModel> {
        match &self.source {
            InstanceSource::Reg { n } => Ok(reg_instance(*n)?.into_model()),
            InstanceSource::MaxCutFile(path) => {
                let text = std::fs::read_to_string(path)?;
                let graph = parse_maxcut_edgelist(&text)?;
                maxcut_bench_model(&graph)
            }
            InstanceSource::ModelJsonFile(path) => {
                let text = std::fs::read_to_string(path)?;
                IsingModel::from_json(&text)
            }
        }
    }
}

/// Ising model whose energy is exactly the negated cut value, so all
/// benchmark methods minimize and the best-known cut serves directly as a
/// ratio reference.
pub fn maxcut_bench_model(graph: &WeightedGraph) -> Result<IsingModel> {
    let base = maxcut_to_ising(graph);
    let offset = (base.offset() - graph.total_weight()) / 2.0;
    IsingModel::new(base.a().scaled(0.5), vec![0.0; graph.n()], offset)
}

/// Config values resolved from the built-in defaults plus an optional
/// override file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Defaults {
    pub run: RunDefaults,
    pub solver: SolverDefaults,
    pub lnls: LnlsDefaults,
    pub kopt: KoptDefaults,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RunDefaults {
    pub maxiter: usize,
    pub maxsubiter: usize,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SolverDefaults {
    pub num_reads: usize,
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub schedule: ScheduleKind,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LnlsDefaults {
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct KoptDefaults {
    pub k: usize,
}

impl Defaults {
    pub fn builtin() -> Defaults {
        toml::from_str(include_str!("defaults.toml")).expect("bundled defaults parse")
    }

    /// Builtin defaults with any subset of keys overridden by a TOML
    /// fragment of the same shape.
    pub fn with_overrides(overrides: &str) -> Result<Defaults> {
        let mut base: toml::Value =
            toml::from_str(include_str!("defaults.toml")).expect("bundled defaults parse");
        let over: toml::Value = toml::from_str(overrides)
            .map_err(|e| Error::Config(format!("bad config file: {e}")))?;
        merge_toml(&mut base, over);
        base.try_into()
            .map_err(|e| Error::Config(format!("bad config value: {e}")))
    }

    pub fn solver_config(&self, seed: u64) -> SolverConfig {
        let schedule = Schedule {
            beta_start: self.solver.beta_start,
            beta_end: self.solver.beta_end,
            kind: self.solver.schedule,
        };
        SolverConfig {
            num_reads: self.solver.num_reads,
            sweeps: self.solver.sweeps,
            beta_schedule: schedule,
            seed,
        }
    }
}

fn merge_toml(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge_toml(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
