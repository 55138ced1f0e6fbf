//! Trace aggregation: approximation-ratio curves over solver calls, final
//! ranking tables, and the damping-ablation comparison counts.

use std::collections::BTreeMap;

use crate::bench::io::BenchRow;
use crate::error::{Error, Result};
use crate::instances::{approximation_ratio, reg_ground_state, BestKnownTable, RatioKind};

/// Mean approximation ratio across instances after a given number of solver
/// calls (call 0 is the initial state).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub method: String,
    pub iteration: usize,
    pub mean_ratio: f64,
    pub n_instances: usize,
}

/// Instance subset filter. `">150"` keeps Reg instances with size strictly
/// greater than the bound; anything without a parseable Reg size is dropped
/// when a filter is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceFilter {
    reg_size_greater_than: u32,
}

impl std::str::FromStr for InstanceFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .strip_prefix('>')
            .ok_or_else(|| Error::invalid(format!("bad filter {s:?} (expected \">N\")")))?;
        let bound: u32 = rest
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad filter bound {rest:?}")))?;
        Ok(InstanceFilter { reg_size_greater_than: bound })
    }
}

impl InstanceFilter {
    pub fn matches(&self, instance: &str) -> bool {
        reg_size(instance).is_some_and(|n| n > self.reg_size_greater_than)
    }
}

fn reg_size(instance: &str) -> Option<u32> {
    instance.strip_prefix("reg:")?.parse().ok()
}

/// Reg instances measure achieved/ground energy; everything else is read as
/// a negated-cut objective against a best-known positive value.
pub fn ratio_kind(instance: &str) -> RatioKind {
    if reg_size(instance).is_some() {
        RatioKind::IsingGround
    } else {
        RatioKind::CutBest
    }
}

/// Reference value per instance: the best-known table wins, Reg instances
/// fall back to the closed-form ground-state oracle. Returns the resolved
/// references and the instances excluded for lack of one.
pub fn resolve_references(
    instances: &[String],
    table: &BestKnownTable,
) -> (BTreeMap<String, f64>, Vec<String>) {
    let mut refs = BTreeMap::new();
    let mut excluded = Vec::new();
    for name in instances {
        if refs.contains_key(name) {
            continue;
        }
        let reference = table.ratio_reference(name).or_else(|| {
            let n = reg_size(name)?;
            let (_, e) = reg_ground_state(n as usize).ok()?;
            (e != 0.0).then_some(e)
        });
        match reference {
            Some(r) => {
                refs.insert(name.clone(), r);
            }
            None => excluded.push(name.clone()),
        }
    }
    (refs, excluded)
}

/// Best-energy sequence of every (instance, seed) group, keyed by method,
/// in row order. The sequence index is the solver-call count.
type Groups = BTreeMap<String, BTreeMap<(String, u64), Vec<f64>>>;

fn group_best_sequences(rows: &[BenchRow]) -> Groups {
    let mut groups: Groups = BTreeMap::new();
    for row in rows {
        groups
            .entry(row.method.clone())
            .or_default()
            .entry((row.instance.clone(), row.seed))
            .or_default()
            .push(row.best_energy);
    }
    groups
}

/// Per-method, per-solver-call mean approximation ratio across all
/// (instance, seed) groups. Groups that ran fewer calls carry their final
/// best value forward, so every method's curve extends to its longest run.
pub fn curves(
    rows: &[BenchRow],
    table: &BestKnownTable,
    filter: Option<InstanceFilter>,
) -> Result<(Vec<CurveRow>, Vec<String>)> {
    let kept: Vec<&BenchRow> = rows
        .iter()
        .filter(|r| filter.is_none_or(|f| f.matches(&r.instance)))
        .collect();
    let instances: Vec<String> = kept.iter().map(|r| r.instance.clone()).collect();
    let (refs, excluded) = resolve_references(&instances, table);

    let owned: Vec<BenchRow> = kept.into_iter().cloned().collect();
    let groups = group_best_sequences(&owned);
    let mut out = Vec::new();
    for (method, by_group) in &groups {
        let usable: Vec<(&(String, u64), &Vec<f64>)> = by_group
            .iter()
            .filter(|((inst, _), _)| refs.contains_key(inst))
            .collect();
        if usable.is_empty() {
            continue;
        }
        let n_instances = {
            let mut names: Vec<&str> = usable.iter().map(|((i, _), _)| i.as_str()).collect();
            names.sort_unstable();
            names.dedup();
            names.len()
        };
        let horizon = usable.iter().map(|(_, seq)| seq.len()).max().unwrap_or(0);
        for t in 0..horizon {
            let mut sum = 0.0;
            for ((inst, _), seq) in &usable {
                let best = seq[t.min(seq.len() - 1)];
                sum += approximation_ratio(best, refs[inst.as_str()], ratio_kind(inst))?;
            }
            out.push(CurveRow {
                method: method.clone(),
                iteration: t,
                mean_ratio: sum / usable.len() as f64,
                n_instances,
            });
        }
    }
    Ok((out, excluded))
}

pub fn curves_to_csv(rows: &[CurveRow]) -> String {
    let mut s = String::from("method,iteration,mean_ratio,n_instances\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.method, r.iteration, r.mean_ratio, r.n_instances
        ));
    }
    s
}

/// Final approximation ratios per instance and method, best across seeds,
/// ordered by the splitting method's ratio (best first; input order on ties
/// and when no splitting column exists).
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub methods: Vec<String>,
    pub rows: Vec<RankRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub instance: String,
    /// Parallel to `RankTable::methods`; `None` when the method did not run
    /// on this instance.
    pub ratios: Vec<Option<f64>>,
}

impl RankTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("instance");
        for m in &self.methods {
            s.push(',');
            s.push_str(m);
        }
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.instance);
            for ratio in &row.ratios {
                s.push(',');
                if let Some(v) = ratio {
                    s.push_str(&v.to_string());
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Final best energy per (instance, method), minimized across seeds.
fn final_energies(rows: &[BenchRow]) -> BTreeMap<(String, String), f64> {
    let mut finals: BTreeMap<(String, String), BTreeMap<u64, f64>> = BTreeMap::new();
    for row in rows {
        // best_energy is non-increasing within a group, so the last row
        // holds the group's final value; later rows simply overwrite.
        finals
            .entry((row.instance.clone(), row.method.clone()))
            .or_default()
            .insert(row.seed, row.best_energy);
    }
    finals
        .into_iter()
        .map(|(key, by_seed)| {
            let best = by_seed.values().copied().fold(f64::INFINITY, f64::min);
            (key, best)
        })
        .collect()
}

pub fn rank(rows: &[BenchRow], table: &BestKnownTable) -> Result<(RankTable, Vec<String>)> {
    let mut methods: Vec<String> = Vec::new();
    let mut instances: Vec<String> = Vec::new();
    for row in rows {
        if !methods.contains(&row.method) {
            methods.push(row.method.clone());
        }
        if !instances.contains(&row.instance) {
            instances.push(row.instance.clone());
        }
    }
    let (refs, excluded) = resolve_references(&instances, table);
    let finals = final_energies(rows);

    let mut table_rows = Vec::new();
    for inst in &instances {
        let Some(&reference) = refs.get(inst) else { continue };
        let ratios: Vec<Option<f64>> = methods
            .iter()
            .map(|m| {
                finals
                    .get(&(inst.clone(), m.clone()))
                    .map(|&e| approximation_ratio(e, reference, ratio_kind(inst)))
                    .transpose()
            })
            .collect::<Result<_>>()?;
        table_rows.push(RankRow { instance: inst.clone(), ratios });
    }

    let split_col = methods
        .iter()
        .position(|m| m == "splitting")
        .or_else(|| methods.iter().position(|m| m.starts_with("splitting")));
    if let Some(col) = split_col {
        table_rows.sort_by(|a, b| match (a.ratios[col], b.ratios[col]) {
            (Some(x), Some(y)) => y.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Equal),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
    }
    Ok((RankTable { methods, rows: table_rows }, excluded))
}

/// Head-to-head final-energy comparison of two methods over the instances
/// both ran on. `equal` uses a 1e-12 relative tolerance. The scaled counts
/// ask whether a method still wins after the opponent's energy is improved
/// by 0.1% of its magnitude (×1.001 for the negative energies of negated
/// objectives), so the scaled pair can never both hold and all counts sum
/// to the total.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AblationCounts {
    pub method_a: String,
    pub method_b: String,
    pub total: usize,
    pub better: usize,
    pub equal: usize,
    pub worse: usize,
    pub scaled_better: usize,
    pub scaled_equal: usize,
    pub scaled_worse: usize,
}

pub fn ablation_counts(rows: &[BenchRow], method_a: &str, method_b: &str) -> AblationCounts {
    let finals = final_energies(rows);
    let mut instances: Vec<String> = Vec::new();
    for row in rows {
        if !instances.contains(&row.instance) {
            instances.push(row.instance.clone());
        }
    }
    let margin = |e: f64| e - 1e-3 * e.abs();
    let mut counts = AblationCounts {
        method_a: method_a.to_string(),
        method_b: method_b.to_string(),
        total: 0,
        better: 0,
        equal: 0,
        worse: 0,
        scaled_better: 0,
        scaled_equal: 0,
        scaled_worse: 0,
    };
    for inst in &instances {
        let (Some(&ea), Some(&eb)) = (
            finals.get(&(inst.clone(), method_a.to_string())),
            finals.get(&(inst.clone(), method_b.to_string())),
        ) else {
            continue;
        };
        counts.total += 1;
        let tol = 1e-12 * ea.abs().max(eb.abs()).max(1.0);
        if (ea - eb).abs() <= tol {
            counts.equal += 1;
        } else if ea < eb {
            counts.better += 1;
        } else {
            counts.worse += 1;
        }
        if ea < margin(eb) {
            counts.scaled_better += 1;
        } else if eb < margin(ea) {
            counts.scaled_worse += 1;
        } else {
            counts.scaled_equal += 1;
        }
    }
    counts
}
