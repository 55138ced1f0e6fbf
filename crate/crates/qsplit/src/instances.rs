//! Benchmark instances: the fully connected regular spin-glass family with
//! its closed-form ground-state oracle, Max-Cut edge-list ingestion in the
//! MQLib convention, best-known reference tables, and random generators for
//! tests and synthetic campaigns.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::{CouplingMatrix, IsingModel, SpinVector, WeightedGraph};

/// Fully connected regular spin-glass instance. In 1-indexed form the
/// coefficients are `A[i][j] = 1 − (i+j−2)/(N−1)` for `i ≠ j` and
/// `b[i] = 1 − 2(i−1)/(N−1)`, symmetric convention, zero diagonal. Indexing
/// is shifted to 0-based at this boundary only.
#[derive(Debug, Clone)]
pub struct RegInstance {
    n: usize,
    model: IsingModel,
}

impl RegInstance {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> &IsingModel {
        &self.model
    }

    pub fn into_model(self) -> IsingModel {
        self.model
    }

    /// Canonical instance name, `reg:N`.
    pub fn name(&self) -> String {
        format!("reg:{}", self.n)
    }
}

pub fn reg_instance(n: usize) -> Result<RegInstance> {
    if n < 2 {
        return Err(Error::invalid(format!("reg instance needs N >= 2, got {n}")));
    }
    let denom = (n - 1) as f64;
    let a = CouplingMatrix::from_symmetric_entries(
        n,
        (0..n).flat_map(|i| {
            (i + 1..n).map(move |j| (i, j, 1.0 - (i + j) as f64 / denom))
        }),
    )?;
    let b: Vec<f64> = (0..n).map(|i| 1.0 - 2.0 * i as f64 / denom).collect();
    let model = IsingModel::new(a, b, 0.0)?;
    Ok(RegInstance { n, model })
}

/// The candidate vector with k leading −1 entries and N−k trailing +1
/// entries.
pub fn minus_plus_vector(n: usize, k: usize) -> SpinVector {
    SpinVector::new(
        (0..n).map(|i| if i < k { -1 } else { 1 }).collect(),
    )
    .expect("entries are ±1")
}

/// The mirrored candidate: k leading +1 entries, N−k trailing −1.
pub fn plus_minus_vector(n: usize, k: usize) -> SpinVector {
    SpinVector::new(
        (0..n).map(|i| if i < k { 1 } else { -1 }).collect(),
    )
    .expect("entries are ±1")
}

/// Exact ground state of the regular spin-glass instance. The minimum is
/// provably attained on one of the N+1 candidates with all −1 entries first,
/// so an O(N) scan suffices; ties resolve to the smallest leading-−1 count.
pub fn reg_ground_state(n: usize) -> Result<(SpinVector, f64)> {
    let inst = reg_instance(n)?;
    let mut best: Option<(SpinVector, f64)> = None;
    for k in 0..=n {
        let s = minus_plus_vector(n, k);
        let e = inst.model().energy(&s)?;
        if best.as_ref().map_or(true, |&(_, be)| e < be) {
            best = Some((s, e));
        }
    }
    Ok(best.expect("N+1 >= 1 candidates"))
}

/// Parses the MQLib Max-Cut edge-list convention: a header line `n m`
/// followed by exactly m lines `i j w` with 1-indexed vertices. Vertices are
/// shifted to 0-based; duplicate edges (in either orientation) and self-loops
/// are rejected.
pub fn parse_maxcut_edgelist(text: &str) -> Result<WeightedGraph> {
    let mut lines = text.lines().enumerate();
    let (header_no, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| Error::parse(1, "empty input"))?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(header_no + 1, "expected vertex count"))?;
    let m: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(header_no + 1, "expected edge count"))?;
    if parts.next().is_some() {
        return Err(Error::parse(header_no + 1, "trailing tokens after 'n m'"));
    }

    let mut edges = Vec::with_capacity(m);
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let human = line_no + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(human, format!("expected 'i j w', got {toks:?}")));
        }
        let i: usize = toks[0]
            .parse()
            .map_err(|_| Error::parse(human, format!("bad vertex index {:?}", toks[0])))?;
        let j: usize = toks[1]
            .parse()
            .map_err(|_| Error::parse(human, format!("bad vertex index {:?}", toks[1])))?;
        let w: f64 = toks[2]
            .parse()
            .map_err(|_| Error::parse(human, format!("bad weight {:?}", toks[2])))?;
        if i < 1 || i > n || j < 1 || j > n {
            return Err(Error::parse(human, format!("vertex out of range 1..={n}")));
        }
        let (a, b) = ((i - 1) as u32, (j - 1) as u32);
        edges.push((a.min(b), a.max(b), w));
    }
    if edges.len() != m {
        return Err(Error::parse(
            header_no + 1,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    WeightedGraph::new(n, edges).map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::parse(1, msg),
        other => other,
    })
}

/// Serializes a graph in the same edge-list convention (1-indexed).
pub fn to_maxcut_edgelist(g: &WeightedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.edges().len());
    for &(i, j, w) in g.edges() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, w);
    }
    out
}

/// Best-reported objective values per instance name. Zero values stay in the
/// table but are unusable as ratio references.
#[derive(Debug, Clone, Default)]
pub struct BestKnownTable {
    values: BTreeMap<String, f64>,
    source: String,
}

impl BestKnownTable {
    /// Parses `name,value` lines; a leading `name,value`-style header row is
    /// skipped. Duplicate names and non-numeric values are errors.
    pub fn from_csv_str(text: &str, source: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let human = idx + 1;
            let (name, raw) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(human, "expected 'name,value'"))?;
            let name = name.trim();
            let raw = raw.trim();
            let value: f64 = match raw.parse() {
                Ok(v) => v,
                Err(_) if idx == 0 => continue, // header row
                Err(_) => return Err(Error::parse(human, format!("bad value {raw:?}"))),
            };
            if !value.is_finite() {
                return Err(Error::parse(human, format!("non-finite value {raw:?}")));
            }
            if values.insert(name.to_owned(), value).is_some() {
                return Err(Error::parse(human, format!("duplicate name {name:?}")));
            }
        }
        Ok(BestKnownTable { values, source: source.to_owned() })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text, &path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Raw stored value, if present.
    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    /// Reference usable for ratio computation: present and nonzero.
    pub fn ratio_reference(&self, name: &str) -> Option<f64> {
        self.value(name).filter(|&v| v != 0.0)
    }
}

/// How an achieved objective is normalized against its reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    /// Ising energy against the exact ground-state energy: `achieved/reference`.
    IsingGround,
    /// Cut value against the best reported cut: `|achieved|/reference`.
    CutBest,
}

pub fn approximation_ratio(achieved: f64, reference: f64, kind: RatioKind) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::invalid("zero reference value for ratio"));
    }
    Ok(match kind {
        RatioKind::IsingGround => achieved / reference,
        RatioKind::CutBest => achieved.abs() / reference,
    })
}

/// Dense random Ising model: couplings uniform on (−1, 1), symmetric, zero
/// diagonal; biases uniform on (−1, 1); zero offset. Continuous weights make
/// exact energy ties improbable.
pub fn random_ising(n: usize, rng: &mut impl Rng) -> IsingModel {
    let a = CouplingMatrix::from_symmetric_entries(
        n,
        (0..n).flat_map(|i| {
            let vals: Vec<(usize, usize, f64)> = (i + 1..n)
                .map(|j| (i, j, rng.gen_range(-1.0..1.0)))
                .collect();
            vals
        }),
    )
    .expect("indices in range");
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    IsingModel::new(a, b, 0.0).expect("dimensions match")
}

/// Random Max-Cut instance: each pair independently an edge with probability
/// `edge_prob`, integer weights uniform on 1..=max_weight.
pub fn random_maxcut(
    n: usize,
    edge_prob: f64,
    max_weight: u32,
    rng: &mut impl Rng,
) -> Result<WeightedGraph> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::invalid("edge_prob must be in [0, 1]"));
    }
    if max_weight < 1 {
        return Err(Error::invalid("max_weight must be at least 1"));
    }
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if rng.gen::<f64>() < edge_prob {
                edges.push((i, j, f64::from(rng.gen_range(1..=max_weight))));
            }
        }
    }
    WeightedGraph::new(n, edges)
}
