//! Problem representations, energy evaluation, and conversions among QUBO,
//! Ising, and Max-Cut forms.
//!
//! Energies are `sᵀAs + bᵀs + offset` over spins `s ∈ {−1,+1}ⁿ`. The offset is
//! carried through every conversion so converted models stay energy-equal to
//! their sources. All matrices are kept exactly symmetric by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this size coupling matrices switch from a dense row-major block to
/// adjacency-list rows. Benchmark Max-Cut instances reach ~1000 sparse
/// vertices; fully connected instances stay small enough for dense storage.
pub const DENSE_LIMIT: usize = 256;

/// A spin assignment; every entry is −1 or +1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(s: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = s.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::invalid(format!("spin entry {bad} not in {{-1,+1}}")));
        }
        Ok(SpinVector(s))
    }

    /// All-ones vector.
    pub fn ones(n: usize) -> Self {
        SpinVector(vec![1; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    /// Returns a copy with entry `i` negated.
    pub fn flipped(&self, i: usize) -> Self {
        let mut s = self.0.clone();
        s[i] = -s[i];
        SpinVector(s)
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    /// pre: value is ±1.
    pub fn set(&mut self, i: usize, value: i8) {
        debug_assert!(value == 1 || value == -1);
        self.0[i] = value;
    }
}

impl std::ops::Index<usize> for SpinVector {
    type Output = i8;
    fn index(&self, i: usize) -> &i8 {
        &self.0[i]
    }
}

impl From<SpinVector> for Vec<i8> {
    fn from(s: SpinVector) -> Vec<i8> {
        s.0
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Row-major n×n block.
    Dense(Vec<f64>),
    /// Per-row (column, value) lists sorted by column; zero values dropped.
    Rows(Vec<Vec<(u32, f64)>>),
}

/// A symmetric real matrix of couplings. Symmetry is enforced at
/// construction: every constructor either mirrors entries or averages
/// `(M + Mᵀ)/2`, so `get(i, j) == get(j, i)` always holds.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    storage: Storage,
}

impl CouplingMatrix {
    pub fn zeros(n: usize) -> Self {
        let storage = if n <= DENSE_LIMIT {
            Storage::Dense(vec![0.0; n * n])
        } else {
            Storage::Rows(vec![Vec::new(); n])
        };
        CouplingMatrix { n, storage }
    }

    /// Builds from entries interpreted symmetrically: `(i, j, v)` with `i != j`
    /// contributes `v` to both `[i][j]` and `[j][i]`; `(i, i, v)` contributes
    /// to the diagonal. Duplicate pairs accumulate.
    pub fn from_symmetric_entries(
        n: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut m = CouplingMatrix::zeros(n);
        for (i, j, v) in entries {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfBounds { index: i.max(j), len: n });
            }
            m.add_entry(i, j, v);
            if i != j {
                m.add_entry(j, i, v);
            }
        }
        m.normalize();
        Ok(m)
    }

    /// Builds from full dense rows, averaging `(M + Mᵀ)/2`. The second return
    /// value reports whether the input was already symmetric.
    pub fn from_dense_rows(rows: &[Vec<f64>]) -> Result<(Self, bool)> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
        }
        let mut symmetric = true;
        let mut m = CouplingMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                if rows[i][j] != rows[j][i] {
                    symmetric = false;
                }
                let v = if i == j { rows[i][j] } else { (rows[i][j] + rows[j][i]) / 2.0 };
                if v != 0.0 {
                    m.add_entry(i, j, v);
                    if i != j {
                        m.add_entry(j, i, v);
                    }
                }
            }
        }
        m.normalize();
        Ok((m, symmetric))
    }

    fn add_entry(&mut self, i: usize, j: usize, v: f64) {
        match &mut self.storage {
            Storage::Dense(d) => d[i * self.n + j] += v,
            Storage::Rows(rows) => rows[i].push((j as u32, v)),
        }
    }

    /// Sorts sparse rows and merges duplicate columns.
    fn normalize(&mut self) {
        if let Storage::Rows(rows) = &mut self.storage {
            for row in rows {
                row.sort_by_key(|&(j, _)| j);
                let mut merged: Vec<(u32, f64)> = Vec::with_capacity(row.len());
                for &(j, v) in row.iter() {
                    match merged.last_mut() {
                        Some(last) if last.0 == j => last.1 += v,
                        _ => merged.push((j, v)),
                    }
                }
                merged.retain(|&(_, v)| v != 0.0);
                merged.shrink_to_fit();
                *row = merged;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d[i * self.n + j],
            Storage::Rows(rows) => rows[i]
                .binary_search_by_key(&(j as u32), |&(c, _)| c)
                .map(|k| rows[i][k].1)
                .unwrap_or(0.0),
        }
    }

    /// Iterates the nonzero entries of row `i` as `(column, value)`.
    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (dense, rows): (Option<&[f64]>, Option<&[(u32, f64)]>) = match &self.storage {
            Storage::Dense(d) => (Some(&d[i * self.n..(i + 1) * self.n]), None),
            Storage::Rows(r) => (None, Some(&r[i])),
        };
        dense
            .into_iter()
            .flat_map(|row| row.iter().enumerate().filter(|(_, &v)| v != 0.0))
            .map(|(j, &v)| (j, v))
            .chain(
                rows.into_iter()
                    .flatten()
                    .map(|&(j, v)| (j as usize, v)),
            )
    }

    /// Count of nonzero off-diagonal pairs `{i, j}`.
    pub fn offdiag_edge_count(&self) -> usize {
        (0..self.n)
            .map(|i| self.row_iter(i).filter(|&(j, _)| j > i).count())
            .sum()
    }

    /// Nonzero entries with `i <= j`.
    pub fn iter_upper(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.row_iter(i)
                .filter(move |&(j, _)| j >= i)
                .map(move |(j, v)| (i, j, v))
        })
    }

    /// `A·v` for a real vector.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row_iter(i).map(|(j, a)| a * v[j]).sum())
            .collect()
    }

    /// `A·s` for a spin vector.
    pub fn matvec_spins(&self, s: &[i8]) -> Vec<f64> {
        assert_eq!(s.len(), self.n);
        (0..self.n)
            .map(|i| self.row_iter(i).map(|(j, a)| a * f64::from(s[j])).sum())
            .collect()
    }

    /// `sᵀAs` including any diagonal.
    pub fn quad_form_spins(&self, s: &[i8]) -> f64 {
        assert_eq!(s.len(), self.n);
        (0..self.n)
            .map(|i| {
                let row: f64 = self.row_iter(i).map(|(j, a)| a * f64::from(s[j])).sum();
                row * f64::from(s[i])
            })
            .sum()
    }

    /// `Σ_j A[i][j]·s[j]` over `j != i`.
    pub fn offdiag_row_dot(&self, i: usize, s: &[i8]) -> f64 {
        self.row_iter(i)
            .filter(|&(j, _)| j != i)
            .map(|(j, a)| a * f64::from(s[j]))
            .sum()
    }

    /// Returns the matrix scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(d) => Storage::Dense(d.iter().map(|v| v * factor).collect()),
            Storage::Rows(rows) => Storage::Rows(
                rows.iter()
                    .map(|r| r.iter().map(|&(j, v)| (j, v * factor)).collect())
                    .collect(),
            ),
        };
        CouplingMatrix { n: self.n, storage }
    }

    /// Returns the matrix with `c` added to every diagonal entry.
    pub fn with_added_diagonal(&self, c: f64) -> Self {
        let mut m = self.clone();
        match &mut m.storage {
            Storage::Dense(d) => {
                for i in 0..self.n {
                    d[i * self.n + i] += c;
                }
            }
            Storage::Rows(rows) => {
                for (i, row) in rows.iter_mut().enumerate() {
                    match row.binary_search_by_key(&(i as u32), |&(col, _)| col) {
                        Ok(k) => {
                            row[k].1 += c;
                            if row[k].1 == 0.0 {
                                row.remove(k);
                            }
                        }
                        Err(k) => {
                            if c != 0.0 {
                                row.insert(k, (i as u32, c));
                            }
                        }
                    }
                }
            }
        }
        m
    }
}

/// Ising problem: minimize `sᵀAs + bᵀs + offset` over `s ∈ {−1,+1}ⁿ`.
#[derive(Debug, Clone)]
pub struct IsingModel {
    a: CouplingMatrix,
    b: Vec<f64>,
    offset: f64,
    /// True when a non-symmetric input matrix was averaged to `(M+Mᵀ)/2`.
    symmetrized: bool,
}

impl IsingModel {
    pub fn new(a: CouplingMatrix, b: Vec<f64>, offset: f64) -> Result<Self> {
        if b.len() != a.n() {
            return Err(Error::DimensionMismatch { expected: a.n(), found: b.len() });
        }
        if a.n() == 0 {
            return Err(Error::invalid("model dimension must be at least 1"));
        }
        Ok(IsingModel { a, b, offset, symmetrized: false })
    }

    /// Builds from dense rows; non-symmetric input is averaged and flagged,
    /// never rejected.
    pub fn from_dense(rows: &[Vec<f64>], b: Vec<f64>, offset: f64) -> Result<Self> {
        let (a, was_symmetric) = CouplingMatrix::from_dense_rows(rows)?;
        let mut m = IsingModel::new(a, b, offset)?;
        m.symmetrized = !was_symmetric;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn a(&self) -> &CouplingMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Whether construction had to symmetrize a non-symmetric input.
    pub fn was_symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// `sᵀAs + bᵀs + offset`.
    pub fn energy(&self, s: &SpinVector) -> Result<f64> {
        if s.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: s.len() });
        }
        let quad = self.a.quad_form_spins(s.as_slice());
        let lin: f64 = self
            .b
            .iter()
            .zip(s.as_slice())
            .map(|(&bi, &si)| bi * f64::from(si))
            .sum();
        Ok(quad + lin + self.offset)
    }

    /// `energy(flip(s, i)) − energy(s)` in O(row-degree):
    /// `−4·s_i·Σ_{j≠i} A[i][j]·s_j − 2·b_i·s_i`. The diagonal entry is
    /// unchanged by a flip and drops out.
    pub fn delta_energy(&self, s: &SpinVector, i: usize) -> Result<f64> {
        if i >= self.n() {
            return Err(Error::IndexOutOfBounds { index: i, len: self.n() });
        }
        if s.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: s.len() });
        }
        let si = f64::from(s[i]);
        let row = self.a.offdiag_row_dot(i, s.as_slice());
        Ok(-4.0 * si * row - 2.0 * self.b[i] * si)
    }

    /// Energy-preserving reformulation `A' = A + c·I`, `offset' = offset − c·n`.
    /// The gradient `2A's = 2As + 2cs` changes even though energies do not.
    pub fn apply_diagonal_shift(&self, c: f64) -> IsingModel {
        IsingModel {
            a: self.a.with_added_diagonal(c),
            b: self.b.clone(),
            offset: self.offset - c * self.n() as f64,
            symmetrized: self.symmetrized,
        }
    }
}

/// QUBO problem: minimize `xᵀQx` over `x ∈ {0,1}ⁿ`.
#[derive(Debug, Clone)]
pub struct QuboModel {
    q: CouplingMatrix,
    symmetrized: bool,
}

impl QuboModel {
    pub fn new(q: CouplingMatrix) -> Self {
        QuboModel { q, symmetrized: false }
    }

    /// Builds from dense rows; non-symmetric input is averaged and flagged.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let (q, was_symmetric) = CouplingMatrix::from_dense_rows(rows)?;
        Ok(QuboModel { q, symmetrized: !was_symmetric })
    }

    pub fn n(&self) -> usize {
        self.q.n()
    }

    pub fn q(&self) -> &CouplingMatrix {
        &self.q
    }

    pub fn was_symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// `xᵀQx` for binary `x` given as 0/1 entries.
    pub fn energy_binary(&self, x: &[u8]) -> Result<f64> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: x.len() });
        }
        let mut e = 0.0;
        for i in 0..self.n() {
            if x[i] == 0 {
                continue;
            }
            e += self
                .q
                .row_iter(i)
                .filter(|&(j, _)| x[j] != 0)
                .map(|(_, v)| v)
                .sum::<f64>();
        }
        Ok(e)
    }
}

/// Substitution `s = 2x − 𝟙`: `A = Q/4`, `b = (Q·𝟙)/2`, `offset = (𝟙ᵀQ𝟙)/4`,
/// so `xᵀQx == sᵀAs + bᵀs + offset` for every binary `x`. The `symmetrized`
/// flag of the input carries over.
pub fn qubo_to_ising(q: &QuboModel) -> IsingModel {
    let n = q.n();
    let ones = vec![1.0; n];
    let q_row_sums = q.q().matvec(&ones);
    let b: Vec<f64> = q_row_sums.iter().map(|v| v / 2.0).collect();
    let offset = q_row_sums.iter().sum::<f64>() / 4.0;
    let a = q.q().scaled(0.25);
    IsingModel {
        a,
        b,
        offset,
        symmetrized: q.symmetrized,
    }
}

/// Weighted graph for Max-Cut: edges `(i, j, w)` with `i < j`.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(u32, u32, f64)>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(u32, u32, f64)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(i, j, _) in &edges {
            if i as usize >= n || j as usize >= n {
                return Err(Error::IndexOutOfBounds { index: i.max(j) as usize, len: n });
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop at vertex {i}")));
            }
            if i > j {
                return Err(Error::invalid(format!("edge ({i},{j}) not in i<j order")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::invalid(format!("duplicate edge ({i},{j})")));
            }
        }
        Ok(WeightedGraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }
}

/// Max-Cut instance as an Ising minimization: `A[i][j] = A[j][i] = w/2` per
/// edge, `b = 0`, `offset = 0`. For every `s`,
/// `cut_value(g, s) == (W_tot − sᵀAs)/2`, so minimizing the energy maximizes
/// the cut.
pub fn maxcut_to_ising(g: &WeightedGraph) -> IsingModel {
    let a = CouplingMatrix::from_symmetric_entries(
        g.n(),
        g.edges().iter().map(|&(i, j, w)| (i as usize, j as usize, w / 2.0)),
    )
    .expect("graph invariants already validated");
    IsingModel {
        a,
        b: vec![0.0; g.n()],
        offset: 0.0,
        symmetrized: false,
    }
}

/// `Σ_{(i,j,w)} w·(1 − s_i·s_j)/2`: total weight of edges crossing the cut.
pub fn cut_value(g: &WeightedGraph, s: &SpinVector) -> Result<f64> {
    if s.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: s.len() });
    }
    Ok(g.edges()
        .iter()
        .map(|&(i, j, w)| w * (1.0 - f64::from(s[i as usize] * s[j as usize])) / 2.0)
        .sum())
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    n: usize,
    offset: f64,
    biases: Vec<f64>,
    couplings: Vec<(usize, usize, f64)>,
}

impl IsingModel {
    /// Loads the JSON interchange format
    /// `{"n", "offset", "biases", "couplings": [[i, j, value]]}`. Couplings
    /// are interpreted symmetrically: an `[i, j, v]` entry (any order; `i == j`
    /// addresses the diagonal) sets both `A[i][j]` and `A[j][i]` to `v`;
    /// duplicate pairs accumulate.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ModelJson = serde_json::from_str(text)?;
        if raw.biases.len() != raw.n {
            return Err(Error::DimensionMismatch { expected: raw.n, found: raw.biases.len() });
        }
        let entries = raw
            .couplings
            .into_iter()
            .map(|(i, j, v)| if i <= j { (i, j, v) } else { (j, i, v) });
        let a = CouplingMatrix::from_symmetric_entries(raw.n, entries)?;
        IsingModel::new(a, raw.biases, raw.offset)
    }

    /// Serializes to the JSON interchange format with `i <= j` coupling
    /// entries (diagonal entries, when present, appear as `[i, i, v]`).
    pub fn to_json(&self) -> String {
        let raw = ModelJson {
            n: self.n(),
            offset: self.offset,
            biases: self.b.clone(),
            couplings: self.a.iter_upper().collect(),
        };
        serde_json::to_string_pretty(&raw).expect("model serialization cannot fail")
    }
}
