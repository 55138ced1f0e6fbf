//! Hardware coupling-graph generators (Chimera, Pegasus), sub-graph
//! selection, and mask permutations.
//!
//! Node orderings are fixed and documented per family so permutations and
//! sub-graph selection reproduce across runs:
//!
//! - Chimera C(rows, cols, shore): index = ((r·cols + c)·2 + u)·shore + k for
//!   cell (r, c), orientation u (0 = vertical, couples across rows; 1 =
//!   horizontal, couples across columns), and shore position k.
//! - Pegasus P_M: index = ((u·M + w)·12 + k)·(M−1) + z, lexicographic in the
//!   published coordinates (u, w, k, z) with u the orientation, w the
//!   perpendicular tile offset, k ∈ 0..12 the wire offset, and z ∈ 0..M−1 the
//!   parallel tile offset.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::CouplingMatrix;

/// Wire offsets of the standard Pegasus generation: `VERTICAL_OFFSETS[k]` is
/// the parallel shift of vertical wires with offset k, `HORIZONTAL_OFFSETS`
/// likewise for horizontal wires.
pub const VERTICAL_OFFSETS: [usize; 12] = [2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6];
pub const HORIZONTAL_OFFSETS: [usize; 12] = [6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10];

/// Symmetric 0/1 adjacency structure of a hardware coupling graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardwareMask {
    n: usize,
    /// Sorted neighbor lists; symmetric, no self-loops.
    rows: Vec<Vec<u32>>,
    label: String,
}

impl HardwareMask {
    /// Builds from undirected edges; duplicates are merged.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>, label: String) -> Result<Self> {
        let mut rows = vec![Vec::new(); n];
        for (i, j) in edges {
            let (i, j) = (i as usize, j as usize);
            if i >= n || j >= n {
                return Err(Error::IndexOutOfBounds { index: i.max(j), len: n });
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop at node {i}")));
            }
            rows[i].push(j as u32);
            rows[j].push(i as u32);
        }
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
        }
        Ok(HardwareMask { n, rows, label })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.rows[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges with `i < j`, ascending.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.n {
            for &j in &self.rows[i] {
                if (i as u32) < j {
                    out.push((i as u32, j));
                }
            }
        }
        out
    }

    /// Edge list as "i j" lines, 0-indexed, i < j, sorted.
    pub fn to_edgelist_string(&self) -> String {
        let mut s = String::new();
        for (i, j) in self.edges() {
            s.push_str(&format!("{i} {j}\n"));
        }
        s
    }

    /// Induced subgraph on the first `n` nodes of the canonical ordering.
    /// Truncated masks may be irregular (isolated nodes are possible).
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n {
            return Err(Error::invalid(format!(
                "cannot truncate {}-node mask to {n} nodes",
                self.n
            )));
        }
        if n == self.n {
            return Ok(self.clone());
        }
        let rows: Vec<Vec<u32>> = self.rows[..n]
            .iter()
            .map(|r| r.iter().copied().filter(|&j| (j as usize) < n).collect())
            .collect();
        Ok(HardwareMask {
            n,
            rows,
            label: format!("{}[0..{n}]", self.label),
        })
    }
}

/// A bijection on {0, …, n−1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(p: Vec<u32>) -> Result<Self> {
        let n = p.len();
        let mut seen = vec![false; n];
        for &v in &p {
            if v as usize >= n || seen[v as usize] {
                return Err(Error::invalid("not a bijection on 0..n"));
            }
            seen[v as usize] = true;
        }
        Ok(Permutation(p))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation(inv)
    }
}

/// Uniform random permutation by Fisher–Yates shuffle; deterministic per
/// seeded generator.
pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Permutation {
    let mut p: Vec<u32> = (0..n as u32).collect();
    p.shuffle(rng);
    Permutation(p)
}

/// `M'[i][j] = M[p(i)][p(j)]`: relabels the mask so hardware node `p(i)`
/// plays the role of problem variable `i`.
pub fn permuted_mask(mask: &HardwareMask, p: &Permutation) -> Result<HardwareMask> {
    if p.len() != mask.n() {
        return Err(Error::DimensionMismatch { expected: mask.n(), found: p.len() });
    }
    let inv = p.inverse();
    let rows: Vec<Vec<u32>> = (0..mask.n())
        .map(|i| {
            let mut r: Vec<u32> = mask
                .neighbors(p.apply(i))
                .iter()
                .map(|&q| inv.apply(q as usize) as u32)
                .collect();
            r.sort_unstable();
            r
        })
        .collect();
    Ok(HardwareMask {
        n: mask.n(),
        rows,
        label: mask.label.clone(),
    })
}

/// Chimera graph C(rows, cols, shore): a rows×cols grid of K_{shore,shore}
/// unit cells. Vertical qubits (u=0) couple to the same shore position in the
/// row-adjacent cell, horizontal qubits (u=1) in the column-adjacent cell.
pub fn chimera_mask(rows: usize, cols: usize, shore: usize) -> Result<HardwareMask> {
    if rows < 1 || cols < 1 || shore < 1 {
        return Err(Error::invalid("chimera dimensions must be at least 1"));
    }
    let idx = |r: usize, c: usize, u: usize, k: usize| -> u32 {
        ((((r * cols + c) * 2) + u) * shore + k) as u32
    };
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            for k in 0..shore {
                for k2 in 0..shore {
                    edges.push((idx(r, c, 0, k), idx(r, c, 1, k2)));
                }
            }
            if r + 1 < rows {
                for k in 0..shore {
                    edges.push((idx(r, c, 0, k), idx(r + 1, c, 0, k)));
                }
            }
            if c + 1 < cols {
                for k in 0..shore {
                    edges.push((idx(r, c, 1, k), idx(r, c + 1, 1, k)));
                }
            }
        }
    }
    HardwareMask::from_edges(
        rows * cols * 2 * shore,
        edges,
        format!("chimera:{rows},{cols},{shore}"),
    )
}

fn pegasus_index(m: usize, u: usize, w: usize, k: usize, z: usize) -> u32 {
    (((u * m + w) * 12 + k) * (m - 1) + z) as u32
}

/// Pegasus graph P_M from the published coordinate definition, pristine (no
/// broken-qubit modeling). Wires are unit segments in a 12M×12M grid; odd
/// couplers join the two wires of a pair, external couplers join collinear
/// wires in adjacent parallel tiles, and internal couplers join every
/// crossing vertical/horizontal pair. Node count is 24·M·(M−1).
pub fn pegasus_mask(size: usize) -> Result<HardwareMask> {
    if size < 2 {
        return Err(Error::invalid(format!("pegasus size must be at least 2, got {size}")));
    }
    let m = size;
    let mut edges = Vec::new();
    for u in 0..2 {
        for w in 0..m {
            for z in 0..m - 1 {
                // Odd couplers: wire pair (2j, 2j+1).
                for j in 0..6 {
                    edges.push((pegasus_index(m, u, w, 2 * j, z), pegasus_index(m, u, w, 2 * j + 1, z)));
                }
                // External couplers: same wire, next parallel tile.
                if z + 1 < m - 1 {
                    for k in 0..12 {
                        edges.push((pegasus_index(m, u, w, k, z), pegasus_index(m, u, w, k, z + 1)));
                    }
                }
            }
        }
    }
    // Internal couplers: vertical (0, w, k, z) crosses horizontal
    // (1, w', k', z') with w' = z + [k' < SV[k]] and z' = w − [k < SH[k']];
    // the pair is an edge whenever z' stays on the tile range.
    for w in 0..m {
        for z in 0..m - 1 {
            for k in 0..12 {
                for k2 in 0..12 {
                    let wp = z + usize::from(k2 < VERTICAL_OFFSETS[k]);
                    let drop = usize::from(k < HORIZONTAL_OFFSETS[k2]);
                    if w < drop {
                        continue;
                    }
                    let zp = w - drop;
                    if zp > m - 2 {
                        continue;
                    }
                    edges.push((pegasus_index(m, 0, w, k, z), pegasus_index(m, 1, wp, k2, zp)));
                }
            }
        }
    }
    HardwareMask::from_edges(24 * m * (m - 1), edges, format!("pegasus:{m}"))
}

/// Node indices of the size-`sub_size` Pegasus graph embedded at the
/// canonical corner (coordinates with w < sub_size and z < sub_size−1) of a
/// full Pegasus mask; the induced subgraph equals `pegasus_mask(sub_size)`
/// under the canonical relabeling (ascending index order).
pub fn sub_pegasus_nodes(full: &HardwareMask, sub_size: usize) -> Result<Vec<u32>> {
    let full_size = match full.label().strip_prefix("pegasus:") {
        Some(rest) => rest
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("not a full pegasus mask: {}", full.label())))?,
        None => {
            return Err(Error::invalid(format!(
                "sub-pegasus selection requires a pegasus mask, got {}",
                full.label()
            )))
        }
    };
    if sub_size < 2 || sub_size > full_size {
        return Err(Error::invalid(format!(
            "sub size {sub_size} out of range 2..={full_size}"
        )));
    }
    let mut nodes = Vec::with_capacity(24 * sub_size * (sub_size - 1));
    for u in 0..2 {
        for w in 0..sub_size {
            for k in 0..12 {
                for z in 0..sub_size - 1 {
                    nodes.push(pegasus_index(full_size, u, w, k, z));
                }
            }
        }
    }
    Ok(nodes)
}

/// Entry-wise product `A ⊙ M`: keeps coefficients on mask edges, zeroes the
/// rest. Masks carry no self-loops, so any diagonal of `A` is dropped.
pub fn apply_mask(a: &CouplingMatrix, mask: &HardwareMask) -> Result<CouplingMatrix> {
    if a.n() != mask.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), found: mask.n() });
    }
    CouplingMatrix::from_symmetric_entries(
        a.n(),
        a.iter_upper()
            .filter(|&(i, j, _)| mask.has_edge(i, j)),
    )
}

/// A growable hardware-graph family for sizing masks to problems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyFamily {
    /// Pegasus graphs P_m for m ≥ min_size.
    Pegasus { min_size: usize },
    /// Chimera grids growing from (rows, cols) by alternately widening and
    /// deepening (cols increments first), at fixed shore.
    Chimera { rows: usize, cols: usize, shore: usize },
}

impl TopologyFamily {
    pub fn pegasus() -> Self {
        TopologyFamily::Pegasus { min_size: 2 }
    }

    pub fn chimera_shore(shore: usize) -> Self {
        TopologyFamily::Chimera { rows: 1, cols: 1, shore }
    }
}

impl std::str::FromStr for TopologyFamily {
    type Err = Error;

    /// Accepts `pegasus`, `pegasus:M`, or `chimera:R,C,S`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "pegasus" {
            return Ok(TopologyFamily::pegasus());
        }
        if let Some(rest) = s.strip_prefix("pegasus:") {
            let min_size: usize = rest
                .parse()
                .map_err(|_| Error::invalid(format!("bad pegasus size: {rest}")))?;
            if min_size < 2 {
                return Err(Error::invalid("pegasus size must be at least 2"));
            }
            return Ok(TopologyFamily::Pegasus { min_size });
        }
        if let Some(rest) = s.strip_prefix("chimera:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::invalid(format!("expected chimera:R,C,S, got {s}")));
            }
            let nums: Vec<usize> = parts
                .iter()
                .map(|p| p.parse().map_err(|_| Error::invalid(format!("bad chimera spec: {s}"))))
                .collect::<Result<_>>()?;
            if nums.iter().any(|&v| v < 1) {
                return Err(Error::invalid("chimera dimensions must be at least 1"));
            }
            return Ok(TopologyFamily::Chimera { rows: nums[0], cols: nums[1], shore: nums[2] });
        }
        Err(Error::invalid(format!("unknown topology spec: {s}")))
    }
}

/// Smallest mask of the family with at least `problem_n` nodes, truncated to
/// the first `problem_n` nodes of the canonical ordering. Truncated masks may
/// be irregular; an exact fit returns the full generated graph.
pub fn mask_for_problem(problem_n: usize, family: &TopologyFamily) -> Result<HardwareMask> {
    if problem_n < 1 {
        return Err(Error::invalid("problem size must be at least 1"));
    }
    match *family {
        TopologyFamily::Pegasus { min_size } => {
            let mut m = min_size.max(2);
            while 24 * m * (m - 1) < problem_n {
                m += 1;
            }
            pegasus_mask(m)?.truncated(problem_n)
        }
        TopologyFamily::Chimera { mut rows, mut cols, shore } => {
            if shore < 1 || rows < 1 || cols < 1 {
                return Err(Error::invalid("chimera dimensions must be at least 1"));
            }
            while rows * cols * 2 * shore < problem_n {
                if cols <= rows {
                    cols += 1;
                } else {
                    rows += 1;
                }
            }
            chimera_mask(rows, cols, shore)?.truncated(problem_n)
        }
    }
}
