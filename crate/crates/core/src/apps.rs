//! Downstream uses of an ordering: block compression cost of the permuted
//! adjacency matrix, and edge partitioning with its replication factor.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Result};
use crate::graph::Graph;
use crate::locality::Permutation;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompressionCost {
    pub block: usize,
    /// Non-empty `b x b` blocks.
    pub nonzero_blocks: usize,
    /// `nonzero_blocks / ceil(n / b)^2`.
    pub ratio: f64,
}

/// Counts non-empty blocks of the adjacency matrix relabelled by `perm`.
pub fn compression_cost(g: &Graph, perm: &Permutation, b: usize) -> Result<CompressionCost> {
    ensure!(b >= 1, "block width must be at least 1");
    ensure!(perm.len() == g.n(), "permutation length differs from vertex count");
    let blocks: HashSet<(usize, usize)> = g
        .arcs()
        .map(|(u, v)| (perm.position(u) / b, perm.position(v) / b))
        .collect();
    let side = g.n().div_ceil(b);
    let total = side * side;
    let nonzero_blocks = blocks.len();
    Ok(CompressionCost {
        block: b,
        nonzero_blocks,
        ratio: if total == 0 { 0.0 } else { nonzero_blocks as f64 / total as f64 },
    })
}

pub fn compression_csv(costs: &[CompressionCost]) -> String {
    let mut out = String::from("b,cost_nz,cost_r\n");
    for c in costs {
        let _ = writeln!(out, "{},{},{:.12}", c.block, c.nonzero_blocks, c.ratio);
    }
    out
}

/// Assignment of each undirected edge to one of `k` parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePartition {
    k: usize,
    /// Sorted `(min, max)` keys.
    edges: Vec<(usize, usize)>,
    parts: Vec<usize>,
}

impl EdgePartition {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.edges.iter().copied().zip(self.parts.iter().copied())
    }

    pub fn part_of(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok().map(|i| self.parts[i])
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &p in &self.parts {
            sizes[p] += 1;
        }
        sizes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 12);
        for ((u, v), p) in self.assignment() {
            let _ = writeln!(out, "{u},{v},{p}");
        }
        out
    }

    fn from_pairs(k: usize, mut pairs: Vec<((usize, usize), usize)>) -> Self {
        pairs.sort_unstable();
        let (edges, parts) = pairs.into_iter().unzip();
        EdgePartition { k, edges, parts }
    }
}

/// Sweeps the ordering and fills parts in turn with the edges whose earlier
/// endpoint is being visited. Part `i` takes `floor(m/k)` edges, plus one for
/// the first `m mod k` parts, so every part is non-empty.
pub fn partition_from_order(g: &Graph, perm: &Permutation, k: usize) -> Result<EdgePartition> {
    ensure!(k >= 1, "partition count must be at least 1");
    ensure!(perm.len() == g.n(), "permutation length differs from vertex count");
    let edges = g.undirected_edges();
    let m = edges.len();
    ensure!(k <= m, "cannot split {m} edges into {k} non-empty parts");

    let mut later: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for &(u, v) in &edges {
        let (first, second) = if perm.position(u) < perm.position(v) { (u, v) } else { (v, u) };
        later[first].push(second);
    }
    let quota = |part: usize| m / k + usize::from(part < m % k);
    let mut pairs = Vec::with_capacity(m);
    let mut part = 0;
    let mut filled = 0;
    for &x in perm.order() {
        let mut nbrs = std::mem::take(&mut later[x]);
        nbrs.sort_unstable_by_key(|&y| perm.position(y));
        for y in nbrs {
            if filled == quota(part) {
                part += 1;
                filled = 0;
            }
            pairs.push(((x.min(y), x.max(y)), part));
            filled += 1;
        }
    }
    Ok(EdgePartition::from_pairs(k, pairs))
}

/// Average number of parts each vertex appears in, over all `n` vertices.
pub fn replication_factor(g: &Graph, part: &EdgePartition) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for ((u, v), p) in part.assignment() {
        seen.insert((p, u));
        seen.insert((p, v));
    }
    seen.len() as f64 / g.n() as f64
}

/// Each edge to a uniformly random part.
pub fn random_partition(g: &Graph, k: usize, seed: u64) -> Result<EdgePartition> {
    ensure!(k >= 1, "partition count must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = g
        .undirected_edges()
        .into_iter()
        .map(|e| (e, rng.random_range(0..k)))
        .collect();
    Ok(EdgePartition::from_pairs(k, pairs))
}

pub const GREEDY_SLACK: f64 = 0.1;

/// Streaming greedy placement.
///
/// Edges arrive in sorted order. A part scores 2 if it already holds both
/// endpoints, 1 for one, 0 otherwise, minus `size / ceil(m/k)`. Parts at the
/// hard cap `ceil(ceil(m/k) * (1 + slack))` are skipped. Ties go to the
/// least-loaded, then lowest-numbered part.
pub fn greedy_partition(g: &Graph, k: usize, slack: f64) -> Result<EdgePartition> {
    ensure!(k >= 1, "partition count must be at least 1");
    ensure!(slack >= 0.0, "slack must be non-negative");
    let edges = g.undirected_edges();
    let m = edges.len();
    let capacity = m.div_ceil(k).max(1);
    let hard_cap = ((capacity as f64) * (1.0 + slack)).ceil() as usize;
    let mut holds = vec![vec![false; g.n()]; k];
    let mut sizes = vec![0usize; k];
    let mut pairs = Vec::with_capacity(m);
    for (u, v) in edges {
        let mut best: Option<(f64, usize)> = None;
        for p in 0..k {
            if sizes[p] >= hard_cap {
                continue;
            }
            let score = holds[p][u] as u8 as f64 + holds[p][v] as u8 as f64
                - sizes[p] as f64 / capacity as f64;
            let better = match best {
                None => true,
                Some((s, q)) => score > s || (score == s && sizes[p] < sizes[q]),
            };
            if better {
                best = Some((score, p));
            }
        }
        let (_, p) = best.expect("total hard capacity covers every edge");
        holds[p][u] = true;
        holds[p][v] = true;
        sizes[p] += 1;
        pairs.push(((u, v), p));
    }
    Ok(EdgePartition::from_pairs(k, pairs))
}
