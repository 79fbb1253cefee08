//! Degree-1 fan merging and expansion of merged orderings.
//!
//! Leaves whose only neighbour is the same hub, attached by the same arc
//! pattern (one arc in, one arc out, or the reciprocal pair), are
//! interchangeable under the locality score, so ordering can run on one
//! representative per fan.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Result};
use crate::graph::Graph;
use crate::locality::Permutation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexGroups {
    members: Vec<Vec<usize>>,
    original_n: usize,
}

impl VertexGroups {
    pub fn identity(n: usize) -> Self {
        VertexGroups {
            members: (0..n).map(|v| vec![v]).collect(),
            original_n: n,
        }
    }

    /// Original vertices represented by merged vertex `merged`.
    pub fn members(&self, merged: usize) -> &[usize] {
        &self.members[merged]
    }

    pub fn merged_n(&self) -> usize {
        self.members.len()
    }

    pub fn original_n(&self) -> usize {
        self.original_n
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.members.iter().map(Vec::as_slice)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Side {
    /// The sole arc points from the hub into the leaf.
    FromHub,
    ToHub,
    /// Reciprocal pair, as in undirected graphs stored as arc pairs.
    Both,
}

fn fan_key(g: &Graph, v: usize) -> Option<(usize, Side)> {
    match (g.in_neighbors(v), g.out_neighbors(v)) {
        ([hub], []) => Some((*hub, Side::FromHub)),
        ([], [hub]) => Some((*hub, Side::ToHub)),
        ([a], [b]) if a == b => Some((*a, Side::Both)),
        _ => None,
    }
}

/// Collapses leaf fans. Merged ids follow the smallest original member.
pub fn merge_degree_one(g: &Graph) -> (Graph, VertexGroups) {
    let n = g.n();
    let mut fan_size: HashMap<(usize, Side), usize> = HashMap::new();
    for v in 0..n {
        if let Some(key) = fan_key(g, v) {
            *fan_size.entry(key).or_default() += 1;
        }
    }

    let mut to_merged = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut fan_id: HashMap<(usize, Side), usize> = HashMap::new();
    for v in 0..n {
        let key = fan_key(g, v).filter(|k| fan_size[k] >= 2);
        let id = match key {
            Some(k) => *fan_id.entry(k).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            }),
            None => {
                members.push(Vec::new());
                members.len() - 1
            }
        };
        members[id].push(v);
        to_merged[v] = id;
    }

    let merged = Graph::from_arcs_lossy(
        members.len(),
        g.arcs().map(|(u, v)| (to_merged[u], to_merged[v])),
    )
    .expect("relabelled ids are in range");
    (
        merged,
        VertexGroups {
            members,
            original_n: n,
        },
    )
}

/// Replaces each merged vertex by its members in a seeded random order.
pub fn expand_permutation(
    perm: &Permutation,
    groups: &VertexGroups,
    seed: u64,
) -> Result<Permutation> {
    ensure!(
        perm.len() == groups.merged_n(),
        "permutation has {} entries but there are {} merged vertices",
        perm.len(),
        groups.merged_n()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = Vec::with_capacity(groups.original_n());
    for &m in perm.order() {
        let start = order.len();
        order.extend_from_slice(groups.members(m));
        order[start..].shuffle(&mut rng);
    }
    Permutation::new(order)
}
