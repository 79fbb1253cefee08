//! Test-only oracles. Nothing here calls the library's scoring code.

#![allow(dead_code)]

use graphorder::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense adjacency matrix built from the arc list.
pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; g.n()]; g.n()];
    for (u, v) in g.arcs() {
        a[u][v] = true;
    }
    a
}

/// Common in-neighbours plus arcs between `u` and `v`, from the dense matrix.
pub fn naive_similarity(a: &[Vec<bool>], u: usize, v: usize) -> u64 {
    if u == v {
        return 0;
    }
    let siblings = (0..a.len()).filter(|&x| a[x][u] && a[x][v]).count() as u64;
    siblings + a[u][v] as u64 + a[v][u] as u64
}

/// Double loop over all position pairs at distance `1..=w`.
pub fn naive_f(g: &Graph, order: &[usize], w: usize) -> u64 {
    let a = adjacency(g);
    let mut f = 0;
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            if j - i <= w {
                f += naive_similarity(&a, order[i], order[j]);
            }
        }
    }
    f
}

pub fn random_digraph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    Graph::from_arcs_lossy(n, arcs).unwrap()
}

pub fn random_order(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// A sparse core of `core` vertices plus leaves attached to a few hubs in
/// all three attachment styles.
pub fn fan_graph(core: usize, leaves: usize, rng: &mut ChaCha8Rng) -> Graph {
    let n = core + leaves;
    let mut arcs = Vec::new();
    for u in 0..core {
        for v in 0..core {
            if u != v && rng.random_bool(0.3) {
                arcs.push((u, v));
            }
        }
    }
    let hubs = (core / 2).max(1);
    for leaf in core..n {
        let hub = rng.random_range(0..hubs);
        match rng.random_range(0..3) {
            0 => arcs.push((hub, leaf)),
            1 => arcs.push((leaf, hub)),
            _ => {
                arcs.push((hub, leaf));
                arcs.push((leaf, hub));
            }
        }
    }
    Graph::from_arcs_lossy(n, arcs).unwrap()
}

/// Non-empty blocks by scanning every cell of the permuted matrix.
pub fn naive_block_count(g: &Graph, order: &[usize], b: usize) -> usize {
    let n = g.n();
    let a = adjacency(g);
    let side = n.div_ceil(b);
    let mut count = 0;
    for bi in 0..side {
        for bj in 0..side {
            let mut hit = false;
            for i in bi * b..((bi + 1) * b).min(n) {
                for j in bj * b..((bj + 1) * b).min(n) {
                    hit |= a[order[i]][order[j]];
                }
            }
            count += hit as usize;
        }
    }
    count
}

/// Sum over parts of the number of distinct endpoints, divided by n.
pub fn naive_replication(n: usize, assignment: &[((usize, usize), usize)], k: usize) -> f64 {
    let mut total = 0;
    for p in 0..k {
        let mut touched = vec![false; n];
        for &((u, v), q) in assignment {
            if q == p {
                touched[u] = true;
                touched[v] = true;
            }
        }
        total += touched.iter().filter(|&&t| t).count();
    }
    total as f64 / n as f64
}

/// Two 6-cliques (vertices 0..6 and 6..12) joined by the edge 5-6, stored as
/// arc pairs.
pub fn two_cliques() -> Graph {
    let mut arcs = Vec::new();
    for base in [0, 6] {
        for u in base..base + 6 {
            for v in base..base + 6 {
                if u != v {
                    arcs.push((u, v));
                }
            }
        }
    }
    arcs.push((5, 6));
    arcs.push((6, 5));
    Graph::from_arcs_lossy(12, arcs).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
