//! Greedy window ordering, degree ordering, and an exhaustive oracle.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::locality::{for_each_similar, Permutation, Similarity, WindowSize};

/// Largest instance [`brute_force_optimal`] will enumerate.
pub const BRUTE_FORCE_CAP: usize = 10;

/// Greedy ordering: repeatedly append the unplaced vertex with the largest
/// cumulated similarity to the last `w` placed vertices. Ties go to the
/// smallest id, so the first vertex is always 0.
///
/// Scores are maintained incrementally as vertices enter and leave the
/// window; the per-step argmax is a linear scan.
pub fn go_order(g: &Graph, w: WindowSize) -> Permutation {
    let n = g.n();
    let w = w.get();
    let mut k = vec![0u64; n];
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = argmax_unplaced(&k, &placed);
        placed[next] = true;
        order.push(next);
        for_each_similar(g, next, |u, s| k[u] += s);
        if order.len() > w {
            let leaving = order[order.len() - 1 - w];
            for_each_similar(g, leaving, |u, s| k[u] -= s);
        }
    }
    Permutation::new(order).expect("greedy order is a bijection")
}

/// Greedy ordering over any similarity source, recomputing every score at
/// each step. Same output as [`go_order`] on the same similarities.
pub fn go_order_with<S: Similarity + ?Sized>(s: &S, w: WindowSize) -> Permutation {
    let n = s.vertex_count();
    let mut placed = vec![false; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut k = vec![0u64; n];
    for _ in 0..n {
        let recent = &order[order.len().saturating_sub(w.get())..];
        for v in 0..n {
            if !placed[v] {
                k[v] = recent.iter().map(|&u| s.sim(u, v)).sum();
            }
        }
        let next = argmax_unplaced(&k, &placed);
        placed[next] = true;
        order.push(next);
    }
    Permutation::new(order).expect("greedy order is a bijection")
}

fn argmax_unplaced(k: &[u64], placed: &[bool]) -> usize {
    let mut best = usize::MAX;
    let mut best_k = 0;
    for (v, (&kv, &done)) in k.iter().zip(placed).enumerate() {
        if !done && (best == usize::MAX || kv > best_k) {
            best = v;
            best_k = kv;
        }
    }
    best
}

/// Vertices by decreasing total degree, ties by id.
pub fn degree_order(g: &Graph) -> Permutation {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    Permutation::new(order).expect("sorted ids form a bijection")
}

/// Exact maximizer of the locality score by enumeration.
///
/// Returns the lexicographically smallest optimal order. Since the score is
/// invariant under reversal, only orders whose first id is smaller than their
/// last are visited; the lexicographically smallest optimum is among them.
pub fn brute_force_optimal<S: Similarity + ?Sized>(
    s: &S,
    w: WindowSize,
) -> Result<(Permutation, u64)> {
    let n = s.vertex_count();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::Refused(format!(
            "brute force is capped at {BRUTE_FORCE_CAP} vertices, got {n}"
        )));
    }
    if n <= 1 {
        return Ok((Permutation::identity(n), 0));
    }
    let mut search = Search {
        s,
        w: w.get(),
        n,
        order: Vec::with_capacity(n),
        used: vec![false; n],
        best: None,
    };
    search.descend(0);
    let (order, score) = search.best.expect("n >= 2 has a permutation");
    Ok((Permutation::new(order)?, score))
}

struct Search<'a, S: ?Sized> {
    s: &'a S,
    w: usize,
    n: usize,
    order: Vec<usize>,
    used: Vec<bool>,
    best: Option<(Vec<usize>, u64)>,
}

impl<S: Similarity + ?Sized> Search<'_, S> {
    fn descend(&mut self, score: u64) {
        let depth = self.order.len();
        if depth == self.n {
            if self.order[0] > self.order[depth - 1] {
                return;
            }
            if self.best.as_ref().is_none_or(|(_, b)| score > *b) {
                self.best = Some((self.order.clone(), score));
            }
            return;
        }
        for v in 0..self.n {
            if self.used[v] {
                continue;
            }
            let window = &self.order[depth.saturating_sub(self.w)..];
            let gain: u64 = window.iter().map(|&u| self.s.sim(u, v)).sum();
            self.used[v] = true;
            self.order.push(v);
            self.descend(score + gain);
            self.order.pop();
            self.used[v] = false;
        }
    }
}
