//! Seeded synthetic graph generators. Both produce bidirected arc sets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{ensure, Result};
use crate::graph::Graph;

/// Erdős–Rényi G(n, p): each unordered pair is present with probability `p`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    ensure!((0.0..=1.0).contains(&p), "edge probability {p} outside [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    if p > 0.0 && n > 1 {
        // Skip sampling: the gap to the next included pair in a row is geometric.
        let gap = Geometric::new(p).expect("p in (0, 1]");
        for u in 0..n - 1 {
            let mut v = u + 1;
            loop {
                let skip = gap.sample(&mut rng);
                v = match usize::try_from(skip).ok().and_then(|s| v.checked_add(s)) {
                    Some(next) => next,
                    None => break,
                };
                if v >= n {
                    break;
                }
                arcs.push((u, v));
                arcs.push((v, u));
                v += 1;
            }
        }
    }
    Graph::from_arcs_lossy(n, arcs)
}

/// Power-law graph via the configuration model.
///
/// Degrees are drawn by inverse-transform sampling from a zeta law with
/// exponent `gamma` truncated to `1..=n-1`. Stubs are shuffled and paired;
/// self-loops and repeated pairs are dropped, not rewired.
pub fn gen_power_law(n: usize, gamma: f64, seed: u64) -> Result<Graph> {
    ensure!(gamma > 1.0, "power-law exponent must exceed 1, got {gamma}");
    ensure!(n >= 1, "power-law graph needs at least one vertex");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n == 1 {
        return Ok(Graph::empty(1));
    }

    let mut cdf = Vec::with_capacity(n - 1);
    let mut acc = 0.0;
    for k in 1..n {
        acc += (k as f64).powf(-gamma);
        cdf.push(acc);
    }
    let mut stubs = Vec::new();
    for v in 0..n {
        let x = rng.random::<f64>() * acc;
        let k = cdf.partition_point(|&c| c < x).min(n - 2) + 1;
        stubs.extend(std::iter::repeat_n(v, k));
    }
    stubs.shuffle(&mut rng);
    if stubs.len() % 2 == 1 {
        stubs.pop();
    }
    let arcs = stubs
        .chunks_exact(2)
        .flat_map(|pair| [(pair[0], pair[1]), (pair[1], pair[0])]);
    Graph::from_arcs_lossy(n, arcs)
}
