//! Pairwise similarity and the windowed locality score.
//!
//! `S(u, v)` is the number of common in-neighbours of `u` and `v` plus the
//! number of arcs between them. The score of an ordering sums `S` over every
//! pair of vertices placed at most `w` positions apart.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{ensure, Error, Result};
use crate::graph::Graph;

/// Dense similarity tables are only built up to this many vertices by default.
pub const DEFAULT_DENSE_CAP: usize = 2_000;

/// A bijection on `0..n`; `order()[i]` is the vertex at position `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            ensure!(v < n, "vertex {v} out of range for a permutation of {n}");
            ensure!(position[v] == usize::MAX, "vertex {v} appears twice");
            position[v] = i;
        }
        Ok(Permutation { order, position })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            order: (0..n).collect(),
            position: (0..n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Zero-based position of `v`.
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.order.len() * 6);
        for v in &self.order {
            let _ = writeln!(s, "{v}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut order = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v = line.parse::<usize>().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("'{line}' is not a vertex id"),
            })?;
            order.push(v);
        }
        Permutation::new(order)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WindowSize(usize);

impl WindowSize {
    pub fn new(w: usize) -> Result<Self> {
        ensure!(w >= 1, "window size must be at least 1");
        Ok(WindowSize(w))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

/// Anything that can report `S(u, v)` for distinct vertices.
///
/// Implementations return 0 on the diagonal; callers should not rely on it.
pub trait Similarity {
    fn vertex_count(&self) -> usize;
    fn sim(&self, u: usize, v: usize) -> u64;
}

/// Common in-neighbours of `u` and `v`.
pub fn sibling_count(g: &Graph, u: usize, v: usize) -> Result<u64> {
    ensure!(u != v, "sibling_count needs distinct vertices, got {u} twice");
    Ok(common_sorted(g.in_neighbors(u), g.in_neighbors(v)))
}

/// Arcs between `u` and `v` in either direction (0, 1 or 2).
pub fn neighbor_count(g: &Graph, u: usize, v: usize) -> Result<u64> {
    ensure!(u != v, "neighbor_count needs distinct vertices, got {u} twice");
    Ok(g.has_arc(u, v) as u64 + g.has_arc(v, u) as u64)
}

pub fn similarity(g: &Graph, u: usize, v: usize) -> Result<u64> {
    Ok(sibling_count(g, u, v)? + neighbor_count(g, u, v)?)
}

fn common_sorted(a: &[usize], b: &[usize]) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

impl Similarity for Graph {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn sim(&self, u: usize, v: usize) -> u64 {
        if u == v {
            return 0;
        }
        common_sorted(self.in_neighbors(u), self.in_neighbors(v))
            + self.has_arc(u, v) as u64
            + self.has_arc(v, u) as u64
    }
}

/// Calls `f(u, s)` for every `u != x` with `S(x, u) = s > 0`, possibly
/// several times per `u`; the calls for one `u` sum to `S(x, u)`.
pub(crate) fn for_each_similar(g: &Graph, x: usize, mut f: impl FnMut(usize, u64)) {
    for &u in g.out_neighbors(x) {
        f(u, 1);
    }
    for &u in g.in_neighbors(x) {
        f(u, 1);
    }
    for &p in g.in_neighbors(x) {
        for &u in g.out_neighbors(p) {
            if u != x {
                f(u, 1);
            }
        }
    }
}

/// Symmetric dense table of similarities. The diagonal is held at zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityMatrix {
    n: usize,
    data: Vec<u64>,
}

impl SimilarityMatrix {
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = vec![0; n * n];
        for (u, row) in rows.iter().enumerate() {
            ensure!(row.len() == n, "row {u} has {} entries, expected {n}", row.len());
            for (v, &s) in row.iter().enumerate() {
                if u != v {
                    ensure!(
                        s == rows[v][u],
                        "matrix not symmetric at ({u}, {v}): {s} vs {}",
                        rows[v][u]
                    );
                    data[u * n + v] = s;
                }
            }
        }
        Ok(SimilarityMatrix { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        SimilarityMatrix {
            n,
            data: vec![0; n * n],
        }
    }

    /// Materializes `S` for every pair of `g`.
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.n();
        let mut data = vec![0u64; n * n];
        for x in 0..n {
            let row = &mut data[x * n..(x + 1) * n];
            for_each_similar(g, x, |u, s| row[u] += s);
        }
        SimilarityMatrix { n, data }
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    /// Parses the fixture format: a size line (`5` or `n 5`) then one row per
    /// line. Diagonal cells are ignored and may be written as `-`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty similarity matrix".into(),
        })?;
        let size_tok = header.strip_prefix('n').map(str::trim).unwrap_or(header);
        let n: usize = size_tok.parse().map_err(|_| Error::Parse {
            line: hline,
            msg: format!("bad matrix size '{header}'"),
        })?;
        let mut rows = Vec::with_capacity(n);
        for (line, text) in lines {
            let mut row = Vec::with_capacity(n);
            for (col, tok) in text.split_whitespace().enumerate() {
                if col == rows.len() && tok == "-" {
                    row.push(0);
                    continue;
                }
                row.push(tok.parse::<u64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("'{tok}' is not a non-negative integer"),
                })?);
            }
            if row.len() != n {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::Parse {
                line: hline,
                msg: format!("expected {n} rows, found {}", rows.len()),
            });
        }
        Self::from_rows(rows)
    }
}

impl Similarity for SimilarityMatrix {
    fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    fn sim(&self, u: usize, v: usize) -> u64 {
        self.data[u * self.n + v]
    }
}

/// Dense table for small graphs, on-demand evaluation otherwise.
pub enum SimilarityIndex<'g> {
    Dense(SimilarityMatrix),
    OnDemand(&'g Graph),
}

impl<'g> SimilarityIndex<'g> {
    pub fn for_graph(g: &'g Graph, dense_cap: usize) -> Self {
        if g.n() <= dense_cap {
            SimilarityIndex::Dense(SimilarityMatrix::from_graph(g))
        } else {
            SimilarityIndex::OnDemand(g)
        }
    }
}

impl Similarity for SimilarityIndex<'_> {
    fn vertex_count(&self) -> usize {
        match self {
            SimilarityIndex::Dense(m) => m.vertex_count(),
            SimilarityIndex::OnDemand(g) => g.n(),
        }
    }

    #[inline]
    fn sim(&self, u: usize, v: usize) -> u64 {
        match self {
            SimilarityIndex::Dense(m) => m.sim(u, v),
            SimilarityIndex::OnDemand(g) => g.sim(u, v),
        }
    }
}

/// Locality score of `perm` by scanning each position's forward window.
pub fn f_score<S: Similarity + ?Sized>(s: &S, perm: &Permutation, w: WindowSize) -> u64 {
    f_score_order(s, perm.order(), w)
}

/// Locality score of a (possibly partial) sequence of distinct vertices.
pub fn f_score_order<S: Similarity + ?Sized>(s: &S, order: &[usize], w: WindowSize) -> u64 {
    let mut total = 0;
    for (i, &u) in order.iter().enumerate() {
        let end = (i + w.get()).min(order.len() - 1);
        for &v in &order[i + 1..=end] {
            total += s.sim(u, v);
        }
    }
    total
}

/// Locality score computed from the graph's arcs and sibling fans directly.
///
/// Each arc within distance `w` contributes one; each pair of out-neighbours
/// of a common vertex within distance `w` contributes one.
pub fn f_score_graph(g: &Graph, perm: &Permutation, w: WindowSize) -> u64 {
    let w = w.get();
    let pos = |v: usize| perm.position(v);
    let mut total = g
        .arcs()
        .filter(|&(u, v)| pos(u).abs_diff(pos(v)) <= w)
        .count() as u64;
    let mut buf = Vec::new();
    for p in 0..g.n() {
        let outs = g.out_neighbors(p);
        if outs.len() < 2 {
            continue;
        }
        buf.clear();
        buf.extend(outs.iter().map(|&v| pos(v)));
        buf.sort_unstable();
        let mut lo = 0;
        for hi in 0..buf.len() {
            while buf[hi] - buf[lo] > w {
                lo += 1;
            }
            total += (hi - lo) as u64;
        }
    }
    total
}

/// Cumulated weight of `v` against the recently placed vertices.
pub fn k_score<S: Similarity + ?Sized>(s: &S, recent: &[usize], v: usize) -> Result<u64> {
    ensure!(!recent.contains(&v), "vertex {v} is already in the window");
    Ok(recent.iter().map(|&u| s.sim(u, v)).sum())
}

/// Sum of `S` over all unordered pairs of `set`.
pub fn pairwise_sum<S: Similarity + ?Sized>(s: &S, set: &[usize]) -> u64 {
    let mut total = 0;
    for (i, &u) in set.iter().enumerate() {
        for &v in &set[i + 1..] {
            total += s.sim(u, v);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_vertex() -> SimilarityMatrix {
        SimilarityMatrix::from_rows(vec![
            vec![0, 2, 0, 1, 1],
            vec![2, 0, 0, 1, 1],
            vec![0, 0, 0, 0, 0],
            vec![1, 1, 0, 0, 1],
            vec![1, 1, 0, 1, 0],
        ])
        .unwrap()
    }

    fn w(x: usize) -> WindowSize {
        WindowSize::new(x).unwrap()
    }

    #[test]
    fn sibling_and_neighbor_counts() {
        let g = Graph::from_arcs_lossy(3, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(sibling_count(&g, 1, 2).unwrap(), 1);
        let g = Graph::from_arcs_lossy(5, [(0, 2), (1, 2), (0, 3), (1, 3)]).unwrap();
        assert_eq!(sibling_count(&g, 2, 3).unwrap(), 2);
        assert_eq!(sibling_count(&g, 0, 4).unwrap(), 0);
        assert!(sibling_count(&g, 1, 1).is_err());

        let g = Graph::from_arcs_lossy(3, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(neighbor_count(&g, 0, 1).unwrap(), 2);
        assert_eq!(neighbor_count(&g, 0, 2).unwrap(), 0);
        let g = Graph::from_arcs_lossy(2, [(0, 1)]).unwrap();
        assert_eq!(neighbor_count(&g, 1, 0).unwrap(), 1);
        assert!(neighbor_count(&g, 0, 0).is_err());
    }

    #[test]
    fn example_one_score() {
        assert_eq!(f_score_order(&five_vertex(), &[0, 1, 4], w(3)), 4);
    }

    #[test]
    fn five_vertex_best_order_scores_seven() {
        let perm = Permutation::new(vec![0, 1, 3, 4, 2]).unwrap();
        assert_eq!(f_score(&five_vertex(), &perm, w(3)), 7);
        assert_eq!(f_score(&five_vertex(), &Permutation::identity(1), w(3)), 0);
    }

    #[test]
    fn k_scores_from_five_vertex() {
        let m = five_vertex();
        assert_eq!(k_score(&m, &[], 1).unwrap(), 0);
        assert_eq!(k_score(&m, &[0], 1).unwrap(), 2);
        assert_eq!(k_score(&m, &[0, 1, 3], 4).unwrap(), 3);
        assert!(k_score(&m, &[0, 1], 1).is_err());
    }

    #[test]
    fn matrix_fixture_parses_dashes() {
        let text = "5\n- 2 0 1 1\n2 - 0 1 1\n0 0 - 0 0\n1 1 0 - 1\n1 1 0 1 -\n";
        assert_eq!(SimilarityMatrix::parse(text).unwrap(), five_vertex());
        assert!(SimilarityMatrix::parse("2\n0 1\n2 0\n").is_err());
        assert!(SimilarityMatrix::parse("2\n0 1\n").is_err());
    }

    #[test]
    fn dense_matrix_matches_on_demand() {
        let g = Graph::from_arcs_lossy(
            6,
            [(0, 1), (1, 0), (0, 3), (0, 4), (2, 3), (2, 4), (5, 4), (4, 5)],
        )
        .unwrap();
        let m = SimilarityMatrix::from_graph(&g);
        for u in 0..6 {
            for v in 0..6 {
                let want = if u == v { 0 } else { similarity(&g, u, v).unwrap() };
                assert_eq!(m.sim(u, v), want, "({u},{v})");
            }
        }
    }

    #[test]
    fn permutation_rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        let p = Permutation::parse("2\n0\n1\n").unwrap();
        assert_eq!(p.position(2), 0);
        assert_eq!(Permutation::parse(&p.to_text()).unwrap(), p);
        assert!(WindowSize::new(0).is_err());
    }
}
