//! Immutable directed graph with sorted forward and reverse adjacency.
//!
//! Vertex ids are dense `0..n`. Self-loops and duplicate arcs never make it
//! into a [`Graph`]; [`Graph::from_arcs`] drops them and reports how many.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Largest vertex id accepted from text input.
pub const MAX_VERTEX_ID: u64 = u32::MAX as u64 - 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    arc_count: usize,
}

/// What ingestion silently discarded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Dropped {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            arc_count: 0,
        }
    }

    /// Builds a simple graph from arcs. Every endpoint must be `< n`.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<(Self, Dropped)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out_adj = vec![Vec::new(); n];
        let mut dropped = Dropped::default();
        for (u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::Contract(format!(
                    "arc ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                dropped.self_loops += 1;
                continue;
            }
            out_adj[u].push(v);
        }
        let mut in_adj = vec![Vec::new(); n];
        let mut arc_count = 0;
        for (u, outs) in out_adj.iter_mut().enumerate() {
            outs.sort_unstable();
            let before = outs.len();
            outs.dedup();
            dropped.duplicates += before - outs.len();
            arc_count += outs.len();
            for &v in outs.iter() {
                in_adj[v].push(u);
            }
        }
        // in_adj is filled in increasing u, so each list is already sorted.
        Ok((
            Graph {
                out_adj,
                in_adj,
                arc_count,
            },
            dropped,
        ))
    }

    /// Like [`Graph::from_arcs`] but discards the drop report.
    pub fn from_arcs_lossy<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_arcs(n, arcs).map(|(g, _)| g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    #[inline]
    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out_adj[u]
    }

    #[inline]
    pub fn in_neighbors(&self, u: usize) -> &[usize] {
        &self.in_adj[u]
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out_adj[u].binary_search(&v).is_ok()
    }

    /// In-degree plus out-degree.
    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.out_adj[u].len() + self.in_adj[u].len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, outs)| outs.iter().map(move |&v| (u, v)))
    }

    /// Arcs collapsed to undirected edges `(min, max)`, sorted and unique.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self.arcs().map(|(u, v)| (u.min(v), u.max(v))).collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn max_in_degree(&self) -> usize {
        self.in_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Serializes to the edge-list text format with an `n` header line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.arc_count * 12);
        let _ = writeln!(out, "n {}", self.n());
        for (u, v) in self.arcs() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list()).map_err(|e| Error::io(path, e))
    }
}

/// Result of parsing an edge list.
#[derive(Debug)]
pub struct Loaded {
    pub graph: Graph,
    pub dropped: Dropped,
}

/// Parses the whitespace edge-list format.
///
/// `#` lines are comments. An optional `n <int>` line before the first arc
/// fixes the vertex count; otherwise it is one more than the largest id.
pub fn load_edge_list(text: &str) -> Result<Loaded> {
    let mut declared_n: Option<usize> = None;
    let mut arcs = Vec::new();
    let mut max_id: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().unwrap_or_default();
        if first == "n" {
            if declared_n.is_some() || !arcs.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "'n' header must come before any arc".into(),
                });
            }
            let value = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                msg: "'n' header without a count".into(),
            })?;
            if tokens.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "trailing tokens after 'n' header".into(),
                });
            }
            let n = parse_id(value, line_no)?;
            declared_n = Some(n);
            continue;
        }
        let second = tokens.next().ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected two vertex ids, found '{line}'"),
        })?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("unexpected token '{extra}'"),
            });
        }
        let u = parse_id(first, line_no)?;
        let v = parse_id(second, line_no)?;
        if let Some(n) = declared_n {
            for (id, tok) in [(u, first), (v, second)] {
                if id >= n {
                    return Err(Error::Range {
                        line: line_no,
                        id: tok.to_string(),
                    });
                }
            }
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        arcs.push((u, v));
    }

    let n = declared_n.unwrap_or_else(|| max_id.map_or(0, |m| m + 1));
    let (graph, dropped) = Graph::from_arcs(n, arcs)?;
    Ok(Loaded { graph, dropped })
}

fn parse_id(tok: &str, line: usize) -> Result<usize> {
    if !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse {
            line,
            msg: format!("'{tok}' is not a non-negative integer"),
        });
    }
    match tok.parse::<u64>() {
        Ok(id) if id <= MAX_VERTEX_ID => Ok(id as usize),
        _ => Err(Error::Range {
            line,
            id: tok.to_string(),
        }),
    }
}

pub fn read_edge_list(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_edge_list(&text)
}
