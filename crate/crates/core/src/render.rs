//! Greyscale picture of a relabelled adjacency matrix.

use crate::error::{ensure, Result};
use crate::graph::Graph;
use crate::locality::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmFormat {
    /// ASCII `P2`.
    Plain,
    /// Binary `P5`.
    Raw,
}

/// Renders arcs as black pixels on white. With `cell > 1`, each output pixel
/// covers a `cell x cell` block and is shaded by the fraction of occupied
/// entries.
pub fn render_pgm(g: &Graph, perm: &Permutation, cell: usize, format: PgmFormat) -> Result<Vec<u8>> {
    ensure!(cell >= 1, "cell size must be at least 1");
    ensure!(perm.len() == g.n(), "permutation length differs from vertex count");
    let side = g.n().div_ceil(cell).max(1);
    let mut counts = vec![0u32; side * side];
    for (u, v) in g.arcs() {
        counts[(perm.position(u) / cell) * side + perm.position(v) / cell] += 1;
    }
    let area = (cell * cell) as f64;
    let pixels: Vec<u8> = counts
        .iter()
        .map(|&c| 255 - ((c as f64 / area).min(1.0) * 255.0).round() as u8)
        .collect();

    let mut out = match format {
        PgmFormat::Plain => format!("P2\n{side} {side}\n255\n").into_bytes(),
        PgmFormat::Raw => format!("P5\n{side} {side}\n255\n").into_bytes(),
    };
    match format {
        PgmFormat::Raw => out.extend_from_slice(&pixels),
        PgmFormat::Plain => {
            for row in pixels.chunks(side) {
                let line: Vec<String> = row.iter().map(u8::to_string).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    Ok(out)
}
