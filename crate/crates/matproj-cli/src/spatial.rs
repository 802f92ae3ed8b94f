//! Spatial smoothness prior: precision `C⁻¹ = L + εI` with `L` the
//! combinatorial Laplacian of an undirected simple graph over the feature
//! grid. Nearby (adjacent) features are encouraged to take similar values.

use std::collections::HashSet;

use nalgebra::DMatrix;

use crate::error::{CliError, Result};

/// Builds `L + εI` from an edge list. Self-loops and duplicate edges are
/// rejected; `ε` must be positive so the result is SPD.
pub fn build_spatial_precision(
    dim: usize,
    edges: &[(usize, usize)],
    jitter: f64,
) -> Result<DMatrix<f64>> {
    if jitter <= 0.0 {
        return Err(CliError::Config(format!(
            "spatial jitter must be positive, got {jitter}"
        )));
    }
    let mut seen = HashSet::new();
    let mut m = DMatrix::zeros(dim, dim);
    for &(a, b) in edges {
        if a == b {
            return Err(CliError::Config(format!("self-loop on node {a}")));
        }
        if a >= dim || b >= dim {
            return Err(CliError::Config(format!(
                "edge ({a}, {b}) outside the {dim}-node graph"
            )));
        }
        let key = (a.min(b), a.max(b));
        if !seen.insert(key) {
            return Err(CliError::Config(format!("duplicate edge ({a}, {b})")));
        }
        m[(a, a)] += 1.0;
        m[(b, b)] += 1.0;
        m[(a, b)] -= 1.0;
        m[(b, a)] -= 1.0;
    }
    for i in 0..dim {
        m[(i, i)] += jitter;
    }
    Ok(m)
}

/// Edges of a `rows × cols` 4-neighbor grid, a convenient synthetic
/// adjacency.
pub fn grid_edges(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if c + 1 < cols {
                edges.push((i, i + 1));
            }
            if r + 1 < rows {
                edges.push((i, i + cols));
            }
        }
    }
    edges
}
