use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distances below this are clamped before inversion.
pub const MIN_DISTANCE: f64 = 1e-6;

/// Undirected edge stored once with `i < j`; it stands for both directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Inverse-distance edge weight, `1 / max(d, 1e-6)`.
pub fn edge_weight(d: f64) -> Result<f64> {
    if !d.is_finite() || d < 0.0 {
        return Err(Error::Input(format!(
            "edge distance must be finite and >= 0, got {d}"
        )));
    }
    Ok(1.0 / d.max(MIN_DISTANCE))
}

pub fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Symmetrized k-nearest-neighbour edges over 2-D points.
///
/// Every node proposes edges to its `min(k, N-1)` nearest other nodes
/// (ties go to the smaller index); the undirected result is the union of
/// all proposals, sorted by `(i, j)`.
pub fn knn_edges(positions: &[[f64; 2]], k: usize) -> Result<Vec<WeightedEdge>> {
    if positions.is_empty() {
        return Err(Error::Input("knn_edges needs at least one point".into()));
    }
    if k == 0 {
        return Err(Error::Config("knn k must be at least 1".into()));
    }
    if let Some(i) = positions
        .iter()
        .position(|p| !p[0].is_finite() || !p[1].is_finite())
    {
        return Err(Error::Input(format!("non-finite coordinate at node {i}")));
    }
    let n = positions.len();
    let take = k.min(n - 1);
    let mut chosen: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        cand.clear();
        cand.extend(
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (distance(positions[i], positions[j]), j)),
        );
        cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(d, j) in &cand[..take] {
            chosen.entry((i.min(j), i.max(j))).or_insert(d);
        }
    }
    chosen
        .into_iter()
        .map(|((i, j), d)| {
            Ok(WeightedEdge {
                i,
                j,
                weight: edge_weight(d)?,
            })
        })
        .collect()
}
