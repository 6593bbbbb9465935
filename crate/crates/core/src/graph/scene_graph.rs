use serde::{Deserialize, Serialize};

use super::encoding::{encode_node_position, PositionalEncodingTable};
use super::knn::{knn_edges, WeightedEdge};
use crate::error::{Error, Result};
use crate::nncore::Matrix;
use crate::scenegen::{ObjectClass, PixelPoint, SceneFrame};

/// Linear map from raw object features (F) to node width (D).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureProjection {
    /// `F × D`
    pub weight: Matrix,
    /// `1 × D`
    pub bias: Matrix,
}

impl FeatureProjection {
    pub fn apply(&self, raw: &Matrix) -> Result<Matrix> {
        if self.bias.shape() != [1, self.weight.cols()] {
            return Err(Error::shape(
                "projection bias",
                self.bias.shape(),
                [1, self.weight.cols()],
            ));
        }
        let mut out = raw.matmul(&self.weight)?;
        for i in 0..out.rows() {
            for (o, b) in out.row_mut(i).iter_mut().zip(self.bias.as_slice()) {
                *o += b;
            }
        }
        Ok(out)
    }
}

/// One frame as a graph.
///
/// Node features are `projection(raw_features) + position_codes`. The
/// projection is trainable, so the graph keeps both addends and the model
/// combines them; [`SceneGraph::node_features`] does the same for a fixed
/// projection.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    /// `N × F` raw object features.
    pub raw_features: Matrix,
    /// `N × D` positional codes of the node centres.
    pub position_codes: Matrix,
    pub edges: Vec<WeightedEdge>,
    /// `N × N` symmetric normalized adjacency with self-loops.
    pub norm_adjacency: Matrix,
    pub ego_node: usize,
    pub object_ids: Vec<u32>,
    pub classes: Vec<ObjectClass>,
    pub centers: Vec<PixelPoint>,
}

impl SceneGraph {
    pub fn num_nodes(&self) -> usize {
        self.raw_features.rows()
    }

    pub fn node_features(&self, projection: &FeatureProjection) -> Result<Matrix> {
        let mut x = projection.apply(&self.raw_features)?;
        x.add_assign(&self.position_codes)?;
        Ok(x)
    }

    /// Serializable summary (nodes and weighted edges) for graph dumps.
    pub fn record(&self, sequence_id: u32, frame_index: u32) -> GraphRecord {
        GraphRecord {
            sequence_id,
            frame_index,
            nodes: (0..self.num_nodes())
                .map(|i| GraphNodeRecord {
                    id: self.object_ids[i],
                    class: self.classes[i],
                    center: self.centers[i],
                    dim: self.position_codes.cols(),
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNodeRecord {
    pub id: u32,
    pub class: ObjectClass,
    pub center: PixelPoint,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub sequence_id: u32,
    pub frame_index: u32,
    pub nodes: Vec<GraphNodeRecord>,
    pub edges: Vec<WeightedEdge>,
}

/// `D̃^(-1/2) (A + I) D̃^(-1/2)` for a weighted undirected edge list.
///
/// Row degrees are summed in ascending weight order so relabeling nodes
/// permutes the result exactly.
pub fn normalize_adjacency(edges: &[WeightedEdge], n: usize) -> Result<Matrix> {
    let mut a = Matrix::identity(n);
    let mut incident: Vec<Vec<f64>> = vec![Vec::new(); n];
    for e in edges {
        if e.i >= n || e.j >= n || e.i == e.j {
            return Err(Error::Input(format!(
                "invalid edge ({}, {}) for {n} nodes",
                e.i, e.j
            )));
        }
        if !(e.weight > 0.0) || !e.weight.is_finite() {
            return Err(Error::Input(format!(
                "edge ({}, {}) has weight {}",
                e.i, e.j, e.weight
            )));
        }
        a[(e.i, e.j)] = e.weight;
        a[(e.j, e.i)] = e.weight;
        incident[e.i].push(e.weight);
        incident[e.j].push(e.weight);
    }
    let deg: Vec<f64> = incident
        .iter_mut()
        .map(|ws| {
            ws.sort_by(f64::total_cmp);
            1.0 + ws.iter().sum::<f64>()
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            let w = a[(i, j)];
            if w != 0.0 {
                a[(i, j)] = w / (deg[i] * deg[j]).sqrt();
            }
        }
    }
    Ok(a)
}

pub fn build_scene_graph(
    frame: &SceneFrame,
    k: usize,
    pe: &PositionalEncodingTable,
) -> Result<SceneGraph> {
    let n = frame.objects.len();
    if n == 0 {
        return Err(Error::Input(format!(
            "frame {} has no objects",
            frame.frame_index
        )));
    }
    if frame.ego_index >= n {
        return Err(Error::Input(format!(
            "frame {} ego_index {} out of {n} objects",
            frame.frame_index, frame.ego_index
        )));
    }
    let f = frame.objects[0].feature.len();
    let mut raw = Matrix::zeros(n, f);
    let mut codes = Matrix::zeros(n, pe.dim());
    let mut positions = Vec::with_capacity(n);
    for (i, o) in frame.objects.iter().enumerate() {
        if o.feature.len() != f {
            return Err(Error::Input(format!(
                "object {} feature length {} differs from {f}",
                o.object_id,
                o.feature.len()
            )));
        }
        raw.row_mut(i).copy_from_slice(&o.feature);
        codes
            .row_mut(i)
            .copy_from_slice(&encode_node_position(o.center, pe)?);
        positions.push([o.center.x, o.center.y]);
    }
    let edges = knn_edges(&positions, k)?;
    let norm_adjacency = normalize_adjacency(&edges, n)?;
    Ok(SceneGraph {
        raw_features: raw,
        position_codes: codes,
        edges,
        norm_adjacency,
        ego_node: frame.ego_index,
        object_ids: frame.objects.iter().map(|o| o.object_id).collect(),
        classes: frame.objects.iter().map(|o| o.class_id).collect(),
        centers: frame.objects.iter().map(|o| o.center).collect(),
    })
}
