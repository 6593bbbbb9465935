//! Per-frame scene graphs: KNN edges, inverse-distance weights, positional
//! codes and the normalized adjacency consumed by the GCN.

mod encoding;
mod knn;
mod scene_graph;

pub use encoding::{encode_node_position, frequency, positional_encoding, PositionalEncodingTable};
pub use knn::{distance, edge_weight, knn_edges, WeightedEdge, MIN_DISTANCE};
pub use scene_graph::{
    build_scene_graph, normalize_adjacency, FeatureProjection, GraphNodeRecord, GraphRecord,
    SceneGraph,
};
