use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SceneGraph;
use crate::nncore::{Matrix, Tape, Var};
use crate::scenegen::GroundPoint;

use super::config::ModelConfig;
use super::layers::{gcn_layer_forward, graph_readout, lstm_cell_step};
use super::params::{BoundParams, ModelParams};

/// Predicted ego positions for steps `t+1 … t+H`, in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPrediction {
    pub points: Vec<GroundPoint>,
}

impl TrajectoryPrediction {
    /// Positions relative to `origin`.
    pub fn relative_to(&self, origin: GroundPoint) -> Vec<GroundPoint> {
        self.points.iter().map(|p| *p - origin).collect()
    }

    pub fn from_relative(origin: GroundPoint, rel: &[GroundPoint]) -> Self {
        Self {
            points: rel.iter().map(|d| origin + *d).collect(),
        }
    }
}

fn check_graph(graph: &SceneGraph, cfg: &ModelConfig) -> Result<()> {
    if graph.raw_features.cols() != cfg.feature_size {
        return Err(Error::Config(format!(
            "feature_size: graph has {} features, model expects {}",
            graph.raw_features.cols(),
            cfg.feature_size
        )));
    }
    if graph.position_codes.cols() != cfg.node_dim {
        return Err(Error::Config(format!(
            "node_dim: graph codes have width {}, model expects {}",
            graph.position_codes.cols(),
            cfg.node_dim
        )));
    }
    Ok(())
}

/// Projection, positional codes, GCN stack and mean readout for one frame.
pub fn embed_frame(
    tape: &mut Tape,
    p: &BoundParams,
    graph: &SceneGraph,
    cfg: &ModelConfig,
) -> Result<Var> {
    check_graph(graph, cfg)?;
    let raw = tape.constant(graph.raw_features.clone());
    let codes = tape.constant(graph.position_codes.clone());
    let adj = tape.constant(graph.norm_adjacency.clone());
    let x = tape.matmul(raw, p.proj_w)?;
    let x = tape.add(x, p.proj_b)?;
    let mut h = tape.add(x, codes)?;
    let last = p.gcn.len() - 1;
    for (l, layer) in p.gcn.iter().enumerate() {
        h = gcn_layer_forward(tape, adj, h, layer, l < last)?;
    }
    graph_readout(tape, h)
}

/// Runs the whole model and returns the `H × 2` positions relative to the
/// ego position at the last observed frame.
pub fn predict_relative(
    tape: &mut Tape,
    p: &BoundParams,
    graphs: &[&SceneGraph],
    cfg: &ModelConfig,
) -> Result<Var> {
    if graphs.len() != cfg.obs_window {
        return Err(Error::Config(format!(
            "obs_window: got {} graphs, model expects {}",
            graphs.len(),
            cfg.obs_window
        )));
    }
    let mut seq: Vec<Var> = Vec::with_capacity(graphs.len());
    for g in graphs {
        seq.push(embed_frame(tape, p, g, cfg)?);
    }
    let hidden = cfg.lstm_hidden;
    for layer in &p.lstm {
        let mut h = tape.constant(Matrix::zeros(1, hidden));
        let mut c = tape.constant(Matrix::zeros(1, hidden));
        let mut outputs = Vec::with_capacity(seq.len());
        for &x in &seq {
            let step = lstm_cell_step(tape, x, h, c, layer)?;
            h = step.hidden;
            c = step.cell;
            outputs.push(h);
        }
        seq = outputs;
    }
    let last = *seq.last().expect("obs_window >= 1");
    let out = tape.matmul(last, p.head_w)?;
    let out = tape.add(out, p.head_b)?;
    let steps = tape.reshape(out, cfg.horizon, 2)?;
    // Row j of the result is the sum of the first j+1 displacement rows.
    let mut cumsum = Matrix::zeros(cfg.horizon, cfg.horizon);
    for j in 0..cfg.horizon {
        for k in 0..=j {
            cumsum[(j, k)] = 1.0;
        }
    }
    let cumsum = tape.constant(cumsum);
    tape.matmul(cumsum, steps)
}

/// Inference: absolute predicted positions starting from `origin` (ego at frame T).
pub fn forward(
    graphs: &[&SceneGraph],
    params: &ModelParams,
    origin: GroundPoint,
) -> Result<TrajectoryPrediction> {
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape)?;
    let rel = predict_relative(&mut tape, &bound, graphs, params.config())?;
    let m = tape.value(rel);
    let rel: Vec<GroundPoint> = (0..m.rows())
        .map(|j| GroundPoint::new(m[(j, 0)], m[(j, 1)]))
        .collect();
    Ok(TrajectoryPrediction::from_relative(origin, &rel))
}
