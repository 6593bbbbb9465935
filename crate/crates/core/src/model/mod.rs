//! The GNN-LSTM trajectory predictor.
//!
//! Per frame: linear projection of raw object features plus positional
//! codes, a stack of weighted GCN layers and a mean readout. The frame
//! embeddings feed a stack of LSTM layers; the last hidden state goes
//! through a linear head that emits `H` displacement steps, accumulated
//! from the ego position at the last observed frame.

mod checkpoint;
mod config;
mod forward;
mod layers;
mod params;

pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use config::{count_parameters, ModelConfig};
pub use forward::{embed_frame, forward, predict_relative, TrajectoryPrediction};
pub use layers::{gcn_layer_forward, graph_readout, lstm_cell_step, LstmStep};
pub use params::{parameter_layout, BoundParams, GcnLayerVars, LstmLayerVars, ModelParams};
