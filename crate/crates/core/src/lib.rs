//! Ego-vehicle trajectory prediction from bird's-eye-view scene graphs.
//!
//! The pipeline: synthetic BEV scene sequences ([`scenegen`]) become per-frame
//! KNN graphs with positional node codes ([`graph`]); a GCN embeds each frame
//! and an LSTM stack consumes the embedding sequence to predict the ego's
//! next positions ([`model`]). [`train`] holds the split/train/evaluate
//! harness, and [`nncore`] the differentiation substrate underneath.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod model;
pub mod nncore;
pub mod rng;
pub mod scenegen;
pub mod train;

pub use error::{Error, Result};
