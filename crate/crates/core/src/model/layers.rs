use crate::error::Result;
use crate::nncore::{Tape, Var};

use super::params::{GcnLayerVars, LstmLayerVars};

/// One graph convolution: `Â · H · W + b`, followed by relu when `activate`.
///
/// `Â` aggregates each node with its weighted neighbours; the affine map
/// and activation update the aggregated state.
pub fn gcn_layer_forward(
    tape: &mut Tape,
    adjacency: Var,
    input: Var,
    layer: &GcnLayerVars,
    activate: bool,
) -> Result<Var> {
    let hw = tape.matmul(input, layer.weight)?;
    let agg = tape.matmul(adjacency, hw)?;
    let out = tape.add(agg, layer.bias)?;
    if activate {
        tape.relu(out)
    } else {
        Ok(out)
    }
}

/// Graph embedding: column-wise mean of the node states.
pub fn graph_readout(tape: &mut Tape, node_states: Var) -> Result<Var> {
    tape.mean_rows(node_states)
}

/// Every intermediate of one LSTM update.
#[derive(Debug, Clone, Copy)]
pub struct LstmStep {
    pub forget: Var,
    pub input: Var,
    pub candidate: Var,
    pub cell: Var,
    pub output: Var,
    pub hidden: Var,
}

/// One LSTM update on row vectors.
///
/// ```text
/// z  = [h_prev, x]
/// f  = σ(W_f z + b_f)      i = σ(W_i z + b_i)
/// C̃  = tanh(W_C z + b_C)   o = σ(W_o z + b_o)
/// c  = f ∗ c_prev + i ∗ C̃
/// h  = o ∗ tanh(c)
/// ```
pub fn lstm_cell_step(
    tape: &mut Tape,
    x: Var,
    h_prev: Var,
    c_prev: Var,
    p: &LstmLayerVars,
) -> Result<LstmStep> {
    let z = tape.concat(h_prev, x)?;
    let [wf, wi, wc, wo] = p.transposed();

    let zf = tape.matmul(z, wf)?;
    let zf = tape.add(zf, p.b_f)?;
    let forget = tape.sigmoid(zf)?;

    let zi = tape.matmul(z, wi)?;
    let zi = tape.add(zi, p.b_i)?;
    let input = tape.sigmoid(zi)?;

    let zc = tape.matmul(z, wc)?;
    let zc = tape.add(zc, p.b_c)?;
    let candidate = tape.tanh(zc)?;

    let kept = tape.mul(forget, c_prev)?;
    let written = tape.mul(input, candidate)?;
    let cell = tape.add(kept, written)?;

    let zo = tape.matmul(z, wo)?;
    let zo = tape.add(zo, p.b_o)?;
    let output = tape.sigmoid(zo)?;

    let squashed = tape.tanh(cell)?;
    let hidden = tape.mul(output, squashed)?;

    Ok(LstmStep {
        forget,
        input,
        candidate,
        cell,
        output,
        hidden,
    })
}
