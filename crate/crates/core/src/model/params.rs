use crate::error::Result;
use crate::graph::FeatureProjection;
use crate::nncore::{Matrix, ParamSet, Tape, Var};
use crate::rng::Rng;

use super::config::ModelConfig;

#[derive(Debug, Clone, Copy)]
struct LstmSlots {
    w_f: usize,
    w_i: usize,
    w_c: usize,
    w_o: usize,
    b_f: usize,
    b_i: usize,
    b_c: usize,
    b_o: usize,
}

/// Slot indices of every named array inside the [`ParamSet`].
#[derive(Debug, Clone)]
struct Layout {
    proj_w: usize,
    proj_b: usize,
    gcn: Vec<(usize, usize)>,
    lstm: Vec<LstmSlots>,
    head_w: usize,
    head_b: usize,
}

/// All trainable weights of the GNN-LSTM predictor.
#[derive(Debug, Clone)]
pub struct ModelParams {
    config: ModelConfig,
    set: ParamSet,
    layout: Layout,
}

/// Expected `(name, shape)` of every parameter, in storage order.
pub fn parameter_layout(cfg: &ModelConfig) -> Vec<(String, [usize; 2])> {
    let mut out = vec![
        (
            "projection.weight".to_string(),
            [cfg.feature_size, cfg.node_dim],
        ),
        ("projection.bias".to_string(), [1, cfg.node_dim]),
    ];
    for l in 0..cfg.gcn_layers {
        let (i, o) = cfg.gcn_dims(l);
        out.push((format!("gcn.{l}.weight"), [i, o]));
        out.push((format!("gcn.{l}.bias"), [1, o]));
    }
    for l in 0..cfg.lstm_layers {
        let h = cfg.lstm_hidden;
        let z = h + cfg.lstm_input(l);
        for gate in ["f", "i", "c", "o"] {
            out.push((format!("lstm.{l}.w_{gate}"), [h, z]));
        }
        for gate in ["f", "i", "c", "o"] {
            out.push((format!("lstm.{l}.b_{gate}"), [1, h]));
        }
    }
    out.push((
        "head.weight".to_string(),
        [cfg.lstm_hidden, 2 * cfg.horizon],
    ));
    out.push(("head.bias".to_string(), [1, 2 * cfg.horizon]));
    out
}

fn fan_in(name: &str, shape: [usize; 2], cfg: &ModelConfig) -> usize {
    if name.starts_with("lstm.") {
        // W: hidden × (hidden + input); biases share the gate's fan-in.
        let l: usize = name
            .split('.')
            .nth(1)
            .and_then(|s| s.parse().ok())
            .unwrap_or(0);
        cfg.lstm_hidden + cfg.lstm_input(l)
    } else if shape[0] == 1 && name.ends_with("bias") {
        match name {
            "projection.bias" => cfg.feature_size,
            "head.bias" => cfg.lstm_hidden,
            _ => {
                let l: usize = name
                    .split('.')
                    .nth(1)
                    .and_then(|s| s.parse().ok())
                    .unwrap_or(0);
                cfg.gcn_dims(l).0
            }
        }
    } else {
        shape[0]
    }
}

impl ModelParams {
    /// Uniform(−s, s) initialization with `s = 1/√fan_in`, drawn from `cfg.seed`.
    pub fn init(cfg: &ModelConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = Rng::with_stream(cfg.seed, 0x1417);
        let mut set = ParamSet::new();
        for (name, shape) in parameter_layout(cfg) {
            let s = 1.0 / (fan_in(&name, shape, cfg) as f64).sqrt();
            let data = (0..shape[0] * shape[1]).map(|_| rng.range(-s, s)).collect();
            set.push(name, Matrix::from_vec(shape[0], shape[1], data)?);
        }
        Self::from_set(*cfg, set)
    }

    /// Wraps loaded arrays after checking them against the config layout.
    pub fn from_set(config: ModelConfig, set: ParamSet) -> Result<Self> {
        config.validate()?;
        set.check_layout(&parameter_layout(&config))?;
        let idx = |name: &str| {
            set.entries()
                .iter()
                .position(|e| e.name == name)
                .expect("layout checked above")
        };
        let layout = Layout {
            proj_w: idx("projection.weight"),
            proj_b: idx("projection.bias"),
            gcn: (0..config.gcn_layers)
                .map(|l| {
                    (
                        idx(&format!("gcn.{l}.weight")),
                        idx(&format!("gcn.{l}.bias")),
                    )
                })
                .collect(),
            lstm: (0..config.lstm_layers)
                .map(|l| {
                    let s = |n: &str| idx(&format!("lstm.{l}.{n}"));
                    LstmSlots {
                        w_f: s("w_f"),
                        w_i: s("w_i"),
                        w_c: s("w_c"),
                        w_o: s("w_o"),
                        b_f: s("b_f"),
                        b_i: s("b_i"),
                        b_c: s("b_c"),
                        b_o: s("b_o"),
                    }
                })
                .collect(),
            head_w: idx("head.weight"),
            head_b: idx("head.bias"),
        };
        Ok(Self {
            config,
            set,
            layout,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn set(&self) -> &ParamSet {
        &self.set
    }

    pub fn set_mut(&mut self) -> &mut ParamSet {
        &mut self.set
    }

    pub fn scalar_count(&self) -> usize {
        self.set.scalar_count()
    }

    pub fn projection(&self) -> FeatureProjection {
        FeatureProjection {
            weight: self.set.value(self.layout.proj_w).clone(),
            bias: self.set.value(self.layout.proj_b).clone(),
        }
    }

    /// Overwrites a named parameter (handy for hand-built test instances).
    pub fn set_named(&mut self, name: &str, value: Matrix) -> Result<()> {
        let i = self
            .set
            .entries()
            .iter()
            .position(|e| e.name == name)
            .ok_or_else(|| crate::Error::Config(format!("no parameter `{name}`")))?;
        if self.set.value(i).shape() != value.shape() {
            return Err(crate::Error::shape(
                "set_named",
                self.set.value(i).shape(),
                value.shape(),
            ));
        }
        *self.set.value_mut(i) = value;
        Ok(())
    }

    /// Records every parameter on `tape` and returns typed handles.
    pub fn bind(&self, tape: &mut Tape) -> Result<BoundParams> {
        let vars = self.set.bind(tape);
        self.bind_vars(tape, vars)
    }

    /// Typed handles over externally created leaves (one per slot, in order).
    pub fn bind_vars(&self, tape: &mut Tape, vars: Vec<Var>) -> Result<BoundParams> {
        let l = &self.layout;
        let gcn = l
            .gcn
            .iter()
            .map(|&(w, b)| GcnLayerVars {
                weight: vars[w],
                bias: vars[b],
            })
            .collect();
        let mut lstm = Vec::with_capacity(l.lstm.len());
        for s in &l.lstm {
            lstm.push(LstmLayerVars::new(
                tape,
                [vars[s.w_f], vars[s.w_i], vars[s.w_c], vars[s.w_o]],
                [vars[s.b_f], vars[s.b_i], vars[s.b_c], vars[s.b_o]],
            )?);
        }
        Ok(BoundParams {
            proj_w: vars[l.proj_w],
            proj_b: vars[l.proj_b],
            gcn,
            lstm,
            head_w: vars[l.head_w],
            head_b: vars[l.head_b],
            leaves: vars,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GcnLayerVars {
    /// `D_in × D_out`
    pub weight: Var,
    /// `1 × D_out`
    pub bias: Var,
}

/// Gate weights in `hidden × (hidden + input)` form plus their transposes.
#[derive(Debug, Clone, Copy)]
pub struct LstmLayerVars {
    pub w_f: Var,
    pub w_i: Var,
    pub w_c: Var,
    pub w_o: Var,
    pub b_f: Var,
    pub b_i: Var,
    pub b_c: Var,
    pub b_o: Var,
    w_f_t: Var,
    w_i_t: Var,
    w_c_t: Var,
    w_o_t: Var,
}

impl LstmLayerVars {
    pub fn new(tape: &mut Tape, w: [Var; 4], b: [Var; 4]) -> Result<Self> {
        Ok(Self {
            w_f: w[0],
            w_i: w[1],
            w_c: w[2],
            w_o: w[3],
            b_f: b[0],
            b_i: b[1],
            b_c: b[2],
            b_o: b[3],
            w_f_t: tape.transpose(w[0])?,
            w_i_t: tape.transpose(w[1])?,
            w_c_t: tape.transpose(w[2])?,
            w_o_t: tape.transpose(w[3])?,
        })
    }

    pub(crate) fn transposed(&self) -> [Var; 4] {
        [self.w_f_t, self.w_i_t, self.w_c_t, self.w_o_t]
    }
}

#[derive(Debug, Clone)]
pub struct BoundParams {
    pub proj_w: Var,
    pub proj_b: Var,
    pub gcn: Vec<GcnLayerVars>,
    pub lstm: Vec<LstmLayerVars>,
    pub head_w: Var,
    pub head_b: Var,
    /// One leaf per [`ParamSet`] slot, in slot order.
    pub leaves: Vec<Var>,
}
