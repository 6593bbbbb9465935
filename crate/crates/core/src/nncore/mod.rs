//! Dense reverse-mode differentiation, the optimizer and a gradient checker.

mod adam;
mod gradcheck;
mod matrix;
mod params;
mod tape;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use gradcheck::{grad_check, DEFAULT_EPS};
pub use matrix::Matrix;
pub use params::{NamedParam, ParamSet};
pub use tape::{sigmoid, DiffNode, Tape, Var};
