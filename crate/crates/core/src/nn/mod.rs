//! Dense feed-forward engine shared by both preference heads.
//!
//! The network family is fixed: fully-connected layers, ELU between hidden
//! layers, inverted dropout after each hidden activation (training only) and
//! `tanh` on the output. Everything is `f64`.

mod adam;
mod gradcheck;
mod mlp;

pub use adam::{AdamConfig, AdamState};
pub use gradcheck::{grad_check, relative_error, GradCheckReport, Objective};
pub use mlp::{
    Activation, Backward, DenseParams, ForwardCache, Mlp, MlpConfig, MlpParams, Mode,
};
