//! Convolutional Q-network with hand-written forward and backward passes,
//! Huber loss, Adam and finite-difference gradient checking. All math is in
//! f64; the matrix products go through a GEMM kernel on unrolled patches.

mod adam;
mod checkpoint;
mod gemm;
mod gradcheck;
mod loss;
mod net;
mod params;
mod spec;

use thiserror::Error;

pub use adam::Adam;
pub use checkpoint::{decode_params, encode_params, load_params, save_params, CHECKPOINT_VERSION};
pub use gradcheck::{gradcheck, GradcheckConfig, GradcheckReport, LayerCheck};
pub use loss::{huber, huber_loss, q_loss_and_grad, td_target, td_targets, LossEval};
pub use net::{backward, forward, q_values, Forward};
pub use params::{sync_target, ParameterSet};
pub use spec::{LayerLayout, NetworkSpec, DEFAULT_CONV_WIDTHS, DEFAULT_SLOPE, KERNEL};

#[derive(Debug, Error, PartialEq)]
pub enum NnError {
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}
