//! Dense math substrate for the model variants.
//!
//! Everything is `f64`, row-major, single-threaded, and hand-differentiated:
//! each forward pass returns a cache holding exactly what its backward pass
//! needs. No autodiff graph - the model assembles these pieces explicitly.

mod adam;
mod bilstm;
pub mod gradcheck;
mod layers;
mod lstm;
mod params;
mod tensor;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use bilstm::{BiLstmAttention, BiLstmCache};
pub use layers::{
    concat, cross_entropy, embed_grad_acc, embed_lookup, linear_backward, linear_forward, relu,
    relu_backward, sigmoid, sigmoid_backward_from_output, softmax, tanh_backward_from_output,
    tanh_vec,
};
pub use lstm::{
    lstm_cell_backward, lstm_cell_forward, LstmCellIds, LstmStepCache, StackedLstm,
    StackedLstmCache,
};
pub use params::{Gradients, ParamId, ParamSet, CHECKPOINT_VERSION};
pub use tensor::Tensor2;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },
    #[error("non-finite activation in {0}")]
    NonFinite(&'static str),
    #[error("checkpoint i/o: {0}")]
    CheckpointIo(#[from] std::io::Error),
    #[error("checkpoint format: {0}")]
    CheckpointFormat(String),
}
