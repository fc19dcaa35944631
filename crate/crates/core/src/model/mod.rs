//! The eight classifier variants.
//!
//! All variants share the same building blocks: a crop embedding, an
//! intra-season biLSTM+attention encoder, a projection of the remote-sensing
//! representation, a stacked LSTM over seasons, an optional crop-distribution
//! fusion head, and a linear classifier. Which blocks exist is fixed by the
//! variant's modality row; see [`Variant`] for the exact matrix.

mod network;
mod sample;
mod spec;

pub use network::{bag_of_crops, ForwardCache, Network};
pub use sample::{FeatureStore, SeasonInput, SequenceSample, Stores};
pub use spec::{ModelSpec, Variant};

use thiserror::Error;

use crate::kernels::KernelError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("variant {variant} requires modality {modality}")]
    MissingModality { variant: String, modality: String },
    #[error("unknown variant {0:?}; valid: IntraYE_RS, IntraYE_MM, InterYE_Crop, InterYE_RS, InterYE_MM, HierE_RS, HierE_MM, HierE_final")]
    UnknownVariant(String),
    #[error("sample has no seasons")]
    EmptySample,
    #[error("sample has no supervised step")]
    NoTargets,
    #[error("cutoff {got} outside 1..={max} windows")]
    BadCutoff { got: usize, max: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
