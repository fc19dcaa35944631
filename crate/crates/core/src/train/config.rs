//! Training hyperparameters.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    pub learning_rate: f64,
    /// Random end-of-sequence cropping of the RS windows per mini-batch.
    pub augment: bool,
    pub seed: u64,
    /// Keep the epoch with the best validation accuracy (no early stopping;
    /// training always runs the full budget).
    pub select_best_val: bool,
    /// Global L2 gradient-norm clip; recurrent stacks spike otherwise.
    pub clip_norm: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 256,
            max_epochs: 25,
            learning_rate: 1e-3,
            augment: false,
            seed: 1,
            select_best_val: true,
            clip_norm: Some(5.0),
        }
    }
}
