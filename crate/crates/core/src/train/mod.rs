//! Training loop, splits, early-season augmentation, and transfer.

mod augment;
mod config;
mod fit;
mod split;
mod transfer;

pub use augment::{early_season_crop, MiniBatch, MAX_CUTOFF, MIN_CUTOFF};
pub use config::TrainConfig;
pub use fit::{accuracy, predict_codes, train_model, train_with_initial, HistoryRow, TrainOutcome};
pub use split::{make_splits, SplitIndices, SplitMode, SplitPolicy};
pub use transfer::{few_shot_subsets, pretrain_finetune, FewShotPlan};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("need at least 3 seasons for train/validation/test, got {0}")]
    TooFewSeasons(usize),
    #[error("training diverged: non-finite loss at epoch {epoch}, batch {batch}")]
    Diverged { epoch: usize, batch: usize },
    #[error("vocabulary mismatch: source has {source_classes} classes, target {target_classes}")]
    VocabMismatch { source_classes: usize, target_classes: usize },
    #[error("no training samples")]
    NoSamples,
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}
