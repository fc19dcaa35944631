//! Mini-batch training with Adam, validation-based model selection, and
//! prediction helpers.

use rand::seq::SliceRandom;

use super::augment::{early_season_crop, MiniBatch};
use super::config::TrainConfig;
use super::TrainError;
use crate::kernels::{adam_step, AdamConfig, AdamState, ParamSet};
use crate::model::{ModelSpec, Network, SequenceSample, Stores};
use crate::pipeline::Prepared;
use crate::rng::substream;
use crate::taxonomy::CropCode;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct HistoryRow {
    pub epoch: usize,
    pub split: String,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub spec: ModelSpec,
    /// Parameters of the best validation epoch (or the final epoch when
    /// selection is disabled; initialization when max_epochs = 0).
    pub best: ParamSet,
    pub final_params: ParamSet,
    pub history: Vec<HistoryRow>,
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
}

impl TrainOutcome {
    pub fn network(&self) -> Network {
        Network::with_params(self.spec.clone(), self.best.clone())
    }
}

fn clip_gradients(grads: &mut crate::kernels::Gradients, params: &ParamSet, max_norm: f64) {
    let mut sq = 0.0;
    for id in params.ids() {
        sq += grads.arr(id).data.iter().map(|g| g * g).sum::<f64>();
    }
    let norm = sq.sqrt();
    if norm > max_norm {
        grads.scale(max_norm / norm);
    }
}

pub fn accuracy(predictions: &[usize], truths: &[usize]) -> f64 {
    if truths.is_empty() {
        return 0.0;
    }
    let correct = predictions.iter().zip(truths).filter(|(a, b)| a == b).count();
    correct as f64 / truths.len() as f64
}

fn predict_classes(
    net: &Network,
    samples: &[SequenceSample],
    stores: &Stores,
    cutoff: usize,
) -> Result<Vec<usize>, TrainError> {
    samples
        .iter()
        .map(|s| net.predict_class(s, stores, cutoff).map_err(TrainError::from))
        .collect()
}

/// Predictions as crop codes, for the metric layers.
pub fn predict_codes(
    net: &Network,
    prepared: &Prepared,
    samples: &[SequenceSample],
    cutoff: usize,
) -> Result<Vec<CropCode>, TrainError> {
    let classes = predict_classes(net, samples, &prepared.stores(), cutoff)?;
    Ok(classes.into_iter().map(|c| prepared.class_code(c)).collect())
}

/// Trains a fresh network of `spec` on the prepared dataset's training
/// split. Deterministic for a fixed seed: one thread, seeded shuffling and
/// augmentation streams, fixed parameter registration order.
pub fn train_model(
    prepared: &Prepared,
    spec: ModelSpec,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    let samples = prepared.train_samples(spec.variant.between_seasons());
    let net = Network::new(spec, cfg.seed);
    train_network(prepared, net, &samples, cfg)
}

/// Continues training from existing parameters on the given samples
/// (fine-tuning path). No layers are frozen.
pub fn train_with_initial(
    prepared: &Prepared,
    spec: ModelSpec,
    initial: ParamSet,
    samples: &[SequenceSample],
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    let net = Network::with_params(spec, initial);
    train_network(prepared, net, &samples.to_vec(), cfg)
}

fn train_network(
    prepared: &Prepared,
    mut net: Network,
    samples: &[SequenceSample],
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    if samples.is_empty() {
        return Err(TrainError::NoSamples);
    }
    let windows = net.spec.windows;
    let (val_samples, val_truths) = prepared.val_samples();
    let mut grads = net.params.new_gradients();
    let mut adam = AdamState::new(&net.params);
    let adam_cfg = AdamConfig { lr: cfg.learning_rate, ..AdamConfig::default() };

    let mut history = Vec::new();
    let mut best = net.params.clone();
    let mut best_epoch = 0usize;
    let mut best_acc = f64::NEG_INFINITY;

    for epoch in 1..=cfg.max_epochs {
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.shuffle(&mut substream(cfg.seed, "shuffle", epoch as u64));
        let mut aug_rng = substream(cfg.seed, "augment", epoch as u64);

        let mut epoch_loss = 0.0;
        let mut epoch_targets = 0usize;
        for (batch_no, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let mut batch = MiniBatch::full(chunk.to_vec(), windows);
            if cfg.augment {
                early_season_crop(&mut batch, windows, &mut aug_rng);
            }
            let n_targets: usize =
                batch.indices.iter().map(|&i| samples[i].targets.len()).sum();
            let scale = 1.0 / n_targets.max(1) as f64;
            grads.zero();
            let mut batch_loss = 0.0;
            for &i in &batch.indices {
                let (loss, _) = net.train_step(
                    &samples[i],
                    &prepared.stores(),
                    batch.cutoff,
                    &mut grads,
                    scale,
                )?;
                batch_loss += loss;
            }
            if !batch_loss.is_finite() {
                return Err(TrainError::Diverged { epoch, batch: batch_no });
            }
            if let Some(max_norm) = cfg.clip_norm {
                clip_gradients(&mut grads, &net.params, max_norm);
            }
            adam_step(&mut net.params, &grads, &mut adam, &adam_cfg);
            epoch_loss += batch_loss;
            epoch_targets += n_targets;
        }

        let mean_loss = epoch_loss / epoch_targets.max(1) as f64;
        history.push(HistoryRow {
            epoch,
            split: "train".into(),
            metric: "loss".into(),
            value: mean_loss,
        });

        let val_preds = predict_classes(&net, &val_samples, &prepared.stores(), windows)?;
        let val_acc = accuracy(&val_preds, &val_truths);
        history.push(HistoryRow {
            epoch,
            split: "val".into(),
            metric: "accuracy".into(),
            value: val_acc,
        });
        if !cfg.select_best_val || val_acc > best_acc {
            best_acc = val_acc;
            best_epoch = epoch;
            best = net.params.clone();
        }
    }

    if cfg.max_epochs == 0 {
        best_acc = 0.0;
    }
    Ok(TrainOutcome {
        spec: net.spec.clone(),
        best,
        final_params: net.params,
        history,
        best_epoch,
        best_val_accuracy: best_acc.max(0.0),
    })
}
