//! Optional TOML configuration shared by the stages. Every key has a
//! default; command-line flags override file values where both exist.

use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub signal: SignalSection,
    #[serde(default)]
    pub features: FeaturesSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub split: SplitSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub hampel_half_window: usize,
    pub hampel_n_sigmas: f64,
    pub difference_order: usize,
    pub envelope: f64,
    pub log10_lambda_min: f64,
    pub log10_lambda_max: f64,
}

impl Default for SignalSection {
    fn default() -> Self {
        let w = cropcast_core::signal::WhittakerConfig::default();
        SignalSection {
            hampel_half_window: cropcast_core::signal::DEFAULT_HAMPEL_HALF_WINDOW,
            hampel_n_sigmas: cropcast_core::signal::DEFAULT_HAMPEL_N_SIGMAS,
            difference_order: w.difference_order,
            envelope: w.envelope,
            log10_lambda_min: w.log10_lambda_min,
            log10_lambda_max: w.log10_lambda_max,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeaturesSection {
    pub radius_km: f64,
    pub threshold_fraction: f64,
}

impl Default for FeaturesSection {
    fn default() -> Self {
        FeaturesSection { radius_km: 10.0, threshold_fraction: 0.003 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub embed_dim: usize,
    pub rnn_dim: usize,
    pub rs_proj_dim: usize,
    pub att_dim: usize,
    pub stacked_lstm: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        // Desk-scale dimensions; the paper-scale winners (64/256/128/3) suit
        // datasets orders of magnitude larger.
        ModelSection { embed_dim: 12, rnn_dim: 24, rs_proj_dim: 24, att_dim: 12, stacked_lstm: 1 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub batch_size: usize,
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub augment: bool,
    pub seed: u64,
    pub clip_norm: Option<f64>,
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection {
            batch_size: 16,
            max_epochs: 20,
            learning_rate: 3e-3,
            augment: false,
            seed: 1,
            clip_norm: Some(5.0),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    /// "temporal" or "spatio-temporal".
    pub mode: String,
    pub spatial_holdout_fraction: f64,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection { mode: "temporal".into(), spatial_holdout_fraction: 0.10 }
    }
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<(Self, String)> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config {}", p.display()))?,
            None => String::new(),
        };
        let cfg: FileConfig = toml::from_str(&text).context("invalid config file")?;
        Ok((cfg, text))
    }

    pub fn split_policy(&self) -> anyhow::Result<cropcast_core::train::SplitPolicy> {
        let mode = match self.split.mode.as_str() {
            "temporal" => cropcast_core::train::SplitMode::Temporal,
            "spatio-temporal" => cropcast_core::train::SplitMode::SpatioTemporal,
            other => anyhow::bail!("unknown split mode {other:?}"),
        };
        Ok(cropcast_core::train::SplitPolicy {
            mode,
            spatial_holdout_fraction: self.split.spatial_holdout_fraction,
            val_season_idx: None,
            test_season_idx: None,
        })
    }

    pub fn prepare_options(&self) -> anyhow::Result<cropcast_core::pipeline::PrepareOptions> {
        let mut whittaker = cropcast_core::signal::WhittakerConfig::default();
        whittaker.difference_order = self.signal.difference_order;
        whittaker.envelope = self.signal.envelope;
        whittaker.log10_lambda_min = self.signal.log10_lambda_min;
        whittaker.log10_lambda_max = self.signal.log10_lambda_max;
        Ok(cropcast_core::pipeline::PrepareOptions {
            variables: Default::default(),
            whittaker,
            hampel_half_window: self.signal.hampel_half_window,
            hampel_n_sigmas: self.signal.hampel_n_sigmas,
            radius_km: self.features.radius_km,
            threshold_fraction: self.features.threshold_fraction,
            policy: self.split_policy()?,
        })
    }

    pub fn train_config(&self, seed_override: Option<u64>) -> cropcast_core::train::TrainConfig {
        cropcast_core::train::TrainConfig {
            batch_size: self.train.batch_size,
            max_epochs: self.train.max_epochs,
            learning_rate: self.train.learning_rate,
            augment: self.train.augment,
            seed: seed_override.unwrap_or(self.train.seed),
            select_best_val: true,
            clip_norm: self.train.clip_norm,
        }
    }

    pub fn model_spec(
        &self,
        variant: cropcast_core::model::Variant,
        vocab_size: usize,
    ) -> cropcast_core::model::ModelSpec {
        cropcast_core::model::ModelSpec {
            variant,
            vocab_size,
            num_classes: vocab_size,
            embed_dim: self.model.embed_dim,
            rnn_dim: self.model.rnn_dim,
            rs_proj_dim: self.model.rs_proj_dim,
            att_dim: self.model.att_dim,
            stacked_lstm: self.model.stacked_lstm,
            n_vars: 4,
            windows: cropcast_core::features::WINDOWS_PER_SEASON,
        }
    }
}
