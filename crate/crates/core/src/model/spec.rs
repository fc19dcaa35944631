//! Variant matrix and hyperparameters.

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::features::{FUNCTIONALS_PER_WINDOW, WINDOWS_PER_SEASON};

/// The eight architectures. The modality columns (crop rotation, remote
/// sensing, crop distribution) and modeling levels are fixed per variant:
///
/// | variant      | CR | RS | CD | within season | between seasons |
/// |--------------|----|----|----|---------------|-----------------|
/// | IntraYE_RS   |    | x  |    | x             |                 |
/// | IntraYE_MM   | x  | x  |    | x             |                 |
/// | InterYE_Crop | x  |    |    |               | x               |
/// | InterYE_RS   |    | x  |    |               | x               |
/// | InterYE_MM   | x  | x  |    |               | x               |
/// | HierE_RS     |    | x  |    | x             | x               |
/// | HierE_MM     | x  | x  |    | x             | x               |
/// | HierE_final  | x  | x  | x  | x             | x               |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    IntraYeRs,
    IntraYeMm,
    InterYeCrop,
    InterYeRs,
    InterYeMm,
    HierERs,
    HierEMm,
    HierEFinal,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::IntraYeRs,
        Variant::IntraYeMm,
        Variant::InterYeCrop,
        Variant::InterYeRs,
        Variant::InterYeMm,
        Variant::HierERs,
        Variant::HierEMm,
        Variant::HierEFinal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::IntraYeRs => "IntraYE_RS",
            Variant::IntraYeMm => "IntraYE_MM",
            Variant::InterYeCrop => "InterYE_Crop",
            Variant::InterYeRs => "InterYE_RS",
            Variant::InterYeMm => "InterYE_MM",
            Variant::HierERs => "HierE_RS",
            Variant::HierEMm => "HierE_MM",
            Variant::HierEFinal => "HierE_final",
        }
    }

    pub fn parse(s: &str) -> Result<Variant, ModelError> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| ModelError::UnknownVariant(s.to_string()))
    }

    pub fn uses_crop_rotation(&self) -> bool {
        matches!(
            self,
            Variant::IntraYeMm
                | Variant::InterYeCrop
                | Variant::InterYeMm
                | Variant::HierEMm
                | Variant::HierEFinal
        )
    }

    pub fn uses_remote_sensing(&self) -> bool {
        !matches!(self, Variant::InterYeCrop)
    }

    pub fn uses_crop_distribution(&self) -> bool {
        matches!(self, Variant::HierEFinal)
    }

    /// Season-level sequential encoding of the RS windows.
    pub fn within_season(&self) -> bool {
        matches!(
            self,
            Variant::IntraYeRs
                | Variant::IntraYeMm
                | Variant::HierERs
                | Variant::HierEMm
                | Variant::HierEFinal
        )
    }

    /// Recurrence over the season sequence.
    pub fn between_seasons(&self) -> bool {
        !matches!(self, Variant::IntraYeRs | Variant::IntraYeMm)
    }

    pub fn hierarchical(&self) -> bool {
        self.within_season() && self.between_seasons()
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Declarative description of one architecture instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: Variant,
    /// One-hot width of the crop vocabulary (unknown slot included).
    pub vocab_size: usize,
    /// Output classes; normally equal to `vocab_size`.
    pub num_classes: usize,
    pub embed_dim: usize,
    /// Hidden width of both recurrent encoders.
    pub rnn_dim: usize,
    /// Output width of the RS projection layer.
    pub rs_proj_dim: usize,
    /// Hidden width of the attention scorer.
    pub att_dim: usize,
    /// Depth of the between-seasons LSTM stack.
    pub stacked_lstm: usize,
    pub n_vars: usize,
    pub windows: usize,
}

impl ModelSpec {
    /// Paper-scale defaults: embedding 64, recurrent width 256, RS
    /// projection 128, three stacked LSTM layers.
    pub fn new(variant: Variant, vocab_size: usize, num_classes: usize) -> Self {
        ModelSpec {
            variant,
            vocab_size,
            num_classes,
            embed_dim: 64,
            rnn_dim: 256,
            rs_proj_dim: 128,
            att_dim: 64,
            stacked_lstm: 3,
            n_vars: 4,
            windows: WINDOWS_PER_SEASON,
        }
    }

    /// Small dimensions for synthetic-data experiments and tests.
    pub fn desk_scale(variant: Variant, vocab_size: usize, num_classes: usize) -> Self {
        ModelSpec {
            embed_dim: 12,
            rnn_dim: 16,
            rs_proj_dim: 16,
            att_dim: 8,
            stacked_lstm: 2,
            ..ModelSpec::new(variant, vocab_size, num_classes)
        }
    }

    /// Feature width of one window across variables.
    pub fn rs_window_dim(&self) -> usize {
        self.n_vars * FUNCTIONALS_PER_WINDOW
    }

    /// Width of the season-level concatenated feature vector.
    pub fn rs_concat_dim(&self) -> usize {
        self.n_vars * self.windows * FUNCTIONALS_PER_WINDOW
    }
}
