//! Synthetic multi-country datasets with known ground truth.
//!
//! Every pipeline property is testable because the generator records what it
//! did: true transition matrices, injected outlier positions, each crop's
//! phenology timing, and each parcel's region. Presets:
//!
//! - `tiny`: minutes-scale smoke dataset (60 parcels, 4 seasons).
//! - `nl-analog`: ~5k parcels, 5 seasons, 141 crop codes, three spatial
//!   regions. Two crop pairs share identical phenology; one pair is
//!   resolvable from rotation history, the other only from the local crop
//!   distribution, so each added modality carries signal.
//! - `fr-analog`: ~6k parcels, 151 codes, 67 shared with nl-analog
//!   (union 225), for transfer experiments.
//! - `late-analog`: three high-mass pairs diverge only near senescence
//!   (after window 18), for early-season augmentation experiments.

mod dataset;
mod observe;
mod phenology;
mod presets;
mod rotate;

pub use dataset::{gen_dataset, GroundTruth, SpikeRecord, SynthDataset};
pub use observe::gen_observations;
pub use phenology::{CutEvent, CutRegime, PhenologyParams};
pub use presets::{preset, preset_names};
pub use rotate::gen_rotations;

use serde::{Deserialize, Serialize};

use crate::taxonomy::CropCode;

/// Per-variable Gaussian noise levels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseLevels {
    pub lai: f64,
    pub fapar: f64,
    pub red: f64,
    pub nir: f64,
}

impl Default for NoiseLevels {
    fn default() -> Self {
        // Red/NIR noise dominates their within-window phenology trend, so a
        // k-sigma outlier really is k times the local scale the Hampel
        // window estimates.
        NoiseLevels { lai: 0.25, fapar: 0.03, red: 0.08, nir: 0.06 }
    }
}

/// One crop's definition inside a scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CropDef {
    pub code: CropCode,
    pub name: String,
    pub phenology: PhenologyParams,
    pub permanent: bool,
    /// Twin crop whose curve this one shadows until `divergence_day`.
    pub paired_with: Option<CropCode>,
    pub divergence_day: Option<f64>,
    /// Mowing regime; cut positions are drawn per parcel-season.
    pub cuts: Option<CutRegime>,
}

/// Markov transition structure over the scenario's crop list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionMatrix {
    /// rows[from][to], each row summing to 1.
    pub rows: Vec<Vec<f64>>,
    pub initial: Vec<f64>,
}

impl TransitionMatrix {
    pub fn validate(&self) -> bool {
        let n = self.initial.len();
        self.rows.len() == n
            && self
                .rows
                .iter()
                .chain(std::iter::once(&self.initial))
                .all(|r| r.len() == n && (r.iter().sum::<f64>() - 1.0).abs() < 1e-9)
    }
}

/// A spatial cluster of parcels with its own rotation dynamics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionConfig {
    pub center_x_km: f64,
    pub center_y_km: f64,
    pub spread_km: f64,
    pub weight: f64,
    pub transitions: TransitionMatrix,
}

/// Full description of one synthetic dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub country: String,
    pub n_fois: usize,
    pub n_seasons: usize,
    pub first_season: u32,
    pub crops: Vec<CropDef>,
    pub regions: Vec<RegionConfig>,
    /// Observation interval bounds in days.
    pub cadence_min_days: i64,
    pub cadence_max_days: i64,
    /// Probability that an observation carries an injected outlier.
    pub contamination: f64,
    /// Probability that an observation is already flagged invalid upstream.
    pub qa_invalid_rate: f64,
    pub noise: NoiseLevels,
    /// Outlier magnitude in units of each variable's noise sigma.
    pub spike_sigmas: f64,
    /// Per-parcel-season shift of the phenology timing, uniform in
    /// [-jitter, +jitter] days.
    pub phenology_jitter_days: f64,
    pub area_ha_min: f64,
    pub area_ha_max: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn seasons(&self) -> Vec<u32> {
        (0..self.n_seasons as u32).map(|s| self.first_season + s).collect()
    }

    pub fn crop_index(&self, code: &CropCode) -> Option<usize> {
        self.crops.iter().position(|c| c.code == *code)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.crops.is_empty() || self.regions.is_empty() {
            return Err("scenario needs crops and regions".into());
        }
        for (r, region) in self.regions.iter().enumerate() {
            if !region.transitions.validate() {
                return Err(format!("region {r} transition rows must sum to 1"));
            }
            if region.transitions.initial.len() != self.crops.len() {
                return Err(format!("region {r} matrix size mismatch"));
            }
        }
        for c in &self.crops {
            if !c.phenology.in_physical_range() {
                return Err(format!("crop {} phenology outside physical range", c.code));
            }
        }
        Ok(())
    }
}
