//! Full dataset assembly with a ground-truth sidecar.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::observe::{gen_observations, Spike};
use super::rotate::gen_rotations;
use super::{ScenarioConfig, TransitionMatrix};
use crate::ingest::ParcelRecord;
use crate::rng::substream;
use crate::taxonomy::{CropCode, TaxonomyTree};

/// Injected outlier positions for one parcel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpikeRecord {
    pub foi_id: String,
    pub spikes: Vec<Spike>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CropTruth {
    pub code: CropCode,
    pub green_up_day: f64,
    pub senescence_day: f64,
    pub paired_with: Option<CropCode>,
    /// Day from which paired curves become distinguishable.
    pub divergence_day: Option<f64>,
}

/// What the generator knows and the pipeline is not told.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    pub region_of_foi: Vec<usize>,
    pub spikes: Vec<SpikeRecord>,
    pub crops: Vec<CropTruth>,
    pub transition_matrices: Vec<TransitionMatrix>,
    pub crop_codes: Vec<CropCode>,
}

pub struct SynthDataset {
    pub records: Vec<ParcelRecord>,
    pub taxonomy: TaxonomyTree,
    pub truth: GroundTruth,
    pub config: ScenarioConfig,
}

/// Human names for the internal taxonomy levels the presets use.
fn family_names() -> Vec<(&'static str, &'static str, bool)> {
    vec![
        ("33-00-00-00-00", "arable crops", false),
        ("33-01-00-00-00", "cereals", false),
        ("33-01-01-00-00", "wheat", false),
        ("33-01-02-00-00", "barley", false),
        ("33-02-00-00-00", "root crops", false),
        ("33-03-00-00-00", "maize", false),
        ("33-04-00-00-00", "vegetables", false),
        ("33-06-00-00-00", "oilseeds", false),
        ("33-07-00-00-00", "legumes", false),
        ("33-08-00-00-00", "fallow land", false),
        ("34-00-00-00-00", "permanent crops", true),
        ("35-00-00-00-00", "grassland", false),
    ]
}

/// Generates parcels, observation series, the taxonomy, and the sidecar.
/// Deterministic: the same config (seed included) yields identical output.
pub fn gen_dataset(config: &ScenarioConfig) -> SynthDataset {
    config.validate().expect("invalid scenario config");
    let rotations = gen_rotations(config);
    let seasons = config.seasons();
    let country = config.country.to_lowercase();

    let mut records = Vec::with_capacity(config.n_fois);
    let mut spikes = Vec::new();
    let mut region_of_foi = Vec::with_capacity(config.n_fois);

    for (foi, rotation) in rotations.iter().enumerate() {
        let mut site_rng = substream(config.seed, "site", foi as u64);
        let region = &config.regions[rotation.region];
        let x = region.center_x_km + gaussian(&mut site_rng) * region.spread_km;
        let y = region.center_y_km + gaussian(&mut site_rng) * region.spread_km;
        let area = site_rng.gen_range(config.area_ha_min..config.area_ha_max);

        let crop_defs: Vec<&super::CropDef> =
            rotation.crops.iter().map(|&c| &config.crops[c]).collect();
        let mut obs_rng = substream(config.seed, "obs", foi as u64);
        let out = gen_observations(config, &crop_defs, &mut obs_rng);

        let foi_id = format!("{country}{foi:06}");
        let crops: BTreeMap<u32, CropCode> = seasons
            .iter()
            .zip(&rotation.crops)
            .map(|(&s, &c)| (s, config.crops[c].code))
            .collect();
        let series = out
            .series
            .into_iter()
            .map(|s| (s.variable.clone(), s))
            .collect();
        spikes.push(SpikeRecord { foi_id: foi_id.clone(), spikes: out.spikes });
        region_of_foi.push(rotation.region);
        records.push(ParcelRecord {
            foi_id,
            x_km: x,
            y_km: y,
            area_ha: area,
            crops,
            series,
            missing_rs_seasons: BTreeSet::new(),
        });
    }

    let mut taxonomy = TaxonomyTree::new();
    for (code_text, name, permanent) in family_names() {
        taxonomy.insert(CropCode::parse(code_text).unwrap(), name, permanent);
    }
    for crop in &config.crops {
        taxonomy.insert(crop.code, &crop.name, crop.permanent);
    }

    let truth = GroundTruth {
        region_of_foi,
        spikes,
        crops: config
            .crops
            .iter()
            .map(|c| CropTruth {
                code: c.code,
                green_up_day: c.phenology.green_up_day,
                senescence_day: c.phenology.senescence_day,
                paired_with: c.paired_with,
                divergence_day: c.divergence_day,
            })
            .collect(),
        transition_matrices: config.regions.iter().map(|r| r.transitions.clone()).collect(),
        crop_codes: config.crops.iter().map(|c| c.code).collect(),
    };

    SynthDataset { records, taxonomy, truth, config: config.clone() }
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::preset;

    #[test]
    fn generation_is_deterministic() {
        let cfg = preset("tiny").unwrap();
        let a = gen_dataset(&cfg);
        let b = gen_dataset(&cfg);
        assert_eq!(a.records.len(), b.records.len());
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.foi_id, y.foi_id);
            assert_eq!(x.x_km, y.x_km);
            assert_eq!(x.crops, y.crops);
            for (var, s) in &x.series {
                assert_eq!(s.values, y.series[var].values);
            }
        }
    }

    #[test]
    fn every_parcel_has_full_crop_sequence_and_four_variables() {
        let cfg = preset("tiny").unwrap();
        let ds = gen_dataset(&cfg);
        assert_eq!(ds.records.len(), cfg.n_fois);
        for rec in &ds.records {
            assert_eq!(rec.crops.len(), cfg.n_seasons);
            assert_eq!(rec.series.len(), 4);
        }
        assert_eq!(ds.truth.region_of_foi.len(), cfg.n_fois);
        assert_eq!(ds.truth.spikes.len(), cfg.n_fois);
    }

    #[test]
    fn taxonomy_covers_all_config_crops_with_permanent_flags() {
        let cfg = preset("tiny").unwrap();
        let ds = gen_dataset(&cfg);
        for crop in &cfg.crops {
            let node = ds.taxonomy.node(&crop.code).expect("crop in taxonomy");
            assert_eq!(node.name, crop.name);
        }
        let orchard = cfg.crops.iter().find(|c| c.permanent).unwrap();
        assert!(
            ds.taxonomy.under_permanent(&orchard.code).is_some(),
            "permanent crop must sit under a flagged subtree"
        );
    }

    #[test]
    fn regions_shape_the_spatial_layout() {
        let mut cfg = preset("nl-analog").unwrap();
        cfg.n_fois = 300;
        let ds = gen_dataset(&cfg);
        for (rec, &region) in ds.records.iter().zip(&ds.truth.region_of_foi) {
            let r = &cfg.regions[region];
            let dist = ((rec.x_km - r.center_x_km).powi(2) + (rec.y_km - r.center_y_km).powi(2)).sqrt();
            assert!(dist < 6.0 * r.spread_km, "parcel {} strays {dist} km", rec.foi_id);
        }
    }
}
