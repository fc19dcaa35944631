//! Irregular observation sampling with noise, upstream QA gaps, and
//! cloud-signature outliers (red up, NIR down, biophysical variables down).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::phenology::{variables_from_greenness, VARIABLE_RANGES};
use super::{CropDef, ScenarioConfig};
use crate::signal::{ObservationSeries, VariableId};
use crate::SEASON_DAYS;

/// Ground-truth record of one injected outlier.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Spike {
    pub obs_index: usize,
    pub day: i64,
}

pub struct ObservationOutput {
    /// Series ordered LAI, FAPAR, RED, NIR on the shared timeline.
    pub series: [ObservationSeries; 4],
    pub spikes: Vec<Spike>,
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; two uniforms per draw keeps the stream simple.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Samples the concatenated multi-season timeline for one parcel. Day 0 is
/// Oct 1 of the first season; the crop changes at each season boundary.
/// All four variables share observation dates, as satellite acquisitions do.
pub fn gen_observations(
    config: &ScenarioConfig,
    crop_seq: &[&CropDef],
    rng: &mut ChaCha8Rng,
) -> ObservationOutput {
    let span = crop_seq.len() as i64 * SEASON_DAYS;
    // Per-season timing shift and cut positions, drawn first so the
    // observation stream is unaffected by these settings.
    let jitter: Vec<f64> = (0..crop_seq.len())
        .map(|_| {
            if config.phenology_jitter_days > 0.0 {
                rng.gen_range(-config.phenology_jitter_days..=config.phenology_jitter_days)
            } else {
                0.0
            }
        })
        .collect();
    let cut_events: Vec<Vec<crate::synth::phenology::CutEvent>> = crop_seq
        .iter()
        .map(|crop| crop.cuts.as_ref().map(|r| r.draw(rng)).unwrap_or_default())
        .collect();
    let mut days = Vec::new();
    let mut day = rng.gen_range(0..=3);
    while day < span {
        days.push(day);
        day += rng.gen_range(config.cadence_min_days..=config.cadence_max_days);
    }

    let n = days.len();
    let sigmas = [config.noise.lai, config.noise.fapar, config.noise.red, config.noise.nir];
    // Cloud signature per variable, in noise-sigma units.
    let spike_dir = [-1.0, -1.0, 1.0, -1.0];

    let mut values = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut valid = vec![true; n];
    let mut spikes = Vec::new();

    for (i, &d) in days.iter().enumerate() {
        let season = (d / SEASON_DAYS) as usize;
        let local = (d % SEASON_DAYS) as f64 - jitter[season];
        let mut g = crop_seq[season].phenology.greenness(local);
        if !cut_events[season].is_empty() {
            g = (g - crate::synth::phenology::CutRegime::dip(local, &cut_events[season]))
                .clamp(0.0, 1.0);
        }
        let clean = variables_from_greenness(g);

        let contaminated = rng.gen_bool(config.contamination);
        if contaminated {
            spikes.push(Spike { obs_index: i, day: d });
        }
        if rng.gen_bool(config.qa_invalid_rate) {
            valid[i] = false;
        }

        for v in 0..4 {
            let noise = gaussian(rng) * sigmas[v];
            let spike = if contaminated {
                spike_dir[v] * config.spike_sigmas * sigmas[v]
            } else {
                0.0
            };
            let (lo, hi) = VARIABLE_RANGES[v];
            values[v][i] = (clean[v] + noise + spike).clamp(lo, hi);
        }
    }

    let ids = [VariableId::lai(), VariableId::fapar(), VariableId::red(), VariableId::nir()];
    let series = std::array::from_fn(|v| {
        ObservationSeries::new(ids[v].clone(), days.clone(), values[v].clone(), valid.clone())
            .expect("generated days are strictly increasing")
    });
    ObservationOutput { series, spikes }
}
