//! Markov sampling of per-parcel crop sequences.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::ScenarioConfig;
use crate::rng::substream;

/// Samples an index from a discrete distribution.
pub(crate) fn sample_discrete(probs: &[f64], rng: &mut impl Rng) -> usize {
    let mut u: f64 = rng.gen_range(0.0..1.0);
    for (i, p) in probs.iter().enumerate() {
        if u < *p {
            return i;
        }
        u -= p;
    }
    probs.len() - 1
}

/// Region index and crop-index sequence for one parcel.
pub struct Rotation {
    pub region: usize,
    pub crops: Vec<usize>,
}

fn region_of(config: &ScenarioConfig, rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = config.regions.iter().map(|r| r.weight).sum();
    let probs: Vec<f64> = config.regions.iter().map(|r| r.weight / total).collect();
    sample_discrete(&probs, rng)
}

/// Samples every parcel's region and crop sequence. Per-parcel substreams
/// keep the output independent of iteration order.
pub fn gen_rotations(config: &ScenarioConfig) -> Vec<Rotation> {
    (0..config.n_fois)
        .map(|foi| {
            let mut rng = substream(config.seed, "rotation", foi as u64);
            let region = region_of(config, &mut rng);
            let m = &config.regions[region].transitions;
            let mut crops = Vec::with_capacity(config.n_seasons);
            let mut current = sample_discrete(&m.initial, &mut rng);
            crops.push(current);
            for _ in 1..config.n_seasons {
                current = sample_discrete(&m.rows[current], &mut rng);
                crops.push(current);
            }
            Rotation { region, crops }
        })
        .collect()
}
