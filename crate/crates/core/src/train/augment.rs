//! Early-season data augmentation: random cropping of the RS window
//! sequence, shared by every sample of a mini-batch and every season of a
//! sample. Crop rotation and distribution inputs are untouched.

use rand::Rng;

/// Shortest visible prefix: 10 windows = five months from Oct 1, so every
/// training example keeps enough of the season to learn from.
pub const MIN_CUTOFF: usize = 10;
pub const MAX_CUTOFF: usize = 24;

/// One mini-batch: sample indices plus the number of visible RS windows.
#[derive(Debug, Clone)]
pub struct MiniBatch {
    pub indices: Vec<usize>,
    pub cutoff: usize,
}

impl MiniBatch {
    pub fn full(indices: Vec<usize>, windows: usize) -> Self {
        MiniBatch { indices, cutoff: windows }
    }
}

/// Draws one cutoff uniformly from {MIN_CUTOFF..=min(MAX_CUTOFF, windows)}
/// and applies it to the whole batch.
pub fn early_season_crop(batch: &mut MiniBatch, windows: usize, rng: &mut impl Rng) {
    let hi = MAX_CUTOFF.min(windows);
    let lo = MIN_CUTOFF.min(hi);
    batch.cutoff = rng.gen_range(lo..=hi);
}
