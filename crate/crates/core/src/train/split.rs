//! Temporal and spatio-temporal dataset splits.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitMode {
    /// Roles differ by season only; every parcel appears in every role.
    Temporal,
    /// Additionally holds out a fraction of parcels; the test set contains
    /// only held-out parcels, never seen during training.
    SpatioTemporal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitPolicy {
    pub mode: SplitMode,
    /// Fraction of parcels held out for testing in spatio-temporal mode.
    pub spatial_holdout_fraction: f64,
    /// Season indices; `None` derives test = last, validation = second last,
    /// train targets = everything before that.
    pub val_season_idx: Option<usize>,
    pub test_season_idx: Option<usize>,
}

impl Default for SplitPolicy {
    fn default() -> Self {
        SplitPolicy {
            mode: SplitMode::Temporal,
            spatial_holdout_fraction: 0.10,
            val_season_idx: None,
            test_season_idx: None,
        }
    }
}

impl SplitPolicy {
    pub fn spatio_temporal() -> Self {
        SplitPolicy { mode: SplitMode::SpatioTemporal, ..SplitPolicy::default() }
    }
}

/// Resolved role assignment. Season indices are positions in the dataset's
/// ordered season list; a target season needs at least one preceding season
/// to supply the rotation input, so index 0 is never a target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train_fois: Vec<usize>,
    pub test_fois: Vec<usize>,
    pub train_target_seasons: Vec<usize>,
    pub val_season: usize,
    pub test_season: usize,
}

pub fn make_splits(
    n_fois: usize,
    seasons: &[u32],
    policy: &SplitPolicy,
    seed: u64,
) -> Result<SplitIndices, TrainError> {
    let n_seasons = seasons.len();
    if n_seasons < 3 {
        return Err(TrainError::TooFewSeasons(n_seasons));
    }
    let test_season = policy.test_season_idx.unwrap_or(n_seasons - 1);
    let val_season = policy.val_season_idx.unwrap_or(test_season.saturating_sub(1));
    if val_season == 0 || test_season <= val_season || test_season >= n_seasons {
        return Err(TrainError::TooFewSeasons(n_seasons));
    }
    let train_target_seasons: Vec<usize> = (1..val_season).collect();
    if train_target_seasons.is_empty() {
        return Err(TrainError::TooFewSeasons(n_seasons));
    }

    let (train_fois, test_fois) = match policy.mode {
        SplitMode::Temporal => {
            let all: Vec<usize> = (0..n_fois).collect();
            (all.clone(), all)
        }
        SplitMode::SpatioTemporal => {
            let mut order: Vec<usize> = (0..n_fois).collect();
            order.shuffle(&mut stream(seed, "split"));
            let holdout = ((n_fois as f64) * policy.spatial_holdout_fraction).round() as usize;
            let mut test: Vec<usize> = order[..holdout].to_vec();
            let mut train: Vec<usize> = order[holdout..].to_vec();
            test.sort_unstable();
            train.sort_unstable();
            (train, test)
        }
    };

    Ok(SplitIndices { train_fois, test_fois, train_target_seasons, val_season, test_season })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEASONS: [u32; 5] = [2016, 2017, 2018, 2019, 2020];

    #[test]
    fn temporal_roles_are_season_disjoint() {
        let s = make_splits(100, &SEASONS, &SplitPolicy::default(), 1).unwrap();
        assert_eq!(s.test_season, 4);
        assert_eq!(s.val_season, 3);
        assert_eq!(s.train_target_seasons, vec![1, 2]);
        assert!(!s.train_target_seasons.contains(&s.test_season));
        assert!(!s.train_target_seasons.contains(&s.val_season));
        assert_eq!(s.train_fois.len(), 100);
    }

    #[test]
    fn spatio_temporal_parcels_are_disjoint() {
        let s = make_splits(1000, &SEASONS, &SplitPolicy::spatio_temporal(), 7).unwrap();
        let train: std::collections::BTreeSet<_> = s.train_fois.iter().collect();
        for foi in &s.test_fois {
            assert!(!train.contains(foi));
        }
        assert_eq!(s.train_fois.len() + s.test_fois.len(), 1000);
    }

    // Exact count check of the 90/10 fraction on 1e4 parcels.
    #[test]
    fn holdout_fraction_is_exact_within_half_percent() {
        let s = make_splits(10_000, &SEASONS, &SplitPolicy::spatio_temporal(), 3).unwrap();
        let frac = s.test_fois.len() as f64 / 10_000.0;
        assert!((frac - 0.10).abs() <= 0.005, "holdout fraction {frac}");
    }

    #[test]
    fn too_few_seasons_is_an_error() {
        assert!(matches!(
            make_splits(10, &[2016, 2017], &SplitPolicy::default(), 1),
            Err(TrainError::TooFewSeasons(2))
        ));
    }

    #[test]
    fn splits_are_deterministic_per_seed() {
        let a = make_splits(500, &SEASONS, &SplitPolicy::spatio_temporal(), 9).unwrap();
        let b = make_splits(500, &SEASONS, &SplitPolicy::spatio_temporal(), 9).unwrap();
        assert_eq!(a.test_fois, b.test_fois);
        let c = make_splits(500, &SEASONS, &SplitPolicy::spatio_temporal(), 10).unwrap();
        assert_ne!(a.test_fois, c.test_fois);
    }
}
