//! Model-facing sample types. Feature vectors live in shared stores and
//! samples carry row indices, so the eight variants can share one dataset
//! without copying the 672-wide feature rows.

use serde::{Deserialize, Serialize};

/// Flat row store for fixed-width feature vectors.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FeatureStore {
    dim: usize,
    data: Vec<f64>,
}

impl FeatureStore {
    pub fn new(dim: usize) -> Self {
        FeatureStore { dim, data: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn push(&mut self, row: &[f64]) -> usize {
        assert_eq!(row.len(), self.dim, "row width mismatch");
        let idx = self.len();
        self.data.extend_from_slice(row);
        idx
    }

    #[inline]
    pub fn row(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn row_mut(&mut self, idx: usize) -> &mut [f64] {
        &mut self.data[idx * self.dim..(idx + 1) * self.dim]
    }
}

/// One step of a sequence sample: the previous season's crop (the input
/// token) and the current season's RS features. A missing RS row is
/// zero-padded downstream rather than rejected.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeasonInput {
    pub prev_crop: Option<usize>,
    pub rs_row: Option<usize>,
}

/// A parcel's season sequence with its supervised steps.
///
/// Step k consumes the crop of season k-1 and the RS signal of season k;
/// `targets` lists `(step, class)` pairs where the loss applies. Evaluation
/// samples carry a single target at the final step. The crop-distribution
/// row, when present, is shared by every prediction head of the sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceSample {
    pub foi: usize,
    pub seasons: Vec<SeasonInput>,
    pub targets: Vec<(usize, usize)>,
    pub cd_row: Option<usize>,
}

impl SequenceSample {
    /// The step whose prediction is scored at evaluation time.
    pub fn final_step(&self) -> usize {
        self.seasons.len().saturating_sub(1)
    }

    pub fn final_target(&self) -> Option<usize> {
        self.targets
            .iter()
            .find(|(step, _)| *step == self.final_step())
            .map(|(_, class)| *class)
    }
}

/// Shared feature matrices referenced by samples.
#[derive(Debug, Clone, Copy)]
pub struct Stores<'a> {
    pub rs: &'a FeatureStore,
    pub cd: &'a FeatureStore,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn store_rows_roundtrip() {
        let mut s = FeatureStore::new(3);
        let a = s.push(&[1.0, 2.0, 3.0]);
        let b = s.push(&[4.0, 5.0, 6.0]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.row(a), &[1.0, 2.0, 3.0]);
        assert_eq!(s.row(b), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn final_target_finds_last_step_entry() {
        let sample = SequenceSample {
            foi: 0,
            seasons: vec![
                SeasonInput { prev_crop: Some(1), rs_row: None },
                SeasonInput { prev_crop: Some(2), rs_row: None },
            ],
            targets: vec![(0, 2), (1, 3)],
            cd_row: None,
        };
        assert_eq!(sample.final_step(), 1);
        assert_eq!(sample.final_target(), Some(3));
    }
}
