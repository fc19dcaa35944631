//! Stage glue: raw parcel records -> smoothed series -> features ->
//! normalized stores, distributions, aggregation, and model samples.
//!
//! The CLI runs these stages through files; tests and the acceptance suite
//! call them in memory. Both paths share the functions here.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::features::{
    crop_distribution, season_features, CropVocab, FeatureError, NormStats, ParcelSite,
    SeasonFeatures, VariableSet,
};
use crate::ingest::ParcelRecord;
use crate::model::{FeatureStore, SeasonInput, SequenceSample};
use crate::signal::{
    hampel_filter, smooth_concatenated, FlagMode, RegularSeries, SignalError, VariableId,
    WhittakerConfig, DEFAULT_HAMPEL_HALF_WINDOW, DEFAULT_HAMPEL_N_SIGMAS,
};
use crate::taxonomy::{aggregate_labels, AggregationMap, TaxonomyError, TaxonomyTree};
use crate::train::{SplitIndices, SplitPolicy, TrainError};
use crate::SEASON_DAYS;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Split(#[from] TrainError),
    #[error("no usable parcels after preparation")]
    NoUsableParcels,
}

/// Stage parameters. Defaults follow the pipeline conventions: directional
/// Hampel on red (up) and NIR (down), V-curve Whittaker smoothing, a 10 km
/// neighborhood, and a 0.3% aggregation threshold.
#[derive(Debug, Clone)]
pub struct PrepareOptions {
    pub variables: VariableSet,
    pub whittaker: WhittakerConfig,
    pub hampel_half_window: usize,
    pub hampel_n_sigmas: f64,
    pub radius_km: f64,
    pub threshold_fraction: f64,
    pub policy: SplitPolicy,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        PrepareOptions {
            variables: VariableSet::default(),
            whittaker: WhittakerConfig::default(),
            hampel_half_window: DEFAULT_HAMPEL_HALF_WINDOW,
            hampel_n_sigmas: DEFAULT_HAMPEL_N_SIGMAS,
            radius_km: 10.0,
            threshold_fraction: 0.003,
            policy: SplitPolicy::default(),
        }
    }
}

/// Flags outliers (red up, NIR down) and invalidates the affected dates on
/// every variable, then smooths each variable over the concatenated seasons.
/// Returns the per-season 4-day series for each available variable.
pub fn smooth_parcel(
    record: &ParcelRecord,
    n_seasons: usize,
    opts: &PrepareOptions,
) -> Result<BTreeMap<VariableId, Vec<RegularSeries>>, SignalError> {
    // Union of contaminated dates from the two detection bands.
    let mut bad_days: BTreeSet<i64> = BTreeSet::new();
    for (var, mode) in [
        (VariableId::red(), FlagMode::UpOnly),
        (VariableId::nir(), FlagMode::DownOnly),
    ] {
        if let Some(series) = record.series.get(&var) {
            let result =
                hampel_filter(series, opts.hampel_half_window, opts.hampel_n_sigmas, mode)?;
            bad_days.extend(result.flagged.iter().map(|&i| series.days[i]));
        }
    }

    let mut out = BTreeMap::new();
    for (var, series) in &record.series {
        let mut cleaned = series.clone();
        for (i, day) in cleaned.days.iter().enumerate() {
            if bad_days.contains(day) {
                cleaned.valid[i] = false;
            }
        }
        match smooth_concatenated(&cleaned, n_seasons, &opts.whittaker) {
            Ok(smoothed) => {
                out.insert(var.clone(), smoothed.per_season);
            }
            // A variable without enough valid samples is simply absent; the
            // feature stage zero-fills its block.
            Err(SignalError::InsufficientObservations(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Smoothed per-season series for a whole dataset, as flat rows.
pub fn smooth_dataset(
    records: &[ParcelRecord],
    seasons: &[u32],
    opts: &PrepareOptions,
) -> Result<Vec<(String, u32, RegularSeries)>, PipelineError> {
    let mut rows = Vec::new();
    for record in records {
        let per_var = smooth_parcel(record, seasons.len(), opts)?;
        for (_, per_season) in per_var {
            for (s_idx, series) in per_season.into_iter().enumerate() {
                rows.push((record.foi_id.clone(), seasons[s_idx], series));
            }
        }
    }
    Ok(rows)
}

/// Raw (unnormalized) feature vectors from smoothed rows. Seasons flagged as
/// missing RS upstream produce no row.
pub fn featurize_rows(
    rows: &[(String, u32, RegularSeries)],
    variables: &VariableSet,
) -> Result<Vec<SeasonFeatures>, PipelineError> {
    let mut grouped: BTreeMap<(String, u32), BTreeMap<VariableId, RegularSeries>> = BTreeMap::new();
    for (foi, season, series) in rows {
        grouped
            .entry((foi.clone(), *season))
            .or_default()
            .insert(series.variable.clone(), series.clone());
    }
    let mut out = Vec::with_capacity(grouped.len());
    for ((foi, season), series) in grouped {
        out.push(season_features(&foi, season, &series, variables)?);
    }
    Ok(out)
}

/// Everything the training and evaluation stages need, fully indexed.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub country: String,
    pub seasons: Vec<u32>,
    pub foi_ids: Vec<String>,
    pub vocab: CropVocab,
    /// Normalized season features; rows referenced by `rs_row`.
    pub rs: FeatureStore,
    /// Rounded neighborhood distributions; rows referenced by `cd_row`.
    pub cd: FeatureStore,
    /// `crop_idx[foi][season_idx]`: vocabulary index of the crop.
    pub crop_idx: Vec<Vec<Option<usize>>>,
    /// `rs_row[foi][season_idx]`: feature row, `None` when RS is missing.
    pub rs_row: Vec<Vec<Option<usize>>>,
    pub cd_row: Vec<usize>,
    pub norm: NormStats,
    pub aggregation: AggregationMap,
    pub splits: SplitIndices,
}

/// Runs the full preparation chain in memory. The vocabulary is supplied by
/// the caller so multi-country runs can share the union vocabulary.
pub fn prepare(
    records: &[ParcelRecord],
    taxonomy: &TaxonomyTree,
    vocab: CropVocab,
    country: &str,
    seasons: &[u32],
    opts: &PrepareOptions,
    split_seed: u64,
) -> Result<Prepared, PipelineError> {
    let smoothed = smooth_dataset(records, seasons, opts)?;
    let features = featurize_rows(&smoothed, &opts.variables)?;
    prepare_from_features(records, features, taxonomy, vocab, country, seasons, opts, split_seed)
}

/// Same as [`prepare`] but takes featurized rows (the CLI path, where the
/// smooth and featurize stages already ran and wrote their files).
#[allow(clippy::too_many_arguments)]
pub fn prepare_from_features(
    records: &[ParcelRecord],
    features: Vec<SeasonFeatures>,
    taxonomy: &TaxonomyTree,
    vocab: CropVocab,
    country: &str,
    seasons: &[u32],
    opts: &PrepareOptions,
    split_seed: u64,
) -> Result<Prepared, PipelineError> {
    prepare_full(records, features, taxonomy, vocab, country, seasons, opts, split_seed, None, None)
}

/// Full-control variant: `norm_override` reuses statistics stored with a
/// trained model (evaluation path) instead of refitting on the train split;
/// `cd_pairs` rebuilds distribution vectors from a distributions file
/// instead of recomputing the neighborhood geometry.
#[allow(clippy::too_many_arguments)]
pub fn prepare_full(
    records: &[ParcelRecord],
    features: Vec<SeasonFeatures>,
    taxonomy: &TaxonomyTree,
    vocab: CropVocab,
    country: &str,
    seasons: &[u32],
    opts: &PrepareOptions,
    split_seed: u64,
    norm_override: Option<NormStats>,
    cd_pairs: Option<&[(String, crate::taxonomy::CropCode, f64)]>,
) -> Result<Prepared, PipelineError> {
    let n_fois = records.len();
    if n_fois == 0 {
        return Err(PipelineError::NoUsableParcels);
    }
    let season_index: BTreeMap<u32, usize> =
        seasons.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let foi_index: BTreeMap<&str, usize> = records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.foi_id.as_str(), i))
        .collect();

    let splits = crate::train::make_splits(n_fois, seasons, &opts.policy, split_seed)?;

    // Normalization statistics come from training FOIs and the seasons the
    // training forward pass consumes (inputs up to the last train target).
    let max_train_season = *splits.train_target_seasons.iter().max().unwrap();
    let train_fois: BTreeSet<usize> = splits.train_fois.iter().copied().collect();
    let mut feature_rows: Vec<(usize, usize, Vec<f64>)> = Vec::with_capacity(features.len());
    for f in features {
        let (Some(&foi), Some(&s_idx)) =
            (foi_index.get(f.foi_id.as_str()), season_index.get(&f.season))
        else {
            continue;
        };
        feature_rows.push((foi, s_idx, f.values));
    }
    let norm = match norm_override {
        Some(n) => n,
        None => {
            let train_rows: Vec<&[f64]> = feature_rows
                .iter()
                .filter(|(foi, s, _)| train_fois.contains(foi) && *s <= max_train_season)
                .map(|(_, _, v)| v.as_slice())
                .collect();
            if train_rows.len() < 2 {
                return Err(PipelineError::NoUsableParcels);
            }
            NormStats::fit(train_rows)?
        }
    };

    let dim = feature_rows[0].2.len();
    let mut rs = FeatureStore::new(dim);
    let mut rs_row = vec![vec![None; seasons.len()]; n_fois];
    for (foi, s_idx, mut values) in feature_rows {
        norm.apply(&mut values);
        rs_row[foi][s_idx] = Some(rs.push(&values));
    }

    // Crop indices per parcel-season.
    let mut crop_idx = vec![vec![None; seasons.len()]; n_fois];
    for (i, rec) in records.iter().enumerate() {
        for (season, code) in &rec.crops {
            if let Some(&s_idx) = season_index.get(season) {
                crop_idx[i][s_idx] = Some(
                    vocab
                        .index_of(code)
                        .map_err(PipelineError::Feature)?,
                );
            }
        }
    }

    // Neighborhood distributions: either rebuilt from a distributions file
    // or computed from the validation season's parcels.
    let mut cd = FeatureStore::new(vocab.len());
    let mut cd_row = Vec::with_capacity(n_fois);
    match cd_pairs {
        Some(pairs) => {
            let mut per_foi: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
            for (foi, code, share) in pairs {
                let idx = vocab.index_of(code).map_err(PipelineError::Feature)?;
                per_foi.entry(foi.as_str()).or_insert_with(|| vec![0.0; vocab.len()])[idx] = *share;
            }
            let zeros = vec![0.0; vocab.len()];
            for rec in records {
                let shares = per_foi.get(rec.foi_id.as_str()).unwrap_or(&zeros);
                cd_row.push(cd.push(shares));
            }
        }
        None => {
            let val_season = seasons[splits.val_season];
            let sites: Vec<ParcelSite> = records
                .iter()
                .filter_map(|r| {
                    r.crops.get(&val_season).map(|code| ParcelSite {
                        crop: *code,
                        x_km: r.x_km,
                        y_km: r.y_km,
                        area_ha: r.area_ha,
                    })
                })
                .collect();
            for rec in records {
                let dist = crop_distribution(rec.x_km, rec.y_km, &sites, opts.radius_km, &vocab)?;
                cd_row.push(cd.push(&dist.shares));
            }
        }
    }

    // Aggregation from train + validation season counts, all parcels.
    let mut counted = taxonomy.clone();
    for rec in records {
        for (season, code) in &rec.crops {
            if let Some(&s_idx) = season_index.get(season) {
                if s_idx <= splits.val_season {
                    counted.add_count(*code, 1);
                }
            }
        }
    }
    let aggregation = aggregate_labels(&counted, opts.threshold_fraction)?;

    Ok(Prepared {
        country: country.to_string(),
        seasons: seasons.to_vec(),
        foi_ids: records.iter().map(|r| r.foi_id.clone()).collect(),
        vocab,
        rs,
        cd,
        crop_idx,
        rs_row,
        cd_row,
        norm,
        aggregation,
        splits,
    })
}

impl Prepared {
    pub fn stores(&self) -> crate::model::Stores<'_> {
        crate::model::Stores { rs: &self.rs, cd: &self.cd }
    }

    /// True when crops are present at every season up to `last` for a parcel.
    fn crops_complete(&self, foi: usize, last: usize) -> bool {
        (0..=last).all(|k| self.crop_idx[foi][k].is_some())
    }

    fn season_input(&self, foi: usize, step_season: usize) -> SeasonInput {
        SeasonInput {
            prev_crop: self.crop_idx[foi][step_season - 1],
            rs_row: self.rs_row[foi][step_season],
        }
    }

    /// Training samples. `multi_step` (between-seasons variants) yields one
    /// sample per parcel with a loss at every train-range step; otherwise
    /// one single-target sample per (parcel, target season).
    pub fn train_samples(&self, multi_step: bool) -> Vec<SequenceSample> {
        let mut out = Vec::new();
        let targets = &self.splits.train_target_seasons;
        for &foi in &self.splits.train_fois {
            let max_t = *targets.iter().max().unwrap();
            if !self.crops_complete(foi, max_t) {
                continue;
            }
            if multi_step {
                let seasons: Vec<SeasonInput> =
                    (1..=max_t).map(|k| self.season_input(foi, k)).collect();
                let sample_targets: Vec<(usize, usize)> = targets
                    .iter()
                    .map(|&t| (t - 1, self.crop_idx[foi][t].unwrap()))
                    .collect();
                out.push(SequenceSample {
                    foi,
                    seasons,
                    targets: sample_targets,
                    cd_row: Some(self.cd_row[foi]),
                });
            } else {
                for &t in targets {
                    let seasons: Vec<SeasonInput> =
                        (1..=t).map(|k| self.season_input(foi, k)).collect();
                    out.push(SequenceSample {
                        foi,
                        seasons,
                        targets: vec![(t - 1, self.crop_idx[foi][t].unwrap())],
                        cd_row: Some(self.cd_row[foi]),
                    });
                }
            }
        }
        out
    }

    /// Evaluation samples predicting `season_idx` for the given parcels,
    /// with the truth class per sample.
    pub fn eval_samples(&self, fois: &[usize], season_idx: usize) -> (Vec<SequenceSample>, Vec<usize>) {
        let mut samples = Vec::new();
        let mut truths = Vec::new();
        for &foi in fois {
            if !self.crops_complete(foi, season_idx) {
                continue;
            }
            let seasons: Vec<SeasonInput> =
                (1..=season_idx).map(|k| self.season_input(foi, k)).collect();
            let truth = self.crop_idx[foi][season_idx].unwrap();
            samples.push(SequenceSample {
                foi,
                seasons,
                targets: vec![(season_idx - 1, truth)],
                cd_row: Some(self.cd_row[foi]),
            });
            truths.push(truth);
        }
        (samples, truths)
    }

    /// Validation set: train parcels at the validation season.
    pub fn val_samples(&self) -> (Vec<SequenceSample>, Vec<usize>) {
        self.eval_samples(&self.splits.train_fois, self.splits.val_season)
    }

    /// Test set: held-out parcels (all parcels under a temporal policy) at
    /// the test season.
    pub fn test_samples(&self) -> (Vec<SequenceSample>, Vec<usize>) {
        self.eval_samples(&self.splits.test_fois, self.splits.test_season)
    }

    pub fn class_code(&self, idx: usize) -> crate::taxonomy::CropCode {
        *self
            .vocab
            .code_at(idx)
            .expect("class indices come from the vocabulary")
    }

    /// Per-season global day already accounts for the Oct-1 origin.
    pub fn season_of_global_day(&self, day: i64) -> usize {
        (day / SEASON_DAYS) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::build_vocab;
    use crate::synth::{gen_dataset, preset};

    fn prepared_tiny() -> Prepared {
        let ds = gen_dataset(&preset("tiny").unwrap());
        let vocab = build_vocab([ds.records.as_slice()], false);
        let seasons = ds.config.seasons();
        prepare(
            &ds.records,
            &ds.taxonomy,
            vocab,
            "NL",
            &seasons,
            &PrepareOptions::default(),
            42,
        )
        .unwrap()
    }

    #[test]
    fn tiny_preset_prepares_end_to_end() {
        let p = prepared_tiny();
        assert_eq!(p.foi_ids.len(), 60);
        assert_eq!(p.seasons.len(), 4);
        assert_eq!(p.vocab.len(), 6);
        assert_eq!(p.rs.dim(), 672);
        // Every parcel-season has features in the tiny preset.
        for rows in &p.rs_row {
            assert!(rows.iter().all(|r| r.is_some()));
        }
        // Splits: 4 seasons -> train target {1}, val 2, test 3.
        assert_eq!(p.splits.train_target_seasons, vec![1]);
        assert_eq!(p.splits.val_season, 2);
        assert_eq!(p.splits.test_season, 3);
    }

    #[test]
    fn train_and_eval_samples_have_expected_shapes() {
        let p = prepared_tiny();
        let multi = p.train_samples(true);
        assert_eq!(multi.len(), 60);
        for s in &multi {
            assert_eq!(s.seasons.len(), 1);
            assert_eq!(s.targets.len(), 1);
        }
        let single = p.train_samples(false);
        assert_eq!(single.len(), 60);
        let (test, truths) = p.test_samples();
        assert_eq!(test.len(), 60);
        assert_eq!(truths.len(), 60);
        for s in &test {
            assert_eq!(s.seasons.len(), 3, "test sequences span up to the test season");
            assert_eq!(s.targets[0].0, 2);
        }
    }

    #[test]
    fn normalized_train_features_are_standardized() {
        let p = prepared_tiny();
        // Training rows: train fois x seasons <= max train target.
        let mut count = 0;
        let mut mean = vec![0.0; p.rs.dim()];
        for &foi in &p.splits.train_fois {
            for s in 0..=1 {
                if let Some(row) = p.rs_row[foi][s] {
                    for (m, v) in mean.iter_mut().zip(p.rs.row(row)) {
                        *m += v;
                    }
                    count += 1;
                }
            }
        }
        for m in &mut mean {
            *m /= count as f64;
        }
        let max_abs_mean = mean.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(max_abs_mean < 1e-8, "train mean {max_abs_mean}");
    }

    #[test]
    fn distributions_are_rounded_and_regional() {
        let p = prepared_tiny();
        for foi in 0..p.foi_ids.len() {
            let row = p.cd.row(p.cd_row[foi]);
            let sum: f64 = row.iter().sum();
            assert!(sum > 0.5, "tiny preset is one dense cluster, sum {sum}");
            for v in row {
                let scaled = v / crate::features::DISTRIBUTION_ROUNDING;
                assert!((scaled - scaled.round()).abs() < 1e-9);
            }
        }
    }
}
