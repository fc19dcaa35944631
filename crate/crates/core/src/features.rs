//! Fixed-size modality inputs: windowed statistical functionals of the
//! smoothed series, crop one-hot vectors, and neighborhood crop shares.
//!
//! A season's signal is cut into 24 overlapping 30-day windows (15-day step)
//! and each window is reduced to 7 functionals, giving
//! `n_vars * 24 * 7` features per parcel-season - 672 for the canonical
//! LAI/FAPAR/RED/NIR set - laid out `[variable][window][functional]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signal::{RegularSeries, VariableId};
use crate::taxonomy::CropCode;
use crate::{OUTPUT_STEP_DAYS, SEASON_DAYS, SEASON_GRID_LEN};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("series does not cover the season: {0}")]
    SeasonCoverage(String),
    #[error("empty window")]
    EmptyWindow,
    #[error("need at least 2 training rows, got {0}")]
    TooFewRows(usize),
    #[error("unknown crop code {0} and no unknown slot enabled")]
    UnknownCrop(CropCode),
    #[error("feature length {got} does not match expected {expected}")]
    BadLength { got: usize, expected: usize },
}

pub const WINDOW_DAYS: i64 = 30;
pub const WINDOW_STEP_DAYS: i64 = 15;
/// 12 months at two windows per month.
pub const WINDOWS_PER_SEASON: usize = 24;
/// mean, standard deviation, min, max, median, first quartile, third quartile.
pub const FUNCTIONALS_PER_WINDOW: usize = 7;

pub fn feature_len(n_vars: usize) -> usize {
    n_vars * WINDOWS_PER_SEASON * FUNCTIONALS_PER_WINDOW
}

#[inline]
pub fn feature_index(var: usize, window: usize, functional: usize) -> usize {
    (var * WINDOWS_PER_SEASON + window) * FUNCTIONALS_PER_WINDOW + functional
}

/// Ordered variable list defining the feature layout. The canonical set is
/// LAI, FAPAR, RED, NIR; other band sets change `n_vars` and nothing else.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSet {
    pub variables: Vec<VariableId>,
}

impl Default for VariableSet {
    fn default() -> Self {
        VariableSet {
            variables: vec![
                VariableId::lai(),
                VariableId::fapar(),
                VariableId::red(),
                VariableId::nir(),
            ],
        }
    }
}

impl VariableSet {
    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn index_of(&self, v: &VariableId) -> Option<usize> {
        self.variables.iter().position(|x| x == v)
    }
}

/// The per-season feature vector for one parcel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeasonFeatures {
    pub foi_id: String,
    pub season: u32,
    pub values: Vec<f64>,
    /// Variables that were absent and zero-filled.
    pub missing: Vec<VariableId>,
}

/// Cuts a full-season 4-day series into the 24 overlapping windows.
/// Window k holds the samples with day in [15k, min(15k + 30, 365)).
pub fn windowize(series: &RegularSeries) -> Result<Vec<Vec<f64>>, FeatureError> {
    if series.start_day != 0 || series.step_days != OUTPUT_STEP_DAYS {
        return Err(FeatureError::SeasonCoverage(format!(
            "expected start 0 step {OUTPUT_STEP_DAYS}, got start {} step {}",
            series.start_day, series.step_days
        )));
    }
    if series.values.len() < SEASON_GRID_LEN {
        return Err(FeatureError::SeasonCoverage(format!(
            "{} samples < {SEASON_GRID_LEN}",
            series.values.len()
        )));
    }
    let mut windows = Vec::with_capacity(WINDOWS_PER_SEASON);
    for k in 0..WINDOWS_PER_SEASON as i64 {
        let lo_day = WINDOW_STEP_DAYS * k;
        let hi_day = (lo_day + WINDOW_DAYS).min(SEASON_DAYS);
        let lo = ((lo_day + OUTPUT_STEP_DAYS - 1) / OUTPUT_STEP_DAYS) as usize;
        let hi = ((hi_day - 1) / OUTPUT_STEP_DAYS) as usize + 1;
        if lo >= hi {
            return Err(FeatureError::EmptyWindow);
        }
        windows.push(series.values[lo..hi].to_vec());
    }
    Ok(windows)
}

/// The 7 statistical functionals in fixed order:
/// mean, std (population), min, max, median, q1, q3.
/// Quantiles interpolate linearly between order statistics.
pub fn functionals(window: &[f64]) -> Result<[f64; FUNCTIONALS_PER_WINDOW], FeatureError> {
    if window.is_empty() {
        return Err(FeatureError::EmptyWindow);
    }
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let var = window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();

    let mut sorted = window.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| -> f64 {
        let pos = (sorted.len() - 1) as f64 * p;
        let lo = pos.floor() as usize;
        let frac = pos - lo as f64;
        if lo + 1 < sorted.len() {
            sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
        } else {
            sorted[lo]
        }
    };

    Ok([mean, std, sorted[0], sorted[sorted.len() - 1], q(0.5), q(0.25), q(0.75)])
}

/// Assembles the full feature vector for one parcel-season. Input series may
/// arrive in any order; the configured variable order is canonical. Missing
/// variables produce a zero block and are reported in `missing`.
pub fn season_features(
    foi_id: &str,
    season: u32,
    series: &BTreeMap<VariableId, RegularSeries>,
    set: &VariableSet,
) -> Result<SeasonFeatures, FeatureError> {
    let mut values = vec![0.0; feature_len(set.len())];
    let mut missing = Vec::new();
    for (var_idx, var) in set.variables.iter().enumerate() {
        match series.get(var) {
            Some(s) => {
                let windows = windowize(s)?;
                for (w, win) in windows.iter().enumerate() {
                    let f = functionals(win)?;
                    for (k, v) in f.iter().enumerate() {
                        values[feature_index(var_idx, w, k)] = *v;
                    }
                }
            }
            None => missing.push(var.clone()),
        }
    }
    Ok(SeasonFeatures { foi_id: foi_id.to_string(), season, values, missing })
}

/// Gathers one window's features across all variables:
/// `[var0 f0..f6, var1 f0..f6, ...]`, width `n_vars * 7`.
pub fn window_feature_vector(values: &[f64], n_vars: usize, window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_vars * FUNCTIONALS_PER_WINDOW);
    for var in 0..n_vars {
        for f in 0..FUNCTIONALS_PER_WINDOW {
            out.push(values[feature_index(var, window, f)]);
        }
    }
    out
}

/// Per-dimension z-score statistics fitted on the training split only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Floor applied to per-dimension standard deviations.
pub const STD_FLOOR: f64 = 1e-12;

impl NormStats {
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Result<Self, FeatureError> {
        let mut iter = rows.into_iter();
        let first = iter.next().ok_or(FeatureError::TooFewRows(0))?;
        let dim = first.len();
        let mut mean = first.to_vec();
        let mut m2 = vec![0.0; dim];
        let mut count = 1usize;
        for row in iter {
            count += 1;
            for k in 0..dim {
                // Welford update keeps the variance stable in one pass.
                let delta = row[k] - mean[k];
                mean[k] += delta / count as f64;
                m2[k] += delta * (row[k] - mean[k]);
            }
        }
        if count < 2 {
            return Err(FeatureError::TooFewRows(count));
        }
        let std = m2
            .iter()
            .map(|&v| (v / count as f64).sqrt().max(STD_FLOOR))
            .collect();
        Ok(NormStats { mean, std })
    }

    pub fn apply(&self, values: &mut [f64]) {
        for (k, v) in values.iter_mut().enumerate() {
            *v = (*v - self.mean[k]) / self.std[k];
        }
    }

    pub fn invert(&self, values: &mut [f64]) {
        for (k, v) in values.iter_mut().enumerate() {
            *v = *v * self.std[k] + self.mean[k];
        }
    }
}

/// Ordered crop vocabulary shared across datasets (union of code lists).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CropVocab {
    codes: Vec<CropCode>,
    #[serde(skip)]
    index: BTreeMap<CropCode, usize>,
    unknown_enabled: bool,
}

impl CropVocab {
    /// Builds from any code collection: deduplicated, lexicographic order.
    pub fn new(codes: impl IntoIterator<Item = CropCode>, unknown_enabled: bool) -> Self {
        let mut codes: Vec<CropCode> = codes.into_iter().collect();
        codes.sort();
        codes.dedup();
        let index = codes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        CropVocab { codes, index, unknown_enabled }
    }

    pub fn rebuild_index(&mut self) {
        self.index = self.codes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    }

    /// Total one-hot length, including the unknown slot when enabled.
    pub fn len(&self) -> usize {
        self.codes.len() + usize::from(self.unknown_enabled)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn codes(&self) -> &[CropCode] {
        &self.codes
    }

    pub fn code_at(&self, idx: usize) -> Option<&CropCode> {
        self.codes.get(idx)
    }

    pub fn index_of(&self, code: &CropCode) -> Result<usize, FeatureError> {
        match self.index.get(code) {
            Some(&i) => Ok(i),
            None if self.unknown_enabled => Ok(self.codes.len()),
            None => Err(FeatureError::UnknownCrop(*code)),
        }
    }
}

/// One-hot encoding of a crop code over the vocabulary.
pub fn crop_onehot(code: &CropCode, vocab: &CropVocab) -> Result<Vec<f64>, FeatureError> {
    let mut v = vec![0.0; vocab.len()];
    v[vocab.index_of(code)?] = 1.0;
    Ok(v)
}

/// Area share of each crop within a radius of a parcel centroid, rounded to
/// multiples of 1e-4. Rounding can drop tiny nonzero shares to exact zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CropDistribution {
    pub shares: Vec<f64>,
    pub empty_neighborhood: bool,
}

/// A parcel as seen by the neighborhood computation: planar km coordinates
/// and an area in hectares.
#[derive(Debug, Clone)]
pub struct ParcelSite {
    pub crop: CropCode,
    pub x_km: f64,
    pub y_km: f64,
    pub area_ha: f64,
}

pub const DISTRIBUTION_ROUNDING: f64 = 1e-4;

/// Shares of cropped area per vocabulary entry within `radius_km` of
/// (x, y), the parcel's own entry included. Distances are planar Euclidean.
pub fn crop_distribution(
    x_km: f64,
    y_km: f64,
    parcels: &[ParcelSite],
    radius_km: f64,
    vocab: &CropVocab,
) -> Result<CropDistribution, FeatureError> {
    let r2 = radius_km * radius_km;
    let mut area = vec![0.0f64; vocab.len()];
    let mut total = 0.0f64;
    for p in parcels {
        let dx = p.x_km - x_km;
        let dy = p.y_km - y_km;
        if dx * dx + dy * dy <= r2 {
            let idx = vocab.index_of(&p.crop)?;
            area[idx] += p.area_ha;
            total += p.area_ha;
        }
    }
    if total <= 0.0 {
        return Ok(CropDistribution { shares: vec![0.0; vocab.len()], empty_neighborhood: true });
    }
    let shares = area
        .iter()
        .map(|a| (a / total / DISTRIBUTION_ROUNDING).round() * DISTRIBUTION_ROUNDING)
        .collect();
    Ok(CropDistribution { shares, empty_neighborhood: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn full_season(values: Vec<f64>) -> RegularSeries {
        RegularSeries {
            variable: VariableId::lai(),
            start_day: 0,
            step_days: OUTPUT_STEP_DAYS,
            values,
        }
    }

    fn ramp_season() -> RegularSeries {
        full_season((0..SEASON_GRID_LEN).map(|i| i as f64).collect())
    }

    // --- windowize ---

    #[test]
    fn full_season_gives_24_windows() {
        let w = windowize(&ramp_season()).unwrap();
        assert_eq!(w.len(), WINDOWS_PER_SEASON);
        assert!(w.iter().all(|win| !win.is_empty()));
    }

    #[test]
    fn consecutive_windows_overlap_by_half() {
        let w = windowize(&ramp_season()).unwrap();
        for k in 0..w.len() - 2 {
            // Samples in [15(k+1), 15k+30) appear in both windows.
            let a = &w[k];
            let b = &w[k + 1];
            let overlap: Vec<f64> = a.iter().filter(|v| b.contains(v)).cloned().collect();
            assert!(
                (3..=4).contains(&overlap.len()),
                "window {k} overlap {} samples",
                overlap.len()
            );
        }
    }

    #[test]
    fn windows_tile_every_sample() {
        let w = windowize(&ramp_season()).unwrap();
        let mut covered = vec![false; SEASON_GRID_LEN];
        for win in &w {
            for v in win {
                covered[*v as usize] = true;
            }
        }
        assert!(covered.iter().all(|&c| c), "every sample must fall in some window");
    }

    #[test]
    fn short_series_is_rejected() {
        let s = full_season(vec![1.0; 40]);
        assert!(matches!(windowize(&s), Err(FeatureError::SeasonCoverage(_))));
    }

    // --- functionals ---

    #[test]
    fn constant_window() {
        let f = functionals(&[3.0, 3.0, 3.0, 3.0]).unwrap();
        assert_eq!(f, [3.0, 0.0, 3.0, 3.0, 3.0, 3.0, 3.0]);
    }

    #[test]
    fn symmetric_window() {
        let f = functionals(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((f[0] - 2.5).abs() < 1e-12, "mean");
        assert_eq!(f[2], 1.0, "min");
        assert_eq!(f[3], 4.0, "max");
        assert!((f[4] - 2.5).abs() < 1e-12, "median");
    }

    #[test]
    fn empty_window_is_an_error() {
        assert!(matches!(functionals(&[]), Err(FeatureError::EmptyWindow)));
    }

    // Sort-based brute-force quantile oracle with linear interpolation.
    fn oracle_quantile(values: &[f64], p: f64) -> f64 {
        let mut s = values.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = (s.len() as f64 - 1.0) * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        s[lo] + (h - lo as f64) * (s[hi] - s[lo])
    }

    #[test]
    fn quantiles_match_sort_based_oracle() {
        let mut rng = crate::rng::stream(21, "quant");
        let values: Vec<f64> = (0..11).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let f = functionals(&values).unwrap();
        for (idx, p) in [(4usize, 0.5), (5, 0.25), (6, 0.75)] {
            let want = oracle_quantile(&values, p);
            assert!((f[idx] - want).abs() < 1e-12, "p={p}: {} vs {want}", f[idx]);
        }
        assert!(f[2] <= f[5] && f[5] <= f[4] && f[4] <= f[6] && f[6] <= f[3], "order: {f:?}");
    }

    // --- season features ---

    fn four_series() -> BTreeMap<VariableId, RegularSeries> {
        let mut m = BTreeMap::new();
        for (i, v) in VariableSet::default().variables.into_iter().enumerate() {
            let vals = (0..SEASON_GRID_LEN).map(|k| (k + i) as f64).collect();
            m.insert(v.clone(), RegularSeries { variable: v, start_day: 0, step_days: 4, values: vals });
        }
        m
    }

    #[test]
    fn four_variables_give_672_features() {
        let set = VariableSet::default();
        let f = season_features("p1", 0, &four_series(), &set).unwrap();
        assert_eq!(f.values.len(), 672);
        assert!(f.missing.is_empty());
    }

    #[test]
    fn missing_variable_zero_fills_its_block() {
        let set = VariableSet::default();
        let mut series = four_series();
        series.remove(&VariableId::red());
        let f = season_features("p1", 0, &series, &set).unwrap();
        assert_eq!(f.missing, vec![VariableId::red()]);
        let red_idx = set.index_of(&VariableId::red()).unwrap();
        let zeros = (0..WINDOWS_PER_SEASON)
            .flat_map(|w| (0..FUNCTIONALS_PER_WINDOW).map(move |k| (w, k)))
            .filter(|&(w, k)| f.values[feature_index(red_idx, w, k)] == 0.0)
            .count();
        assert_eq!(zeros, 168, "exactly 24*7 zeros in the missing block");
    }

    #[test]
    fn input_order_does_not_matter() {
        let set = VariableSet::default();
        let a = season_features("p1", 0, &four_series(), &set).unwrap();
        // BTreeMap iteration is already canonical; rebuild in another
        // insertion order to prove the layout only depends on the set.
        let mut reversed = BTreeMap::new();
        for (k, v) in four_series().into_iter().rev() {
            reversed.insert(k, v);
        }
        let b = season_features("p1", 0, &reversed, &set).unwrap();
        assert_eq!(a.values, b.values);
    }

    // --- normalization ---

    #[test]
    fn zscore_makes_train_mean_zero_std_one() {
        let mut rng = crate::rng::stream(31, "norm");
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| (0..5).map(|k| rng.gen_range(-1.0..1.0) * (k + 1) as f64 + k as f64).collect())
            .collect();
        let stats = NormStats::fit(rows.iter().map(|r| r.as_slice())).unwrap();
        let mut normed = rows.clone();
        for r in &mut normed {
            stats.apply(r);
        }
        for k in 0..5 {
            let mean: f64 = normed.iter().map(|r| r[k]).sum::<f64>() / 200.0;
            let var: f64 = normed.iter().map(|r| r[k] * r[k]).sum::<f64>() / 200.0 - mean * mean;
            assert!(mean.abs() < 1e-8, "dim {k} mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 1e-6, "dim {k} std {}", var.sqrt());
        }
    }

    #[test]
    fn constant_dimension_normalizes_to_zero() {
        let rows = vec![vec![2.0, 1.0], vec![2.0, 3.0], vec![2.0, 5.0]];
        let stats = NormStats::fit(rows.iter().map(|r| r.as_slice())).unwrap();
        let mut r = rows[0].clone();
        stats.apply(&mut r);
        assert_eq!(r[0], 0.0);
    }

    // Algebraic inverse oracle.
    #[test]
    fn apply_then_invert_roundtrips() {
        let mut rng = crate::rng::stream(32, "norm2");
        let rows: Vec<Vec<f64>> =
            (0..50).map(|_| (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
        let stats = NormStats::fit(rows.iter().map(|r| r.as_slice())).unwrap();
        for row in &rows {
            let mut v = row.clone();
            stats.apply(&mut v);
            stats.invert(&mut v);
            for (a, b) in v.iter().zip(row) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn single_row_is_rejected() {
        let rows = [vec![1.0, 2.0]];
        assert!(matches!(
            NormStats::fit(rows.iter().map(|r| r.as_slice())),
            Err(FeatureError::TooFewRows(1))
        ));
    }

    // --- vocab / one-hot ---

    fn codes(texts: &[&str]) -> Vec<CropCode> {
        texts.iter().map(|t| CropCode::parse(t).unwrap()).collect()
    }

    #[test]
    fn first_vocab_code_maps_to_first_slot() {
        let vocab = CropVocab::new(codes(&["20-00-00-00-00", "10-00-00-00-00"]), false);
        let v = crop_onehot(&CropCode::parse("10-00-00-00-00").unwrap(), &vocab).unwrap();
        assert_eq!(v, vec![1.0, 0.0]);
        assert_eq!(v.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn unknown_code_errors_unless_slot_enabled() {
        let vocab = CropVocab::new(codes(&["10-00-00-00-00"]), false);
        let stranger = CropCode::parse("99-01-00-00-00").unwrap();
        assert!(crop_onehot(&stranger, &vocab).is_err());
        let with_unknown = CropVocab::new(codes(&["10-00-00-00-00"]), true);
        let v = crop_onehot(&stranger, &with_unknown).unwrap();
        assert_eq!(v, vec![0.0, 1.0]);
    }

    // Mirrors the two-country construction: 141 and 151 codes sharing 67.
    #[test]
    fn union_vocab_of_two_countries_is_225() {
        let mut shared = Vec::new();
        for k in 0..67u32 {
            shared.push(CropCode::new([10, (k / 10 + 1) as u8, (k % 10 + 1) as u8, 0, 0]).unwrap());
        }
        let mut nl = shared.clone();
        for k in 0..74u32 {
            nl.push(CropCode::new([20, (k / 10 + 1) as u8, (k % 10 + 1) as u8, 0, 0]).unwrap());
        }
        let mut fr = shared.clone();
        for k in 0..84u32 {
            fr.push(CropCode::new([30, (k / 10 + 1) as u8, (k % 10 + 1) as u8, 0, 0]).unwrap());
        }
        assert_eq!(nl.len(), 141);
        assert_eq!(fr.len(), 151);
        let union = CropVocab::new(nl.into_iter().chain(fr), false);
        assert_eq!(union.len(), 225);
    }

    // --- crop distribution ---

    fn site(crop: &str, x: f64, y: f64, area: f64) -> ParcelSite {
        ParcelSite { crop: CropCode::parse(crop).unwrap(), x_km: x, y_km: y, area_ha: area }
    }

    #[test]
    fn single_crop_neighborhood_is_all_ones() {
        let vocab = CropVocab::new(codes(&["10-00-00-00-00", "20-00-00-00-00"]), false);
        let parcels = vec![site("10-00-00-00-00", 0.0, 0.0, 5.0), site("10-00-00-00-00", 1.0, 1.0, 3.0)];
        let d = crop_distribution(0.0, 0.0, &parcels, 10.0, &vocab).unwrap();
        assert_eq!(d.shares, vec![1.0, 0.0]);
    }

    #[test]
    fn equal_areas_split_evenly() {
        let vocab = CropVocab::new(codes(&["10-00-00-00-00", "20-00-00-00-00"]), false);
        let parcels = vec![site("10-00-00-00-00", 0.0, 0.0, 4.0), site("20-00-00-00-00", 2.0, 0.0, 4.0)];
        let d = crop_distribution(0.0, 0.0, &parcels, 10.0, &vocab).unwrap();
        assert_eq!(d.shares, vec![0.5, 0.5]);
    }

    #[test]
    fn empty_neighborhood_warns_with_zero_vector() {
        let vocab = CropVocab::new(codes(&["10-00-00-00-00"]), false);
        let parcels = vec![site("10-00-00-00-00", 100.0, 100.0, 4.0)];
        let d = crop_distribution(0.0, 0.0, &parcels, 10.0, &vocab).unwrap();
        assert!(d.empty_neighborhood);
        assert_eq!(d.shares, vec![0.0]);
    }

    // Exhaustive point-in-circle + area-sum oracle on random parcels.
    #[test]
    fn matches_brute_force_geometry_oracle() {
        let mut rng = crate::rng::stream(41, "geom");
        let vocab_codes = codes(&["10-00-00-00-00", "20-00-00-00-00", "30-00-00-00-00"]);
        let vocab = CropVocab::new(vocab_codes.clone(), false);
        let parcels: Vec<ParcelSite> = (0..50)
            .map(|_| ParcelSite {
                crop: vocab_codes[rng.gen_range(0..3)],
                x_km: rng.gen_range(-20.0..20.0),
                y_km: rng.gen_range(-20.0..20.0),
                area_ha: rng.gen_range(0.5..8.0),
            })
            .collect();
        let (cx, cy, r) = (1.5, -2.0, 10.0);
        let d = crop_distribution(cx, cy, &parcels, r, &vocab).unwrap();

        // Oracle: explicit loop with hypot and independent rounding.
        let mut area = vec![0.0f64; 3];
        for p in &parcels {
            if ((p.x_km - cx).powi(2) + (p.y_km - cy).powi(2)).sqrt() <= r {
                area[vocab.index_of(&p.crop).unwrap()] += p.area_ha;
            }
        }
        let total: f64 = area.iter().sum();
        for k in 0..3 {
            let want = (area[k] / total * 1e4).round() as i64;
            let got = (d.shares[k] * 1e4).round() as i64;
            assert_eq!(got, want, "crop {k}");
        }
    }

    #[test]
    fn shares_are_exact_multiples_of_rounding_unit() {
        let vocab = CropVocab::new(codes(&["10-00-00-00-00", "20-00-00-00-00"]), false);
        let parcels = vec![site("10-00-00-00-00", 0.0, 0.0, 1.0), site("20-00-00-00-00", 0.0, 1.0, 2.0)];
        let d = crop_distribution(0.0, 0.0, &parcels, 10.0, &vocab).unwrap();
        for s in &d.shares {
            let scaled = s / DISTRIBUTION_ROUNDING;
            assert_eq!(scaled.round() * DISTRIBUTION_ROUNDING, *s, "share {s} not a multiple");
        }
        let sum: f64 = d.shares.iter().sum();
        assert!(sum <= 1.0 + DISTRIBUTION_ROUNDING * vocab.len() as f64);
    }

    // A nonzero share below half the rounding unit must round to exact zero.
    #[test]
    fn tiny_nonzero_share_rounds_to_zero() {
        let vocab = CropVocab::new(codes(&["10-00-00-00-00", "20-00-00-00-00"]), false);
        let parcels = vec![
            site("10-00-00-00-00", 0.0, 0.0, 100000.0),
            site("20-00-00-00-00", 0.0, 1.0, 4.0), // share 4/100004 < 0.5e-4
        ];
        let d = crop_distribution(0.0, 0.0, &parcels, 10.0, &vocab).unwrap();
        assert_eq!(d.shares[1], 0.0);
        assert_eq!(d.shares[0], 1.0);
    }
}
