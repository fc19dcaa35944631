//! Cross-dataset transfer: pretraining, fine-tuning, and nested few-shot
//! subsets sampled per aggregated class.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::config::TrainConfig;
use super::fit::{train_with_initial, TrainOutcome};
use super::TrainError;
use crate::kernels::ParamSet;
use crate::model::{ModelSpec, SequenceSample};
use crate::pipeline::Prepared;
use crate::rng::substream;
use crate::taxonomy::CropCode;

/// Few-shot protocol: 2^N examples per aggregated class, nested across N.
#[derive(Debug, Clone)]
pub struct FewShotPlan {
    pub exponents: Vec<u32>,
    pub seed: u64,
}

impl Default for FewShotPlan {
    fn default() -> Self {
        FewShotPlan { exponents: vec![4, 6, 8, 10], seed: 1 }
    }
}

/// Single-target training samples grouped by the aggregated class of their
/// target, shuffled once per class, then cut to per-class quotas of 2^N.
/// Smaller subsets are prefixes of larger ones, so they nest; a class with
/// fewer examples than its quota is exhausted instead.
pub fn few_shot_subsets(
    prepared: &Prepared,
    plan: &FewShotPlan,
) -> (Vec<SequenceSample>, BTreeMap<u32, Vec<usize>>) {
    let samples = prepared.train_samples(false);
    let mut by_class: BTreeMap<CropCode, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        let code = prepared.class_code(s.targets[0].1);
        let group = prepared.aggregation.project(&code);
        by_class.entry(group).or_default().push(i);
    }
    for (k, (_, indices)) in by_class.iter_mut().enumerate() {
        indices.shuffle(&mut substream(plan.seed, "fewshot", k as u64));
    }
    let mut subsets = BTreeMap::new();
    for &n in &plan.exponents {
        let quota = 1usize << n;
        let mut subset: Vec<usize> = by_class
            .values()
            .flat_map(|indices| indices.iter().take(quota).copied())
            .collect();
        subset.sort_unstable();
        subsets.insert(n, subset);
    }
    (samples, subsets)
}

/// Continues training a source-trained parameter set on the target dataset.
/// `subset` restricts training to the given single-target samples (few-shot);
/// `None` fine-tunes on the full target training split. No layers are
/// frozen. With `max_epochs = 0` this is the zero-shot path: the source
/// parameters come back untouched.
pub fn pretrain_finetune(
    source_spec: &ModelSpec,
    source_params: ParamSet,
    target: &Prepared,
    samples: &[SequenceSample],
    subset: Option<&[usize]>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    if source_spec.vocab_size != target.vocab.len() {
        return Err(TrainError::VocabMismatch {
            source_classes: source_spec.vocab_size,
            target_classes: target.vocab.len(),
        });
    }
    let selected: Vec<SequenceSample> = match subset {
        Some(idx) => idx.iter().map(|&i| samples[i].clone()).collect(),
        None => samples.to_vec(),
    };
    if cfg.max_epochs == 0 {
        // Zero-shot: evaluate as-is.
        return Ok(TrainOutcome {
            spec: source_spec.clone(),
            best: source_params.clone(),
            final_params: source_params,
            history: Vec::new(),
            best_epoch: 0,
            best_val_accuracy: 0.0,
        });
    }
    train_with_initial(target, source_spec.clone(), source_params, &selected, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::CropVocab;
    use crate::model::{FeatureStore, Variant};
    use crate::taxonomy::AggregationMap;
    use crate::train::SplitIndices;
    use std::collections::BTreeSet;

    fn toy_prepared(n: usize, n_classes: usize) -> Prepared {
        let dim = 7;
        let mut rs = FeatureStore::new(dim);
        let mut cd = FeatureStore::new(n_classes);
        let mut crop_idx = Vec::new();
        let mut rs_row = Vec::new();
        let mut cd_row = Vec::new();
        for i in 0..n {
            let class = i % n_classes;
            rs_row.push(vec![Some(rs.push(&vec![class as f64; dim])); 3]);
            crop_idx.push(vec![Some(class); 3]);
            cd_row.push(cd.push(&vec![1.0 / n_classes as f64; n_classes]));
        }
        let codes: Vec<CropCode> = (1..=n_classes)
            .map(|k| CropCode::new([k as u8 * 10, 0, 0, 0, 0]).unwrap())
            .collect();
        Prepared {
            country: "XX".into(),
            seasons: vec![2016, 2017, 2018],
            foi_ids: (0..n).map(|i| format!("p{i}")).collect(),
            vocab: CropVocab::new(codes.clone(), false),
            rs,
            cd,
            crop_idx,
            rs_row,
            cd_row,
            norm: crate::features::NormStats { mean: vec![0.0; dim], std: vec![1.0; dim] },
            aggregation: AggregationMap::identity(&codes),
            splits: SplitIndices {
                train_fois: (0..n).collect(),
                test_fois: (0..n).collect(),
                train_target_seasons: vec![1],
                val_season: 1,
                test_season: 2,
            },
        }
    }

    #[test]
    fn subsets_nest_and_respect_quotas() {
        let prepared = toy_prepared(600, 3);
        let plan = FewShotPlan { exponents: vec![4, 6, 8], seed: 7 };
        let (_samples, subsets) = few_shot_subsets(&prepared, &plan);
        let s4: BTreeSet<usize> = subsets[&4].iter().copied().collect();
        let s6: BTreeSet<usize> = subsets[&6].iter().copied().collect();
        let s8: BTreeSet<usize> = subsets[&8].iter().copied().collect();
        assert!(s4.is_subset(&s6), "2^4 subset must nest into 2^6");
        assert!(s6.is_subset(&s8));
        // 3 classes x 16 = 48 at N=4; x64 at N=6; 200 per class caps N=8.
        assert_eq!(s4.len(), 48);
        assert_eq!(s6.len(), 192);
        assert_eq!(s8.len(), 600, "class exhaustion caps the quota");
    }

    #[test]
    fn zero_shot_returns_source_parameters_untouched() {
        let prepared = toy_prepared(30, 2);
        let spec = ModelSpec {
            variant: Variant::InterYeCrop,
            vocab_size: 2,
            num_classes: 2,
            embed_dim: 3,
            rnn_dim: 4,
            rs_proj_dim: 3,
            att_dim: 2,
            stacked_lstm: 1,
            n_vars: 1,
            windows: 1,
        };
        let source = crate::model::Network::new(spec.clone(), 3);
        let samples = prepared.train_samples(false);
        let cfg = TrainConfig { max_epochs: 0, ..TrainConfig::default() };
        let out = pretrain_finetune(&spec, source.params.clone(), &prepared, &samples, None, &cfg)
            .unwrap();
        for id in source.params.ids() {
            let name = source.params.name(id);
            assert_eq!(
                source.params.arr(id).data,
                out.best.arr(out.best.id_of(name).unwrap()).data
            );
        }
        assert!(out.history.is_empty());
    }

    #[test]
    fn vocab_mismatch_is_rejected() {
        let prepared = toy_prepared(30, 3);
        let spec = ModelSpec {
            variant: Variant::InterYeCrop,
            vocab_size: 2,
            num_classes: 2,
            embed_dim: 3,
            rnn_dim: 4,
            rs_proj_dim: 3,
            att_dim: 2,
            stacked_lstm: 1,
            n_vars: 1,
            windows: 1,
        };
        let source = crate::model::Network::new(spec.clone(), 3);
        let samples = prepared.train_samples(false);
        let err = pretrain_finetune(
            &spec,
            source.params,
            &prepared,
            &samples,
            None,
            &TrainConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            TrainError::VocabMismatch { source_classes: 2, target_classes: 3 }
        ));
    }
}
