//! Classification metrics at several label granularities.
//!
//! Four levels are used downstream: all classes, aggregated classes, the
//! crops of interest padded with "others" and grassland (still a full
//! partition, so accuracy applies), and the crops of interest alone (a
//! strict subset, scored with micro-F1 because accuracy is undefined there).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::{AggregationMap, CropCode};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty evaluation set")]
    EmptyEvaluation,
    #[error("length mismatch: {truth} truths vs {predictions} predictions")]
    LengthMismatch { truth: usize, predictions: usize },
}

/// How labels are focused after optional aggregation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Focus {
    /// Every class kept as-is.
    All,
    /// Classes outside `keep` collapse into the "others" bucket; the label
    /// space stays a full partition so accuracy is still meaningful.
    CollapseToOthers { keep: Vec<CropCode> },
    /// Samples whose truth is outside `keep` are dropped; predictions
    /// outside `keep` count as misses. Accuracy is not defined here.
    Subset { keep: Vec<CropCode> },
}

/// One metric level: an optional aggregation projection plus a focus rule.
#[derive(Debug, Clone)]
pub struct LevelSpec {
    pub name: String,
    pub projection: Option<AggregationMap>,
    pub focus: Focus,
}

impl LevelSpec {
    pub fn all_classes(name: &str) -> Self {
        LevelSpec { name: name.into(), projection: None, focus: Focus::All }
    }

    pub fn aggregated(name: &str, map: AggregationMap) -> Self {
        LevelSpec { name: name.into(), projection: Some(map), focus: Focus::All }
    }
}

/// Metrics for one level. Macro averages run over the classes present in
/// the evaluated labels (truth or predictions); classes never seen on either
/// side do not dilute them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsEntry {
    pub level: String,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// Absent on subset levels, where it is undefined.
    pub accuracy: Option<f64>,
    pub micro_f1: f64,
    pub n_samples: usize,
    pub n_classes: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub entries: Vec<MetricsEntry>,
}

fn project_pair(
    truth: &[CropCode],
    predictions: &[CropCode],
    level: &LevelSpec,
) -> (Vec<CropCode>, Vec<CropCode>) {
    let apply = |labels: &[CropCode]| -> Vec<CropCode> {
        let projected: Vec<CropCode> = match &level.projection {
            Some(map) => labels.iter().map(|c| map.project(c)).collect(),
            None => labels.to_vec(),
        };
        match &level.focus {
            Focus::CollapseToOthers { keep } => projected
                .into_iter()
                .map(|c| if keep.contains(&c) { c } else { CropCode::OTHERS })
                .collect(),
            _ => projected,
        }
    };
    (apply(truth), apply(predictions))
}

/// Per-class true/false positive/negative tallies.
fn tally(
    truth: &[CropCode],
    predictions: &[CropCode],
) -> BTreeMap<CropCode, (u64, u64, u64)> {
    let mut t: BTreeMap<CropCode, (u64, u64, u64)> = BTreeMap::new();
    for (y, p) in truth.iter().zip(predictions) {
        if y == p {
            t.entry(*y).or_default().0 += 1;
        } else {
            t.entry(*p).or_default().1 += 1; // false positive for p
            t.entry(*y).or_default().2 += 1; // false negative for y
        }
    }
    t
}

/// Computes one level of the report.
pub fn compute_metrics(
    truth: &[CropCode],
    predictions: &[CropCode],
    level: &LevelSpec,
) -> Result<MetricsEntry, EvalError> {
    if truth.len() != predictions.len() {
        return Err(EvalError::LengthMismatch {
            truth: truth.len(),
            predictions: predictions.len(),
        });
    }
    let (mut y, mut p) = project_pair(truth, predictions, level);

    let subset = matches!(level.focus, Focus::Subset { .. });
    if let Focus::Subset { keep } = &level.focus {
        let kept: Vec<(CropCode, CropCode)> = y
            .iter()
            .zip(&p)
            .filter(|(t, _)| keep.contains(t))
            .map(|(t, q)| (*t, *q))
            .collect();
        y = kept.iter().map(|(t, _)| *t).collect();
        p = kept.iter().map(|(_, q)| *q).collect();
    }
    if y.is_empty() {
        return Err(EvalError::EmptyEvaluation);
    }

    let tallies = tally(&y, &p);
    // In subset mode only the kept classes enter the per-class averages;
    // stray predicted classes outside the subset contribute misses only.
    let classes: Vec<CropCode> = match &level.focus {
        Focus::Subset { keep } => keep
            .iter()
            .filter(|c| tallies.contains_key(c))
            .copied()
            .collect(),
        _ => tallies.keys().copied().collect(),
    };

    let mut mp = 0.0;
    let mut mr = 0.0;
    let mut mf = 0.0;
    let mut micro_tp = 0u64;
    let mut micro_fp = 0u64;
    let mut micro_fn = 0u64;
    for c in &classes {
        let (tp, fp, fnn) = *tallies.get(c).unwrap_or(&(0, 0, 0));
        let prec = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
        let rec = if tp + fnn > 0 { tp as f64 / (tp + fnn) as f64 } else { 0.0 };
        let f1 = if prec + rec > 0.0 { 2.0 * prec * rec / (prec + rec) } else { 0.0 };
        mp += prec;
        mr += rec;
        mf += f1;
        micro_tp += tp;
        micro_fp += fp;
        micro_fn += fnn;
    }
    let k = classes.len().max(1) as f64;
    let micro_p = if micro_tp + micro_fp > 0 {
        micro_tp as f64 / (micro_tp + micro_fp) as f64
    } else {
        0.0
    };
    let micro_r = if micro_tp + micro_fn > 0 {
        micro_tp as f64 / (micro_tp + micro_fn) as f64
    } else {
        0.0
    };
    let micro_f1 = if micro_p + micro_r > 0.0 {
        2.0 * micro_p * micro_r / (micro_p + micro_r)
    } else {
        0.0
    };
    let correct = y.iter().zip(&p).filter(|(a, b)| a == b).count();
    let accuracy = if subset { None } else { Some(correct as f64 / y.len() as f64) };

    Ok(MetricsEntry {
        level: level.name.clone(),
        macro_precision: mp / k,
        macro_recall: mr / k,
        macro_f1: mf / k,
        accuracy,
        micro_f1,
        n_samples: y.len(),
        n_classes: classes.len(),
    })
}

/// Row = true class, column = predicted class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<CropCode>,
    /// Row-major counts, `counts[row * k + col]`.
    pub counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn count(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.k() + col]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Percentages normalized over the predicted axis: each nonzero column
    /// sums to 100, so the diagonal cell of column c is the precision on c.
    pub fn normalized(&self) -> Vec<f64> {
        let k = self.k();
        let mut out = vec![0.0; k * k];
        for col in 0..k {
            let sum: u64 = (0..k).map(|row| self.count(row, col)).sum();
            if sum == 0 {
                continue;
            }
            for row in 0..k {
                out[row * k + col] = 100.0 * self.count(row, col) as f64 / sum as f64;
            }
        }
        out
    }
}

/// Counts confusions over a fixed class list; labels outside it are ignored.
pub fn confusion(
    truth: &[CropCode],
    predictions: &[CropCode],
    classes: &[CropCode],
) -> ConfusionMatrix {
    let index: BTreeMap<CropCode, usize> =
        classes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let k = classes.len();
    let mut counts = vec![0u64; k * k];
    for (y, p) in truth.iter().zip(predictions) {
        if let (Some(&r), Some(&c)) = (index.get(y), index.get(p)) {
            counts[r * k + c] += 1;
        }
    }
    ConfusionMatrix { classes: classes.to_vec(), counts }
}

/// One row of an early-season sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvePoint {
    pub cutoff: usize,
    pub micro_f1: f64,
    pub accuracy: Option<f64>,
    pub per_class_f1: Vec<(CropCode, f64)>,
}

/// Evaluates predictions at each cutoff; `predict_at` receives the number of
/// windows (10..=24) the test sequences are truncated to.
pub fn early_season_curve(
    cutoffs: &[usize],
    truth: &[CropCode],
    level: &LevelSpec,
    mut predict_at: impl FnMut(usize) -> Vec<CropCode>,
) -> Result<Vec<CurvePoint>, EvalError> {
    let mut curve = Vec::with_capacity(cutoffs.len());
    for &cutoff in cutoffs {
        let predictions = predict_at(cutoff);
        let entry = compute_metrics(truth, &predictions, level)?;
        let (y, p) = project_pair(truth, &predictions, level);
        let tallies = tally(&y, &p);
        let per_class_f1 = tallies
            .iter()
            .map(|(c, &(tp, fp, fnn))| {
                let prec = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
                let rec = if tp + fnn > 0 { tp as f64 / (tp + fnn) as f64 } else { 0.0 };
                let f1 = if prec + rec > 0.0 { 2.0 * prec * rec / (prec + rec) } else { 0.0 };
                (*c, f1)
            })
            .collect();
        curve.push(CurvePoint {
            cutoff,
            micro_f1: entry.micro_f1,
            accuracy: entry.accuracy,
            per_class_f1,
        });
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{aggregate_labels, TaxonomyTree};
    use rand::Rng;

    fn code(text: &str) -> CropCode {
        CropCode::parse(text).unwrap()
    }

    fn codes(texts: &[&str]) -> Vec<CropCode> {
        texts.iter().map(|t| code(t)).collect()
    }

    #[test]
    fn perfect_predictions_score_one_everywhere() {
        let y = codes(&["10-00-00-00-00", "20-00-00-00-00", "10-00-00-00-00"]);
        let m = compute_metrics(&y, &y, &LevelSpec::all_classes("all")).unwrap();
        assert_eq!(m.accuracy, Some(1.0));
        assert_eq!(m.macro_precision, 1.0);
        assert_eq!(m.macro_recall, 1.0);
        assert_eq!(m.macro_f1, 1.0);
        assert_eq!(m.micro_f1, 1.0);
    }

    #[test]
    fn single_class_constant_prediction() {
        let y = codes(&["10-00-00-00-00"; 5]);
        let m = compute_metrics(&y, &y, &LevelSpec::all_classes("all")).unwrap();
        assert_eq!(m.accuracy, Some(1.0));
        assert_eq!(m.n_classes, 1);
        assert_eq!(m.macro_f1, 1.0);
    }

    // Hand-crafted 3-class case checked against an exhaustive tally oracle.
    #[test]
    fn three_class_case_matches_tally_oracle() {
        let a = code("10-00-00-00-00");
        let b = code("20-00-00-00-00");
        let c = code("30-00-00-00-00");
        let truth = vec![a, a, a, a, b, b, b, c, c, c];
        let preds = vec![a, a, b, c, b, b, a, c, c, b];
        let m = compute_metrics(&truth, &preds, &LevelSpec::all_classes("all")).unwrap();

        // Oracle tallies, written out by hand:
        // a: tp=2 fp=1 fn=2 -> p=2/3, r=2/4
        // b: tp=2 fp=2 fn=1 -> p=2/4, r=2/3
        // c: tp=2 fp=1 fn=1 -> p=2/3, r=2/3
        let pa = 2.0 / 3.0;
        let ra = 0.5;
        let pb = 0.5;
        let rb = 2.0 / 3.0;
        let pc = 2.0 / 3.0;
        let rc = 2.0 / 3.0;
        let f = |p: f64, r: f64| 2.0 * p * r / (p + r);
        assert!((m.macro_precision - (pa + pb + pc) / 3.0).abs() < 1e-12);
        assert!((m.macro_recall - (ra + rb + rc) / 3.0).abs() < 1e-12);
        assert!((m.macro_f1 - (f(pa, ra) + f(pb, rb) + f(pc, rc)) / 3.0).abs() < 1e-12);
        assert_eq!(m.accuracy, Some(0.6));
    }

    #[test]
    fn empty_evaluation_is_an_error() {
        let err = compute_metrics(&[], &[], &LevelSpec::all_classes("all"));
        assert!(matches!(err, Err(EvalError::EmptyEvaluation)));
    }

    #[test]
    fn micro_f1_over_full_set_equals_accuracy() {
        let mut rng = crate::rng::stream(51, "micro");
        let pool = codes(&["10-00-00-00-00", "20-00-00-00-00", "30-00-00-00-00", "40-00-00-00-00"]);
        let truth: Vec<CropCode> = (0..500).map(|_| pool[rng.gen_range(0..4)]).collect();
        let preds: Vec<CropCode> = truth
            .iter()
            .map(|c| if rng.gen_bool(0.7) { *c } else { pool[rng.gen_range(0..4)] })
            .collect();
        let m = compute_metrics(&truth, &preds, &LevelSpec::all_classes("all")).unwrap();
        assert!((m.micro_f1 - m.accuracy.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn coarser_aggregation_never_reduces_accuracy() {
        let mut rng = crate::rng::stream(52, "coarser");
        let mut tree = TaxonomyTree::new();
        let leaves: Vec<CropCode> = (1..=6u8)
            .map(|k| CropCode::new([10 + k / 4, k % 4 + 1, 0, 0, 0]).unwrap())
            .collect();
        for l in &leaves {
            tree.add_count(*l, 10);
        }
        let map = aggregate_labels(&tree, 0.35).unwrap();

        let truth: Vec<CropCode> = (0..400).map(|_| leaves[rng.gen_range(0..6)]).collect();
        let preds: Vec<CropCode> = truth
            .iter()
            .map(|c| if rng.gen_bool(0.6) { *c } else { leaves[rng.gen_range(0..6)] })
            .collect();
        let fine = compute_metrics(&truth, &preds, &LevelSpec::all_classes("fine")).unwrap();
        let coarse =
            compute_metrics(&truth, &preds, &LevelSpec::aggregated("coarse", map)).unwrap();
        assert!(coarse.accuracy.unwrap() >= fine.accuracy.unwrap());
    }

    #[test]
    fn subset_level_drops_out_of_subset_truths_and_hides_accuracy() {
        let a = code("10-00-00-00-00");
        let b = code("20-00-00-00-00");
        let c = code("30-00-00-00-00");
        let truth = vec![a, a, b, c, c];
        let preds = vec![a, c, b, c, a];
        let level = LevelSpec {
            name: "interest".into(),
            projection: None,
            focus: Focus::Subset { keep: vec![a, b] },
        };
        let m = compute_metrics(&truth, &preds, &level).unwrap();
        assert_eq!(m.n_samples, 3, "the two c-truth samples are dropped");
        assert!(m.accuracy.is_none());
        // a: tp=1, fn=1 (pred c), fp=0 -> p=1, r=0.5; b: tp=1 -> p=r=1.
        // micro: tp=2, fp=0, fn=1 -> p=1, r=2/3, f1=0.8.
        assert!((m.micro_f1 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn collapse_level_keeps_full_partition() {
        let a = code("10-00-00-00-00");
        let b = code("20-00-00-00-00");
        let c = code("30-00-00-00-00");
        let truth = vec![a, b, c, c];
        let preds = vec![a, c, c, b];
        let level = LevelSpec {
            name: "interest+others".into(),
            projection: None,
            focus: Focus::CollapseToOthers { keep: vec![a] },
        };
        let m = compute_metrics(&truth, &preds, &level).unwrap();
        // b and c both collapse to others; preds b/c also collapse.
        assert_eq!(m.accuracy, Some(1.0));
        assert_eq!(m.n_classes, 2);
    }

    #[test]
    fn identity_confusion_is_diagonal() {
        let classes = codes(&["10-00-00-00-00", "20-00-00-00-00"]);
        let y = codes(&["10-00-00-00-00", "20-00-00-00-00", "10-00-00-00-00"]);
        let m = confusion(&y, &y, &classes);
        assert_eq!(m.count(0, 0), 2);
        assert_eq!(m.count(1, 1), 1);
        assert_eq!(m.count(0, 1), 0);
        assert_eq!(m.count(1, 0), 0);
    }

    #[test]
    fn normalized_columns_sum_to_100_and_diagonal_is_precision() {
        let mut rng = crate::rng::stream(53, "conf");
        let classes = codes(&["10-00-00-00-00", "20-00-00-00-00", "30-00-00-00-00", "40-00-00-00-00"]);
        let truth: Vec<CropCode> = (0..300).map(|_| classes[rng.gen_range(0..4)]).collect();
        let preds: Vec<CropCode> = truth
            .iter()
            .map(|c| if rng.gen_bool(0.5) { *c } else { classes[rng.gen_range(0..4)] })
            .collect();
        let m = confusion(&truth, &preds, &classes);
        let norm = m.normalized();
        let k = m.k();
        for col in 0..k {
            let sum: f64 = (0..k).map(|row| norm[row * k + col]).sum();
            let col_count: u64 = (0..k).map(|row| m.count(row, col)).sum();
            if col_count > 0 {
                assert!((sum - 100.0).abs() < 1e-6, "col {col} sums to {sum}");
                let tp = m.count(col, col);
                let precision = 100.0 * tp as f64 / col_count as f64;
                assert!((norm[col * k + col] - precision).abs() < 1e-9);
            }
        }
        for v in &norm {
            assert!((0.0..=100.0).contains(v));
        }
    }

    // Brute-force pair-count oracle on a random 4-class case.
    #[test]
    fn confusion_matches_pair_count_oracle() {
        let mut rng = crate::rng::stream(54, "conf2");
        let classes = codes(&["10-00-00-00-00", "20-00-00-00-00", "30-00-00-00-00", "40-00-00-00-00"]);
        let truth: Vec<CropCode> = (0..200).map(|_| classes[rng.gen_range(0..4)]).collect();
        let preds: Vec<CropCode> = (0..200).map(|_| classes[rng.gen_range(0..4)]).collect();
        let m = confusion(&truth, &preds, &classes);
        for (r, cr) in classes.iter().enumerate() {
            for (c, cc) in classes.iter().enumerate() {
                let want = truth
                    .iter()
                    .zip(&preds)
                    .filter(|(y, p)| *y == cr && *p == cc)
                    .count() as u64;
                assert_eq!(m.count(r, c), want);
            }
        }
        assert_eq!(m.total(), 200);
    }

    #[test]
    fn confusion_is_equivariant_under_relabeling() {
        let classes = codes(&["10-00-00-00-00", "20-00-00-00-00", "30-00-00-00-00"]);
        let truth = codes(&["10-00-00-00-00", "20-00-00-00-00", "30-00-00-00-00", "10-00-00-00-00"]);
        let preds = codes(&["20-00-00-00-00", "20-00-00-00-00", "10-00-00-00-00", "10-00-00-00-00"]);
        let m = confusion(&truth, &preds, &classes);
        // Permute the class order; counts must follow the permutation.
        let perm = [2usize, 0, 1];
        let permuted: Vec<CropCode> = perm.iter().map(|&i| classes[i]).collect();
        let mp = confusion(&truth, &preds, &permuted);
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(mp.count(r, c), m.count(perm[r], perm[c]));
            }
        }
    }

    #[test]
    fn curve_has_all_cutoffs_and_full_cutoff_matches_direct_eval() {
        let pool = codes(&["10-00-00-00-00", "20-00-00-00-00"]);
        let truth: Vec<CropCode> = (0..40).map(|i| pool[i % 2]).collect();
        let level = LevelSpec::all_classes("all");
        let cutoffs: Vec<usize> = (10..=24).collect();
        // Fake model: perfect at cutoff >= 20, majority class below.
        let curve = early_season_curve(&cutoffs, &truth, &level, |t| {
            if t >= 20 {
                truth.clone()
            } else {
                vec![pool[0]; truth.len()]
            }
        })
        .unwrap();
        assert_eq!(curve.len(), 15);
        let direct = compute_metrics(&truth, &truth, &level).unwrap();
        let last = curve.last().unwrap();
        assert_eq!(last.cutoff, 24);
        assert_eq!(last.micro_f1, direct.micro_f1);
        assert_eq!(last.accuracy, direct.accuracy);
        assert!(curve[0].micro_f1 < last.micro_f1);
    }
}
