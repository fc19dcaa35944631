//! Stage implementations behind the subcommands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use cropcast_core::eval::{compute_metrics, confusion, early_season_curve, Focus, LevelSpec};
use cropcast_core::features::{CropVocab, NormStats};
use cropcast_core::ingest;
use cropcast_core::kernels::ParamSet;
use cropcast_core::model::{ModelSpec, Network, Variant};
use cropcast_core::pipeline::{self, PrepareOptions, Prepared};
use cropcast_core::synth;
use cropcast_core::taxonomy::CropCode;
use cropcast_core::train::{
    self, few_shot_subsets, pretrain_finetune, FewShotPlan, MAX_CUTOFF, MIN_CUTOFF,
};

use crate::config::FileConfig;
use crate::manifest::ManifestBuilder;
use crate::{EXIT_BAD_CSV, EXIT_BAD_VARIANT};

/// Maps error chains onto the documented exit codes.
pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(m) = cause.downcast_ref::<cropcast_core::model::ModelError>() {
            if matches!(m, cropcast_core::model::ModelError::UnknownVariant(_)) {
                return EXIT_BAD_VARIANT;
            }
        }
        if let Some(i) = cause.downcast_ref::<ingest::IngestError>() {
            if matches!(i, ingest::IngestError::Malformed { .. }) {
                return EXIT_BAD_CSV;
            }
        }
    }
    1
}

/// Default output root: $CROPCAST_OUT or ./out.
fn resolve_out(out: Option<PathBuf>, command: &str) -> anyhow::Result<PathBuf> {
    let dir = out.unwrap_or_else(|| {
        let root = std::env::var("CROPCAST_OUT").unwrap_or_else(|_| "out".into());
        Path::new(&root).join(command)
    });
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output dir {}", dir.display()))?;
    Ok(dir)
}

/// Side file describing a generated dataset.
#[derive(Debug, Serialize, Deserialize)]
struct DatasetInfo {
    country: String,
    seasons: Vec<u32>,
    preset: String,
    seed: u64,
}

fn read_dataset_info(data_dir: &Path) -> DatasetInfo {
    std::fs::read_to_string(data_dir.join("dataset.json"))
        .ok()
        .and_then(|text| serde_json::from_str(&text).ok())
        .unwrap_or(DatasetInfo {
            country: "NA".into(),
            seasons: Vec::new(),
            preset: "unknown".into(),
            seed: 0,
        })
}

pub fn synth(
    preset_name: &str,
    seed: u64,
    fois: Option<usize>,
    out: Option<PathBuf>,
) -> anyhow::Result<()> {
    let mut manifest = ManifestBuilder::new("synth");
    manifest.seed(seed);
    let mut cfg = synth::preset(preset_name)
        .with_context(|| format!("unknown preset {preset_name:?}; valid: {:?}", synth::preset_names()))?;
    cfg.seed = seed;
    if let Some(n) = fois {
        cfg.n_fois = n;
    }
    let out_dir = resolve_out(out, "synth")?;
    let dataset = synth::gen_dataset(&cfg);
    let seasons = cfg.seasons();

    let crops = out_dir.join("crops.csv");
    let obs = out_dir.join("observations.csv");
    let taxonomy = out_dir.join("taxonomy.csv");
    let truth = out_dir.join("truth.json");
    let info = out_dir.join("dataset.json");
    ingest::write_crops(&crops, &dataset.records)?;
    ingest::write_observations(&obs, &dataset.records, &seasons)?;
    ingest::write_taxonomy(&taxonomy, &dataset.taxonomy)?;
    std::fs::write(&truth, serde_json::to_string_pretty(&dataset.truth)?)?;
    std::fs::write(
        &info,
        serde_json::to_string_pretty(&DatasetInfo {
            country: cfg.country.clone(),
            seasons: seasons.clone(),
            preset: preset_name.to_string(),
            seed,
        })?,
    )?;

    println!(
        "synth: {} parcels x {} seasons, {} crop codes -> {}",
        dataset.records.len(),
        seasons.len(),
        cfg.crops.len(),
        out_dir.display()
    );
    for p in [&crops, &obs, &taxonomy, &truth, &info] {
        manifest.output(p);
    }
    manifest.config_text(&format!("preset={preset_name} fois={:?}", fois));
    manifest.write(&out_dir)?;
    Ok(())
}

pub fn smooth(
    data_dir: &Path,
    out: Option<PathBuf>,
    config: Option<&Path>,
    threads: usize,
) -> anyhow::Result<()> {
    let mut manifest = ManifestBuilder::new("smooth");
    let (cfg, cfg_text) = FileConfig::load(config)?;
    manifest.config_text(&cfg_text);
    let crops = data_dir.join("crops.csv");
    let obs = data_dir.join("observations.csv");
    manifest.input(&crops)?.input(&obs)?;
    let info = read_dataset_info(data_dir);
    let (records, ds_manifest) = ingest::load_dataset(&crops, &obs, &info.country)?;
    let seasons = ds_manifest.seasons.clone();
    let opts = cfg.prepare_options()?;

    let rows = if threads <= 1 {
        pipeline::smooth_dataset(&records, &seasons, &opts)?
    } else {
        smooth_parallel(&records, &seasons, &opts, threads)?
    };

    let out_dir = resolve_out(out, "smooth")?;
    let regular = out_dir.join("regular.csv");
    ingest::write_regular(&regular, &rows)?;
    println!("smooth: {} series rows -> {}", rows.len(), regular.display());
    manifest.output(&regular);
    manifest.write(&out_dir)?;
    Ok(())
}

/// Ordered fan-out over parcels; chunk results are concatenated in input
/// order, so any thread count produces identical files.
fn smooth_parallel(
    records: &[ingest::ParcelRecord],
    seasons: &[u32],
    opts: &PrepareOptions,
    threads: usize,
) -> anyhow::Result<Vec<(String, u32, cropcast_core::signal::RegularSeries)>> {
    let chunk_size = records.len().div_ceil(threads);
    let chunks: Vec<&[ingest::ParcelRecord]> = records.chunks(chunk_size.max(1)).collect();
    let mut out = Vec::new();
    let results: Vec<anyhow::Result<Vec<_>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| {
                scope.spawn(move || {
                    pipeline::smooth_dataset(chunk, seasons, opts).map_err(anyhow::Error::from)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("smoothing thread panicked")).collect()
    });
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

pub fn featurize(
    data_dir: &Path,
    work_dir: &Path,
    out: Option<PathBuf>,
    config: Option<&Path>,
) -> anyhow::Result<()> {
    let mut manifest = ManifestBuilder::new("featurize");
    let (cfg, cfg_text) = FileConfig::load(config)?;
    manifest.config_text(&cfg_text);
    let crops_path = data_dir.join("crops.csv");
    let regular_path = work_dir.join("regular.csv");
    manifest.input(&crops_path)?.input(&regular_path)?;

    let (records, seasons) = ingest::load_crops(&crops_path)?;
    let rows = ingest::read_regular(&regular_path)?;
    let opts = cfg.prepare_options()?;
    let features = pipeline::featurize_rows(&rows, &opts.variables)?;

    // Neighborhood shares against the validation (second-to-last) season.
    if seasons.len() < 3 {
        bail!("need at least 3 seasons, found {}", seasons.len());
    }
    let ref_season = seasons[seasons.len() - 2];
    let vocab = ingest::build_vocab([records.as_slice()], false);
    let sites: Vec<cropcast_core::features::ParcelSite> = records
        .iter()
        .filter_map(|r| {
            r.crops.get(&ref_season).map(|code| cropcast_core::features::ParcelSite {
                crop: *code,
                x_km: r.x_km,
                y_km: r.y_km,
                area_ha: r.area_ha,
            })
        })
        .collect();
    let mut dist_rows = Vec::new();
    for rec in &records {
        let d = cropcast_core::features::crop_distribution(
            rec.x_km,
            rec.y_km,
            &sites,
            cfg.features.radius_km,
            &vocab,
        )?;
        for (k, share) in d.shares.iter().enumerate() {
            if *share > 0.0 {
                dist_rows.push((rec.foi_id.clone(), *vocab.code_at(k).unwrap(), *share));
            }
        }
    }

    let out_dir = resolve_out(out.or(Some(work_dir.to_path_buf())), "featurize")?;
    let features_path = out_dir.join("features.csv");
    let dist_path = out_dir.join("distributions.csv");
    ingest::write_features(&features_path, &features)?;
    ingest::write_distributions(&dist_path, &dist_rows)?;
    println!(
        "featurize: {} feature rows ({}-dim), {} distribution entries",
        features.len(),
        features.first().map(|f| f.values.len()).unwrap_or(0),
        dist_rows.len()
    );
    manifest.output(&features_path).output(&dist_path);
    manifest.write(&out_dir)?;
    Ok(())
}

pub fn aggregate(
    data_dir: &Path,
    out: Option<PathBuf>,
    config: Option<&Path>,
) -> anyhow::Result<()> {
    let mut manifest = ManifestBuilder::new("aggregate");
    let (cfg, cfg_text) = FileConfig::load(config)?;
    manifest.config_text(&cfg_text);
    let crops_path = data_dir.join("crops.csv");
    let tax_path = data_dir.join("taxonomy.csv");
    manifest.input(&crops_path)?.input(&tax_path)?;

    let (records, seasons) = ingest::load_crops(&crops_path)?;
    let mut tree = ingest::read_taxonomy(&tax_path)?;
    // Counts over train + validation seasons (everything except the last).
    let counted: Vec<u32> = seasons[..seasons.len().saturating_sub(1)].to_vec();
    for rec in &records {
        for (season, code) in &rec.crops {
            if counted.contains(season) {
                tree.add_count(*code, 1);
            }
        }
    }
    let map = cropcast_core::taxonomy::aggregate_labels(&tree, cfg.features.threshold_fraction)?;

    let out_dir = resolve_out(out, "aggregate")?;
    let path = out_dir.join("aggregation.csv");
    ingest::write_aggregation(&path, &map)?;
    println!("aggregate: {} groups (threshold {:.1} parcels)", map.groups().len(), map.threshold);
    for g in map.groups() {
        println!("  {}  {}  count {}", g.code, g.name, g.count);
    }
    manifest.output(&path);
    manifest.write(&out_dir)?;
    Ok(())
}

/// Everything needed to reuse a trained model: spec, vocabulary,
/// normalization statistics.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelBundle {
    pub spec: ModelSpec,
    pub vocab_codes: Vec<String>,
    pub norm_mean: Vec<f64>,
    pub norm_std: Vec<f64>,
    pub country: String,
    pub seasons: Vec<u32>,
}

pub fn save_model(
    dir: &Path,
    spec: &ModelSpec,
    params: &ParamSet,
    prepared: &Prepared,
) -> anyhow::Result<(PathBuf, PathBuf)> {
    let ckpt = dir.join("checkpoint.bin");
    let meta = dir.join("model.json");
    let mut file = std::fs::File::create(&ckpt)?;
    params.save_checkpoint(&mut file)?;
    let bundle = ModelBundle {
        spec: spec.clone(),
        vocab_codes: prepared.vocab.codes().iter().map(|c| c.to_string()).collect(),
        norm_mean: prepared.norm.mean.clone(),
        norm_std: prepared.norm.std.clone(),
        country: prepared.country.clone(),
        seasons: prepared.seasons.clone(),
    };
    std::fs::write(&meta, serde_json::to_string_pretty(&bundle)?)?;
    Ok((ckpt, meta))
}

pub fn load_model(dir: &Path) -> anyhow::Result<(ModelBundle, ParamSet)> {
    let meta: ModelBundle =
        serde_json::from_str(&std::fs::read_to_string(dir.join("model.json"))?)?;
    let mut file = std::fs::File::open(dir.join("checkpoint.bin"))?;
    let params = ParamSet::load_checkpoint(&mut file)?;
    Ok((meta, params))
}

/// Loads data + work files into a `Prepared`, optionally forcing the
/// vocabulary and normalization from a trained bundle.
fn assemble(
    data_dir: &Path,
    work_dir: &Path,
    cfg: &FileConfig,
    seed: u64,
    vocab_override: Option<CropVocab>,
    norm_override: Option<NormStats>,
) -> anyhow::Result<Prepared> {
    let (records, seasons) = ingest::load_crops(&data_dir.join("crops.csv"))?;
    let features = ingest::read_features(&work_dir.join("features.csv"))?;
    let cd_pairs = ingest::read_distributions(&work_dir.join("distributions.csv"))?;
    let taxonomy = ingest::read_taxonomy(&data_dir.join("taxonomy.csv"))?;
    let info = read_dataset_info(data_dir);
    let vocab = vocab_override.unwrap_or_else(|| ingest::build_vocab([records.as_slice()], false));
    let opts = cfg.prepare_options()?;
    Ok(pipeline::prepare_full(
        &records,
        features,
        &taxonomy,
        vocab,
        &info.country,
        &seasons,
        &opts,
        seed,
        norm_override,
        Some(&cd_pairs),
    )?)
}

#[allow(clippy::too_many_arguments)]
pub fn train(
    data_dir: &Path,
    work_dir: &Path,
    variant_name: &str,
    out: Option<PathBuf>,
    config: Option<&Path>,
    seed: Option<u64>,
    threads: usize,
) -> anyhow::Result<()> {
    let variant = Variant::parse(variant_name)?;
    if threads > 1 {
        eprintln!("note: training runs single-threaded; --threads {threads} ignored");
    }
    let mut manifest = ManifestBuilder::new("train");
    let (cfg, cfg_text) = FileConfig::load(config)?;
    manifest.config_text(&cfg_text);
    for f in ["crops.csv"] {
        manifest.input(&data_dir.join(f))?;
    }
    for f in ["features.csv", "distributions.csv"] {
        manifest.input(&work_dir.join(f))?;
    }
    let train_cfg = cfg.train_config(seed);
    manifest.seed(train_cfg.seed);

    let prepared = assemble(data_dir, work_dir, &cfg, train_cfg.seed, None, None)?;
    let spec = cfg.model_spec(variant, prepared.vocab.len());
    let outcome = train::train_model(&prepared, spec.clone(), &train_cfg)?;

    let out_dir = resolve_out(out, "train")?;
    let (ckpt, meta) = save_model(&out_dir, &spec, &outcome.best, &prepared)?;
    let history_path = out_dir.join("history.csv");
    let rows: Vec<(usize, String, String, f64)> = outcome
        .history
        .iter()
        .map(|h| (h.epoch, h.split.clone(), h.metric.clone(), h.value))
        .collect();
    ingest::write_history(&history_path, &rows)?;
    println!(
        "train {variant_name}: best val accuracy {:.4} at epoch {} -> {}",
        outcome.best_val_accuracy,
        outcome.best_epoch,
        out_dir.display()
    );
    manifest.output(&ckpt).output(&meta).output(&history_path);
    manifest.write(&out_dir)?;
    Ok(())
}

fn parse_interest(list: Option<&str>) -> anyhow::Result<Vec<CropCode>> {
    let Some(list) = list else {
        bail!("--interest is required for the interest levels (comma-separated crop codes)")
    };
    list.split(',')
        .map(|t| CropCode::parse(t.trim()).map_err(anyhow::Error::from))
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn eval(
    data_dir: &Path,
    work_dir: &Path,
    model_dir: &Path,
    level_name: &str,
    interest: Option<&str>,
    cutoff: Option<&str>,
    out: Option<PathBuf>,
    threads: usize,
) -> anyhow::Result<()> {
    let _ = threads;
    let mut manifest = ManifestBuilder::new("eval");
    manifest.input(&model_dir.join("checkpoint.bin"))?;
    manifest.input(&work_dir.join("features.csv"))?;

    let (bundle, params) = load_model(model_dir)?;
    let cfg = FileConfig::default();
    let vocab_codes: anyhow::Result<Vec<CropCode>> = bundle
        .vocab_codes
        .iter()
        .map(|t| CropCode::parse(t).map_err(anyhow::Error::from))
        .collect();
    let vocab = CropVocab::new(vocab_codes?, false);
    let norm = NormStats { mean: bundle.norm_mean.clone(), std: bundle.norm_std.clone() };
    let prepared = assemble(data_dir, work_dir, &cfg, 1, Some(vocab), Some(norm))?;
    let net = Network::with_params(bundle.spec.clone(), params);

    // Aggregation map: from the aggregate stage when present, else rebuilt.
    let agg_path = data_dir.join("aggregation.csv");
    let aggregation = if agg_path.exists() {
        ingest::read_aggregation(&agg_path)?
    } else {
        prepared.aggregation.clone()
    };

    let level = match level_name {
        "all" => LevelSpec::all_classes("all"),
        "aggregated" => LevelSpec::aggregated("aggregated", aggregation.clone()),
        "interest" => LevelSpec {
            name: "interest".into(),
            projection: Some(aggregation.clone()),
            focus: Focus::CollapseToOthers { keep: parse_interest(interest)? },
        },
        "interest-only" => LevelSpec {
            name: "interest-only".into(),
            projection: Some(aggregation.clone()),
            focus: Focus::Subset { keep: parse_interest(interest)? },
        },
        other => bail!("unknown level {other:?}; valid: all, aggregated, interest, interest-only"),
    };

    let (samples, truth_classes) = prepared.test_samples();
    let truth: Vec<CropCode> =
        truth_classes.iter().map(|&c| prepared.class_code(c)).collect();
    let out_dir = resolve_out(out, "eval")?;

    match cutoff {
        Some("sweep") => {
            let cutoffs: Vec<usize> = (MIN_CUTOFF..=MAX_CUTOFF).collect();
            let curve = early_season_curve(&cutoffs, &truth, &level, |t| {
                train::predict_codes(&net, &prepared, &samples, t).expect("prediction failed")
            })?;
            let path = out_dir.join("curve.csv");
            let mut text = String::from("#cropcast-csv v1 curve\ncutoff,micro_f1,accuracy\n");
            for point in &curve {
                text.push_str(&format!(
                    "{},{},{}\n",
                    point.cutoff,
                    point.micro_f1,
                    point.accuracy.map(|a| a.to_string()).unwrap_or_default()
                ));
            }
            std::fs::write(&path, text)?;
            println!("eval sweep: {} cutoffs -> {}", curve.len(), path.display());
            manifest.output(&path);
        }
        other => {
            let t = match other {
                None => bundle.spec.windows,
                Some(text) => {
                    let t: usize = text.parse().context("cutoff must be a number or 'sweep'")?;
                    if !(MIN_CUTOFF..=MAX_CUTOFF).contains(&t) {
                        bail!("cutoff {t} outside {MIN_CUTOFF}..={MAX_CUTOFF}");
                    }
                    t
                }
            };
            let preds = train::predict_codes(&net, &prepared, &samples, t)?;
            let entry = compute_metrics(&truth, &preds, &level)?;
            let metrics_csv = out_dir.join("metrics.csv");
            let metrics_json = out_dir.join("metrics.json");
            let header = "level,macro_precision,macro_recall,macro_f1,accuracy,micro_f1,n_samples,n_classes";
            let row = format!(
                "{},{},{},{},{},{},{},{}",
                entry.level,
                entry.macro_precision,
                entry.macro_recall,
                entry.macro_f1,
                entry.accuracy.map(|a| a.to_string()).unwrap_or_default(),
                entry.micro_f1,
                entry.n_samples,
                entry.n_classes
            );
            std::fs::write(&metrics_csv, format!("#cropcast-csv v1 metrics\n{header}\n{row}\n"))?;
            std::fs::write(&metrics_json, serde_json::to_string_pretty(&entry)?)?;

            // Confusion over the level's projected label space.
            let (py, pp) = match &level.projection {
                Some(map) => (
                    truth.iter().map(|c| map.project(c)).collect::<Vec<_>>(),
                    preds.iter().map(|c| map.project(c)).collect::<Vec<_>>(),
                ),
                None => (truth.clone(), preds.clone()),
            };
            let mut classes: Vec<CropCode> = py.iter().chain(&pp).copied().collect();
            classes.sort();
            classes.dedup();
            let m = confusion(&py, &pp, &classes);
            let conf_path = out_dir.join("confusion.csv");
            let mut text = String::from("#cropcast-csv v1 confusion\n");
            text.push_str("true\\pred");
            for c in &m.classes {
                text.push_str(&format!(",{c}"));
            }
            text.push('\n');
            for (r, cr) in m.classes.iter().enumerate() {
                text.push_str(&cr.to_string());
                for c in 0..m.k() {
                    text.push_str(&format!(",{}", m.count(r, c)));
                }
                text.push('\n');
            }
            std::fs::write(&conf_path, text)?;

            println!(
                "eval {level_name} @cutoff {t}: accuracy {} micro-F1 {:.4} macro-F1 {:.4} ({} samples)",
                entry.accuracy.map(|a| format!("{a:.4}")).unwrap_or_else(|| "n/a".into()),
                entry.micro_f1,
                entry.macro_f1,
                entry.n_samples
            );
            manifest.output(&metrics_csv).output(&metrics_json).output(&conf_path);
        }
    }
    manifest.write(&out_dir)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn fewshot(
    source_model: &Path,
    data_dir: &Path,
    work_dir: &Path,
    exponents: &str,
    out: Option<PathBuf>,
    config: Option<&Path>,
    seed: Option<u64>,
) -> anyhow::Result<()> {
    let mut manifest = ManifestBuilder::new("fewshot");
    let (cfg, cfg_text) = FileConfig::load(config)?;
    manifest.config_text(&cfg_text);
    manifest.input(&source_model.join("checkpoint.bin"))?;

    let exps: anyhow::Result<Vec<u32>> = exponents
        .split(',')
        .map(|t| t.trim().parse::<u32>().context("bad exponent"))
        .collect();
    let exps = exps?;

    let (bundle, source_params) = load_model(source_model)?;
    let vocab_codes: anyhow::Result<Vec<CropCode>> = bundle
        .vocab_codes
        .iter()
        .map(|t| CropCode::parse(t).map_err(anyhow::Error::from))
        .collect();
    let vocab = CropVocab::new(vocab_codes?, false);

    let train_cfg = cfg.train_config(seed);
    manifest.seed(train_cfg.seed);
    // The target normalizes with its own training statistics (leak-free:
    // feature statistics need no labels); only the weights transfer.
    let prepared = assemble(data_dir, work_dir, &cfg, train_cfg.seed, Some(vocab), None)?;

    let plan = FewShotPlan { exponents: exps.clone(), seed: train_cfg.seed };
    let (samples, subsets) = few_shot_subsets(&prepared, &plan);
    let (test, truth) = prepared.test_samples();

    let out_dir = resolve_out(out, "fewshot")?;
    let mut rows = vec!["#cropcast-csv v1 fewshot".to_string(), "n,mode,accuracy".to_string()];
    for n in &exps {
        let subset = &subsets[n];
        for (mode, initial) in [
            ("pretrained", Some(source_params.clone())),
            ("scratch", None),
        ] {
            let outcome = match initial {
                Some(params) => pretrain_finetune(
                    &bundle.spec,
                    params,
                    &prepared,
                    &samples,
                    Some(subset),
                    &train_cfg,
                )?,
                None => {
                    let spec = ModelSpec { vocab_size: prepared.vocab.len(), num_classes: prepared.vocab.len(), ..bundle.spec.clone() };
                    let selected: Vec<_> = subset.iter().map(|&i| samples[i].clone()).collect();
                    train::train_with_initial(
                        &prepared,
                        spec.clone(),
                        Network::new(spec, train_cfg.seed).params,
                        &selected,
                        &train_cfg,
                    )?
                }
            };
            let net = outcome.network();
            let preds = train::predict_codes(&net, &prepared, &test, bundle.spec.windows)?;
            let truth_codes: Vec<CropCode> =
                truth.iter().map(|&c| prepared.class_code(c)).collect();
            let acc = preds.iter().zip(&truth_codes).filter(|(a, b)| a == b).count() as f64
                / truth_codes.len() as f64;
            println!("fewshot n=2^{n} {mode}: accuracy {acc:.4} ({} samples)", subset.len());
            rows.push(format!("{n},{mode},{acc}"));
        }
    }
    let path = out_dir.join("fewshot.csv");
    std::fs::write(&path, rows.join("\n") + "\n")?;
    manifest.output(&path);
    manifest.write(&out_dir)?;
    Ok(())
}
