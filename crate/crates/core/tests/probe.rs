use cropcast_core::ingest::build_vocab;
use cropcast_core::model::{ModelSpec, Variant};
use cropcast_core::pipeline::{prepare, PrepareOptions};
use cropcast_core::synth::{gen_dataset, preset};
use cropcast_core::train::{accuracy, train_model, TrainConfig};

#[test]
fn probe_full_scale() {
    let t0 = std::time::Instant::now();
    let cfg = preset("nl-analog").unwrap(); // full 5000
    let ds = gen_dataset(&cfg);
    let vocab = build_vocab([ds.records.as_slice()], false);
    let seasons = ds.config.seasons();
    let prepared = prepare(&ds.records, &ds.taxonomy, vocab, "NL", &seasons, &PrepareOptions::default(), 42).unwrap();
    drop(ds);
    println!("prep done {:?} vocab {}", t0.elapsed(), prepared.vocab.len());

    for (stack, batch) in [(1usize, 16usize), (2, 16)] {
        for seed in [1u64, 2] {
            for variant in [Variant::InterYeMm, Variant::HierEMm] {
                let t2 = std::time::Instant::now();
                let mut spec = ModelSpec::desk_scale(variant, prepared.vocab.len(), prepared.vocab.len());
                spec.rnn_dim = 24; spec.rs_proj_dim = 24; spec.att_dim = 12; spec.stacked_lstm = stack;
                let tc = TrainConfig { batch_size: batch, max_epochs: 20, learning_rate: 3e-3, seed, ..TrainConfig::default() };
                let out = train_model(&prepared, spec, &tc).unwrap();
                let net = out.network();
                let (test, truths) = prepared.test_samples();
                let preds: Vec<usize> = test.iter().map(|s| net.predict_class(s, &prepared.stores(), 24).unwrap()).collect();
                println!("stack{stack} b{batch} s{seed} {variant}: test {:.4} val {:.4}@{} [{:?}]", accuracy(&preds, &truths), out.best_val_accuracy, out.best_epoch, t2.elapsed());
            }
        }
    }
    panic!("done {:?}", t0.elapsed());
}
