//! Trainer behaviour on small synthetic sets: convergence, determinism,
//! schedule and checkpoint round trips.

use sentifuse_core::artifacts::*;
use sentifuse_core::data::*;
use sentifuse_core::metrics::*;
use sentifuse_core::model::*;
use sentifuse_core::train::*;
use sentifuse_tensor::optim::lr_schedule;

fn strong(n: usize, seed: u64, cfg: &ModelConfig) -> Vec<PostRecord> {
    generate_with(&SynthConfig::new(n, seed, 1.0).with_vision_dim(cfg.vision_dim))
}

fn encoded(cfg: &TrainConfig, recs: &[PostRecord]) -> Vec<sentifuse_core::encoders::EncodedPost> {
    let provider = cfg.embeddings.provider(cfg.model.text_dim).unwrap();
    encode_records(recs, &provider, cfg.model.vision_dim, cfg.attribute_threshold, true).unwrap()
}

#[test]
fn schedule_steps_by_048_every_ten_epochs() {
    let cfg = TrainConfig::new(ModelConfig::desk(), 0);
    let s = cfg.schedule();
    assert_eq!(s.lr(0), 0.001);
    assert_eq!(s.lr(9), 0.001);
    assert_eq!(s.lr(10), 0.00048);
    assert_eq!(s.lr(20), 0.0002304);
    assert_eq!(lr_schedule(20), 0.0002304);
    let opt = cfg.adamw();
    assert_eq!((opt.beta1, opt.beta2), (0.55, 0.999));
}

#[test]
fn loss_moving_average_falls_over_ten_epochs() {
    let mut cfg = TrainConfig::new(ModelConfig::desk(), 2);
    cfg.epochs = 10;
    let (_, log) = train(&DatasetSplit::train_only(strong(64, 2, &cfg.model), 2), &cfg).unwrap();
    let losses: Vec<f64> = log.epochs.iter().map(|e| e.loss).collect();
    let avg: Vec<f64> = losses.windows(5).map(|w| w.iter().sum::<f64>() / 5.0).collect();
    assert!(avg.windows(2).all(|w| w[1] < w[0]), "{losses:?}");
}

/// Multiclass perceptron over concatenated pooled vision, text and
/// attribute means; it converges only on separable data.
#[test]
fn pooled_features_are_linearly_separable() {
    let cfg = TrainConfig::new(ModelConfig::desk(), 3);
    let recs = strong(64, 3, &cfg.model);
    let posts = encoded(&cfg, &recs);
    let batch = Batch::new(&posts.iter().collect::<Vec<_>>()).unwrap();
    let tape = sentifuse_tensor::Tape::new();
    let store = sentifuse_tensor::ParamStore::new();
    let pooled = Pooled::new(&sentifuse_tensor::Binder::frozen(&tape, &store), &batch).unwrap();
    let (v, t, a) = (pooled.vision.value(), pooled.text.value(), pooled.attributes.value());
    let xs: Vec<Vec<f64>> = (0..posts.len())
        .map(|i| [v.row(i), t.row(i), a.row(i), &[1.0]].concat())
        .collect();
    let golds: Vec<usize> = posts.iter().map(|p| p.label.unwrap()).collect();

    let mut w = vec![vec![0.0; xs[0].len()]; 3];
    let score = |w: &[Vec<f64>], x: &[f64]| -> Vec<f64> {
        w.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    };
    let mut separated = false;
    for _ in 0..2000 {
        let mut mistakes = 0;
        for (x, &g) in xs.iter().zip(&golds) {
            let s = score(&w, x);
            let rival = (0..3).filter(|&c| c != g).max_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap();
            if s[rival] >= s[g] {
                mistakes += 1;
                for (k, xi) in x.iter().enumerate() {
                    w[g][k] += xi;
                    w[rival][k] -= xi;
                }
            }
        }
        if mistakes == 0 {
            separated = true;
            break;
        }
    }
    assert!(separated);
}

#[test]
fn same_seed_same_run() {
    let mut cfg = TrainConfig::new(ModelConfig::tiny(), 7);
    cfg.epochs = 3;
    cfg.batch_size = 8;
    let recs = generate_with(&SynthConfig::new(60, 7, 0.7).with_vision_dim(cfg.model.vision_dim));
    let split = split_dataset(recs, 7).unwrap();
    let (a, la) = train(&split, &cfg).unwrap();
    let (b, lb) = train(&split, &cfg).unwrap();
    assert_eq!(la, lb);
    for ((na, ta), (nb, tb)) in a.store.iter().zip(b.store.iter()) {
        assert_eq!(na, nb);
        assert_eq!(ta.data(), tb.data());
    }
    cfg.seed = 8;
    let (_, lc) = train(&split, &cfg).unwrap();
    assert_ne!(la, lc);
}

#[test]
fn checkpoint_round_trip_predicts_identically() {
    let mut cfg = TrainConfig::new(ModelConfig::tiny(), 1);
    cfg.epochs = 2;
    let recs = generate_with(&SynthConfig::new(40, 1, 0.7).with_vision_dim(cfg.model.vision_dim));
    let split = split_dataset(recs.clone(), 1).unwrap();
    let (model, log) = train(&split, &cfg).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join(CHECKPOINT_FILE);
    save_model(&ckpt, &model).unwrap();
    let loaded = load_model(&ckpt).unwrap();
    assert_eq!(loaded.spec, model.spec);

    let posts = encoded(&cfg, &recs);
    let refs: Vec<_> = posts.iter().collect();
    assert_eq!(model.predict(&refs).unwrap(), loaded.predict(&refs).unwrap());

    let fp = data_fingerprint(&recs).unwrap();
    let manifest = RunManifest::new(vec!["train".into()], &cfg, &model, log, fp.clone());
    let path = dir.path().join(MANIFEST_FILE);
    manifest.save(&path).unwrap();
    let back = RunManifest::load(&path).unwrap();
    assert_eq!(back.optimizer.betas, (0.55, 0.999));
    assert_eq!(back.data_fingerprint, fp);
    assert_eq!(back.seed, 1);
}

#[test]
fn metrics_on_hand_computed_cases() {
    let golds: Vec<usize> = (0..9).map(|i| i % 3).collect();
    let r = compute_metrics(&[0; 9], &golds).unwrap();
    assert_eq!(r.accuracy, 1.0 / 3.0);
    assert_eq!(r.macro_recall, 1.0 / 3.0);
    assert_eq!(r.macro_precision, 1.0 / 9.0);
    assert_eq!(r.macro_f1, 1.0 / 6.0);

    let r = from_confusion([[5, 0, 0], [0, 3, 2], [0, 1, 4]]);
    assert_eq!(r.accuracy, 12.0 / 15.0);
    assert_eq!(r.class_accuracy, [1.0, 0.6, 0.8]);
    assert_eq!(r.samples, 15);

    let mut a = r.clone();
    let mut b = r;
    a.accuracy = 0.6;
    b.accuracy = 0.8;
    let agg = aggregate_runs(&[a, b]).unwrap();
    assert_eq!(agg[0].name, "accuracy");
    assert_eq!(agg[0].formatted(), "0.70±0.10");
}
