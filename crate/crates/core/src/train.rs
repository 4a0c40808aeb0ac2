//! Mini-batch training for the fusion model and the baselines.

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sentifuse_tensor::optim::{AdamWConfig, OptimizerState, StepSchedule};
use sentifuse_tensor::{Binder, ParamStore, Tape, TensorError};
use serde::{Deserialize, Serialize};

use crate::data::{DatasetSplit, PostRecord, ATTRIBUTE_THRESHOLD};
use crate::encoders::{encode_post, EmbeddingProvider, EncodedPost};
use crate::error::{CoreError, Result};
use crate::metrics::{compute_metrics, MetricsReport};
use crate::model::{Batch, BranchSet, Model, ModelConfig, ModelKind};

/// Where word vectors come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum EmbeddingChoice {
    /// Hash-seeded vectors for every token.
    Synthetic { seed: u64 },
    /// Three `dim N` tables concatenated; missing tokens fall back to
    /// hash-seeded vectors.
    Files { paths: Vec<PathBuf>, seed: u64 },
}

impl EmbeddingChoice {
    pub fn provider(&self, dim: usize) -> Result<EmbeddingProvider> {
        let provider = match self {
            Self::Synthetic { seed } => EmbeddingProvider::synthetic(dim, *seed)?,
            Self::Files { paths, seed } => EmbeddingProvider::from_files(paths, *seed)?,
        };
        if provider.dim() != dim {
            return Err(CoreError::Config(format!(
                "embeddings are {}-dimensional, model expects {dim}",
                provider.dim()
            )));
        }
        Ok(provider)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model: ModelConfig,
    pub kind: ModelKind,
    pub branches: BranchSet,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Permute each training sample's tokens every epoch.
    pub shuffle_tokens: bool,
    pub embeddings: EmbeddingChoice,
    pub attribute_threshold: f64,
    pub lr_base: f64,
    pub lr_factor: f64,
    pub lr_every: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    /// Stop once an epoch's running train accuracy reaches this value.
    pub stop_at_train_accuracy: Option<f64>,
    /// Stop after this many epochs without a new best validation accuracy.
    pub patience: Option<usize>,
}

impl TrainConfig {
    pub fn new(model: ModelConfig, seed: u64) -> Self {
        let schedule = StepSchedule::default();
        let adamw = AdamWConfig::default();
        Self {
            model,
            kind: ModelKind::Full,
            branches: BranchSet::all(),
            epochs: 150,
            batch_size: 32,
            seed,
            shuffle_tokens: true,
            embeddings: EmbeddingChoice::Synthetic { seed: 0 },
            attribute_threshold: ATTRIBUTE_THRESHOLD,
            lr_base: schedule.base,
            lr_factor: schedule.factor,
            lr_every: schedule.every,
            beta1: adamw.beta1,
            beta2: adamw.beta2,
            eps: adamw.eps,
            weight_decay: adamw.weight_decay,
            stop_at_train_accuracy: None,
            patience: None,
        }
    }

    pub fn schedule(&self) -> StepSchedule {
        StepSchedule {
            base: self.lr_base,
            factor: self.lr_factor,
            every: self.lr_every,
        }
    }

    pub fn adamw(&self) -> AdamWConfig {
        AdamWConfig {
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
            weight_decay: self.weight_decay,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.branches.validate()?;
        if self.batch_size == 0 {
            return Err(CoreError::Config("batch size must be positive".into()));
        }
        if self.lr_every == 0 || !(self.lr_base > 0.0) {
            return Err(CoreError::Config("learning-rate schedule must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub lr: f64,
    /// Mean training loss over the epoch's samples.
    pub loss: f64,
    /// Accuracy of the in-epoch forward passes, each made before its
    /// batch's update.
    pub train_accuracy: f64,
    pub val_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub epochs: Vec<EpochLog>,
    /// Epoch whose parameters were kept.
    pub best_epoch: usize,
    pub fusion_weights: Option<[f64; 3]>,
}

/// Encodes every record; each must carry a label when `labelled`.
pub fn encode_records(
    records: &[PostRecord],
    provider: &EmbeddingProvider,
    vision_dim: usize,
    threshold: f64,
    labelled: bool,
) -> Result<Vec<EncodedPost>> {
    records
        .iter()
        .map(|r| {
            if labelled && r.label.is_none() {
                return Err(CoreError::Record {
                    id: r.id.clone(),
                    message: "missing field `label`".into(),
                });
            }
            encode_post(r, provider, vision_dim, threshold)
        })
        .collect()
}

/// Predicted labels and the metrics against gold labels.
pub fn evaluate(model: &Model, posts: &[EncodedPost]) -> Result<(Vec<usize>, MetricsReport)> {
    let refs: Vec<&EncodedPost> = posts.iter().collect();
    let preds: Vec<usize> = model.predict(&refs)?.iter().map(|p| p.label).collect();
    let golds = posts
        .iter()
        .map(|p| p.label.ok_or_else(|| CoreError::Metrics("unlabelled sample".into())))
        .collect::<Result<Vec<_>>>()?;
    let report = compute_metrics(&preds, &golds)?;
    Ok((preds, report))
}

/// Shuffles the unmasked token rows of one sample in place.
fn permute_tokens(post: &mut EncodedPost, rng: &mut ChaCha8Rng) {
    let text = &mut post.text;
    let live: Vec<usize> = (0..text.len()).filter(|&i| text.mask[i]).collect();
    let mut order = live.clone();
    order.shuffle(rng);
    let d = text.dim;
    let old = text.data.clone();
    for (&dst, &src) in live.iter().zip(&order) {
        text.data[dst * d..(dst + 1) * d].copy_from_slice(&old[src * d..(src + 1) * d]);
    }
}

pub fn train(dataset: &DatasetSplit, config: &TrainConfig) -> Result<(Model, TrainLog)> {
    train_with(dataset, config, &mut |_| {})
}

/// As [`train`], calling `observe` after every epoch.
pub fn train_with(
    dataset: &DatasetSplit,
    config: &TrainConfig,
    observe: &mut dyn FnMut(&EpochLog),
) -> Result<(Model, TrainLog)> {
    config.validate()?;
    let provider = config.embeddings.provider(config.model.text_dim)?;
    let encode = |r: &[PostRecord]| {
        encode_records(r, &provider, config.model.vision_dim, config.attribute_threshold, true)
    };
    train_encoded(encode(&dataset.train)?, &encode(&dataset.val)?, config, observe)
}

/// Trains on already encoded samples. Keeps the parameters of the epoch
/// with the best validation accuracy, or the last epoch without a
/// validation set.
pub fn train_encoded(
    mut train: Vec<EncodedPost>,
    val: &[EncodedPost],
    config: &TrainConfig,
    observe: &mut dyn FnMut(&EpochLog),
) -> Result<(Model, TrainLog)> {
    config.validate()?;
    if train.is_empty() {
        return Err(CoreError::Config("training split is empty".into()));
    }
    if let Some(i) = train.iter().position(|p| p.label.is_none()) {
        return Err(CoreError::Config(format!("training sample {i} has no label")));
    }
    let mut model = Model::new(config.model.clone(), config.kind, config.branches, config.seed)?;
    let mut optimizer = OptimizerState::new(config.adamw(), &model.store);
    let schedule = config.schedule();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x7261_696e);
    let mut order: Vec<usize> = (0..train.len()).collect();

    let mut epochs = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, ParamStore)> = None;
    for epoch in 0..config.epochs {
        let lr = schedule.lr(epoch);
        order.shuffle(&mut rng);
        if config.shuffle_tokens {
            for post in &mut train {
                permute_tokens(post, &mut rng);
            }
        }
        let (mut loss_sum, mut correct) = (0.0, 0usize);
        for (batch_index, chunk) in order.chunks(config.batch_size).enumerate() {
            let posts: Vec<&EncodedPost> = chunk.iter().map(|&i| &train[i]).collect();
            let batch = Batch::new(&posts)?;
            let tape = Tape::new();
            let binder = Binder::new(&tape, &model.store);
            let (loss, fwd) = model.loss(&binder, &batch)?;
            let value = loss.value().data()[0];
            let diverged = |loss| CoreError::Diverged {
                epoch,
                batch: batch_index,
                loss,
            };
            if !value.is_finite() {
                return Err(diverged(value));
            }
            let scores = fwd.scores.value();
            for (k, p) in posts.iter().enumerate() {
                if crate::model::argmax(scores.row(k)) == p.label.expect("checked above") {
                    correct += 1;
                }
            }
            loss_sum += value * chunk.len() as f64;
            let mut grads = tape.backward(loss)?;
            let grads = binder.collect(&mut grads);
            match optimizer.step(&mut model.store, &grads, lr) {
                Err(TensorError::NonFiniteGradient { .. }) => return Err(diverged(value)),
                other => other?,
            }
        }
        let n = train.len() as f64;
        let val_accuracy = if val.is_empty() {
            None
        } else {
            Some(evaluate(&model, val)?.1.accuracy)
        };
        let log = EpochLog {
            epoch,
            lr,
            loss: loss_sum / n,
            train_accuracy: correct as f64 / n,
            val_accuracy,
        };
        observe(&log);
        let score = val_accuracy.unwrap_or(f64::INFINITY);
        if val_accuracy.is_none() || best.as_ref().is_none_or(|(b, _, _)| score > *b) {
            best = Some((score, epoch, model.store.clone()));
        }
        let stale = match (&best, config.patience, val_accuracy) {
            (Some((_, b, _)), Some(p), Some(_)) => epoch - b >= p,
            _ => false,
        };
        let stop = stale || config.stop_at_train_accuracy.is_some_and(|t| log.train_accuracy >= t);
        epochs.push(log);
        if stop {
            break;
        }
    }

    let best_epoch = match best {
        Some((_, epoch, store)) => {
            model.store = store;
            epoch
        }
        None => 0,
    };
    let log = TrainLog {
        epochs,
        best_epoch,
        fusion_weights: model.fusion_weights(),
    };
    Ok((model, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_with, SynthConfig};

    fn tiny_setup(n: usize) -> (Vec<EncodedPost>, TrainConfig) {
        let mut cfg = TrainConfig::new(ModelConfig::tiny(), 3);
        cfg.epochs = 2;
        cfg.batch_size = 4;
        let recs = generate_with(&SynthConfig::new(n, 1, 1.0).with_vision_dim(cfg.model.vision_dim));
        let provider = cfg.embeddings.provider(cfg.model.text_dim).unwrap();
        let enc = encode_records(&recs, &provider, cfg.model.vision_dim, 0.5, true).unwrap();
        (enc, cfg)
    }

    #[test]
    fn permute_keeps_row_multiset() {
        let (mut enc, _) = tiny_setup(1);
        let before = enc[0].text.clone();
        permute_tokens(&mut enc[0], &mut ChaCha8Rng::seed_from_u64(9));
        let rows = |t: &crate::encoders::TextEncoding| {
            let mut r: Vec<Vec<u64>> = (0..t.len()).map(|i| t.row(i).iter().map(|v| v.to_bits()).collect()).collect();
            r.sort();
            r
        };
        assert_eq!(rows(&before), rows(&enc[0].text));
    }

    #[test]
    fn log_has_one_entry_per_epoch_and_is_deterministic() {
        let (enc, cfg) = tiny_setup(10);
        let run = || train_encoded(enc.clone(), &enc[..3], &cfg, &mut |_| {}).unwrap();
        let (m1, l1) = run();
        let (m2, l2) = run();
        assert_eq!(l1.epochs.len(), 2);
        assert_eq!(l1, l2);
        for ((_, a), (_, b)) in m1.store.iter().zip(m2.store.iter()) {
            assert_eq!(a, b);
        }
        let w = l1.fusion_weights.unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_training_split_is_rejected() {
        let (_, cfg) = tiny_setup(1);
        assert!(train_encoded(Vec::new(), &[], &cfg, &mut |_| {}).is_err());
    }

    #[test]
    fn nan_input_reports_divergence() {
        let (mut enc, cfg) = tiny_setup(4);
        enc[2].vision.global[0] = f64::NAN;
        let mut regions = enc[2].vision.regions.clone();
        regions.data_mut()[0] = f64::NAN;
        enc[2].vision.regions = regions;
        let err = train_encoded(enc, &[], &cfg, &mut |_| {}).unwrap_err();
        assert!(matches!(err, CoreError::Diverged { epoch: 0, .. }), "{err}");
    }
}
