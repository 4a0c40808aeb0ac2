//! The three-branch fusion model and its baselines.

mod baselines;
mod batch;
mod blocks;
mod config;
mod ta;
mod va;
mod vt;

pub use baselines::{BaselineParams, Pooled};
pub use batch::Batch;
pub use blocks::{CrossBlockIds, FfnIds, Init, LayerNormIds, LinearIds, MhaIds, SelfBlockIds};
pub use config::{Branch, BranchSet, ModelConfig, ModelKind};
pub use ta::{MutualWeights, TaParams};
pub use va::VaParams;
pub use vt::{CrossOutputs, Direction, VtParams};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sentifuse_tensor::{Binder, ParamId, ParamStore, Tape, Var};
use serde::{Deserialize, Serialize};

use crate::encoders::EncodedPost;
use crate::error::{CoreError, Result};

/// Mini-batch size used for inference.
pub const EVAL_BATCH: usize = 32;

#[derive(Debug, Clone)]
pub enum Parts {
    Full {
        va: VaParams,
        ta: TaParams,
        vt: VtParams,
        /// Fusion logits `ω`; weights are their softmax over enabled branches.
        fusion: ParamId,
    },
    Baseline(BaselineParams),
}

/// What a checkpoint must carry to rebuild a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub config: ModelConfig,
    pub kind: ModelKind,
    pub branches: BranchSet,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub spec: ModelSpec,
    pub store: ParamStore,
    pub parts: Parts,
}

/// Everything one forward pass produces.
#[derive(Debug, Clone)]
pub struct Forward<'t> {
    /// Final scores `[n × 3]`.
    pub scores: Var<'t>,
    /// Per-branch scores of the full model, disabled branches `None`.
    pub branch_scores: [Option<Var<'t>>; 3],
    /// `[1 × 3]` fusion weights of the full model.
    pub fusion_weights: Option<Var<'t>>,
    /// Every fused attention node, for weight inspection.
    pub attention: Vec<Var<'t>>,
    pub mutual: Vec<MutualWeights<'t>>,
}

/// Fusion weights: softmax of `ω` over the enabled branches, exactly zero
/// elsewhere.
pub fn fusion_weights<'t>(omega: Var<'t>, enabled: [bool; 3]) -> Result<Var<'t>> {
    Ok(omega.reshape(&[1, 3])?.masked_softmax(1, Some(&enabled))?)
}

/// `Σ_k w_k Y_k` over the branches that have scores.
pub fn combine_scores<'t>(scores: &[Option<Var<'t>>; 3], weights: Var<'t>) -> Result<Var<'t>> {
    let mut total: Option<Var<'t>> = None;
    for (k, s) in scores.iter().enumerate() {
        let Some(s) = s else { continue };
        let w = weights.slice_cols(k, 1)?.reshape(&[1])?;
        let term = s.scale_by(w)?;
        total = Some(match total {
            Some(t) => t.add(term)?,
            None => term,
        });
    }
    total.ok_or_else(|| CoreError::Config("all branches disabled".into()))
}

/// Index of the largest score; ties go to the lower index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub scores: [f64; 3],
    pub branch_scores: [Option<[f64; 3]>; 3],
}

fn row3(v: &Var<'_>, i: usize) -> [f64; 3] {
    let t = v.value();
    let r = t.row(i);
    [r[0], r[1], r[2]]
}

impl Model {
    pub fn new(config: ModelConfig, kind: ModelKind, branches: BranchSet, seed: u64) -> Result<Self> {
        config.validate()?;
        branches.validate()?;
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut init = Init {
            store: &mut store,
            rng: &mut rng,
        };
        let parts = match BaselineParams::init(&mut init, &config, kind) {
            Some(b) => Parts::Baseline(b),
            None => Parts::Full {
                va: VaParams::init(&mut init, &config),
                ta: TaParams::init(&mut init, &config),
                vt: VtParams::init(&mut init, &config),
                fusion: init.vector("fusion.omega", 3, 0.0),
            },
        };
        Ok(Self {
            spec: ModelSpec { config, kind, branches },
            store,
            parts,
        })
    }

    /// Rebuilds the layout from `spec` and takes parameter values from
    /// `store`, which must match it name for name and shape for shape.
    pub fn from_parts(spec: ModelSpec, store: &ParamStore) -> Result<Self> {
        let mut model = Self::new(spec.config, spec.kind, spec.branches, 0)?;
        model
            .store
            .copy_from(store)
            .map_err(|e| CoreError::Config(format!("checkpoint does not match model: {e}")))?;
        Ok(model)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.spec.config
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind
    }

    pub fn forward<'t>(&self, b: &Binder<'t, '_>, batch: &Batch) -> Result<Forward<'t>> {
        let mut attention = Vec::new();
        let mut mutual = Vec::new();
        match &self.parts {
            Parts::Baseline(p) => Ok(Forward {
                scores: p.forward(b, batch)?,
                branch_scores: [None; 3],
                fusion_weights: None,
                attention,
                mutual,
            }),
            Parts::Full { va, ta, vt, fusion } => {
                let on = self.spec.branches;
                let y1 = if on.va { Some(va.forward(b, batch)?) } else { None };
                let y2 = if on.ta { Some(ta.forward(b, batch, &mut attention, &mut mutual)?) } else { None };
                let y3 = if on.vt { Some(vt.forward(b, batch, &mut attention)?) } else { None };
                let branch_scores = [y1, y2, y3];
                let weights = fusion_weights(b.var(*fusion), on.mask())?;
                Ok(Forward {
                    scores: combine_scores(&branch_scores, weights)?,
                    branch_scores,
                    fusion_weights: Some(weights),
                    attention,
                    mutual,
                })
            }
        }
    }

    /// Mean cross-entropy of the final scores and the forward record.
    pub fn loss<'t>(&self, b: &Binder<'t, '_>, batch: &Batch) -> Result<(Var<'t>, Forward<'t>)> {
        let gold = batch.gold()?;
        let fwd = self.forward(b, batch)?;
        Ok((fwd.scores.cross_entropy(&gold)?, fwd))
    }

    /// Scores for each post, evaluated in batches of [`EVAL_BATCH`].
    pub fn predict(&self, posts: &[&EncodedPost]) -> Result<Vec<Prediction>> {
        let mut out = Vec::with_capacity(posts.len());
        for chunk in posts.chunks(EVAL_BATCH) {
            let batch = Batch::new(chunk)?;
            let tape = Tape::new();
            let binder = Binder::frozen(&tape, &self.store);
            let fwd = self.forward(&binder, &batch)?;
            for i in 0..chunk.len() {
                let scores = row3(&fwd.scores, i);
                out.push(Prediction {
                    label: argmax(&scores),
                    scores,
                    branch_scores: fwd.branch_scores.map(|s| s.map(|s| row3(&s, i))),
                });
            }
        }
        Ok(out)
    }

    /// Current fusion weights of the full model.
    pub fn fusion_weights(&self) -> Option<[f64; 3]> {
        let Parts::Full { fusion, .. } = &self.parts else {
            return None;
        };
        let tape = Tape::new();
        let w = fusion_weights(tape.constant(self.store.get(*fusion).clone()), self.spec.branches.mask()).ok()?;
        Some(row3(&w, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sentifuse_tensor::Tensor;

    #[test]
    fn argmax_tie_goes_low() {
        assert_eq!(argmax(&[0.4, 0.4, 0.2]), 0);
        assert_eq!(argmax(&[0.2, 0.4, 0.4]), 1);
        assert_eq!(argmax(&[0.1, 0.2, 0.7]), 2);
    }

    fn fixed(tape: &Tape, rows: [[f64; 3]; 3], w: [f64; 3]) -> [f64; 3] {
        let scores = rows.map(|r| Some(tape.constant(Tensor::matrix(1, 3, r.to_vec()).unwrap())));
        let weights = tape.constant(Tensor::matrix(1, 3, w.to_vec()).unwrap());
        row3(&combine_scores(&scores, weights).unwrap(), 0)
    }

    #[test]
    fn combine_examples() {
        let tape = Tape::new();
        let eye = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(fixed(&tape, eye, [0.5, 0.25, 0.25]), [0.5, 0.25, 0.25]);
        assert_eq!(fixed(&tape, eye, [1.0, 0.0, 0.0]), [1.0, 0.0, 0.0]);
        let p = [0.2, 0.3, 0.5];
        let out = fixed(&tape, [p; 3], [0.1, 0.6, 0.3]);
        for k in 0..3 {
            assert!((out[k] - p[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn disabled_branch_weight_is_zero() {
        let tape = Tape::new();
        let omega = tape.constant(Tensor::vector(vec![0.3, -2.0, 1.0]).unwrap());
        let w = fusion_weights(omega, [true, false, true]).unwrap().value();
        assert_eq!(w.get(0, 1), 0.0);
        assert!((w.get(0, 0) + w.get(0, 2) - 1.0).abs() < 1e-15);
        assert!(fusion_weights(omega, [false; 3]).is_err());
    }
}
