//! Vision-text composition: a bidirectional cross-modal Transformer.
//!
//! Regions and tokens are projected to a common width. In each direction
//! the first attention takes queries from one modality and keys/values
//! from the other, and every later block attends to the projected layer-0
//! source again. The two outputs are joined per sample along the sequence
//! axis, passed through `Z = SAtt(FC(Y)) + Y`, mean-pooled and scored.

use std::ops::Range;

use rand::Rng;
use sentifuse_tensor::{Binder, TensorError, Var};

use super::batch::Batch;
use super::blocks::{CrossBlockIds, Init, LinearIds, MhaIds, SelfBlockIds};
use super::config::ModelConfig;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Direction {
    pub initial: MhaIds,
    pub blocks: Vec<CrossBlockIds>,
}

#[derive(Debug, Clone)]
pub struct VtParams {
    pub vision_proj: LinearIds,
    pub text_proj: LinearIds,
    /// Queries from text, keys/values from vision.
    pub vision_to_text: Direction,
    /// Queries from vision, keys/values from text.
    pub text_to_vision: Direction,
    pub fc: LinearIds,
    pub head_blocks: Vec<SelfBlockIds>,
    pub head: LinearIds,
}

/// Outputs of both directions, `[Σ regions × d]` and `[Σ tokens × d]`.
#[derive(Debug, Clone, Copy)]
pub struct CrossOutputs<'t> {
    pub text_to_vision: Var<'t>,
    pub vision_to_text: Var<'t>,
}

fn pairs(q: &[Range<usize>], k: &[Range<usize>]) -> Vec<(Range<usize>, Range<usize>)> {
    q.iter().cloned().zip(k.iter().cloned()).collect()
}

impl Direction {
    fn init<R: Rng>(init: &mut Init<'_, R>, name: &str, cfg: &ModelConfig) -> Self {
        let d = cfg.vt_dim;
        Self {
            initial: init.mha(&format!("{name}.initial"), d, d, d, cfg.vt_heads),
            blocks: (0..cfg.vt_blocks)
                .map(|i| init.cross_block(&format!("{name}.block{i}"), d, cfg.vt_heads, cfg.ffn_mult, cfg.ln_eps))
                .collect(),
        }
    }

    /// `source` is the layer-0 representation of the other modality and
    /// is what every block attends to.
    pub fn forward<'t>(
        &self,
        b: &Binder<'t, '_>,
        queries: Var<'t>,
        source: Var<'t>,
        segments: &[(Range<usize>, Range<usize>)],
        trace: &mut Vec<Var<'t>>,
    ) -> Result<Var<'t>> {
        let mut y = self.initial.forward(b, queries, source, segments, trace)?;
        for block in &self.blocks {
            y = block.forward(b, y, source, segments, trace)?;
        }
        Ok(y)
    }
}

impl VtParams {
    pub fn init<R: Rng>(init: &mut Init<'_, R>, cfg: &ModelConfig) -> Self {
        let d = cfg.vt_dim;
        Self {
            vision_proj: init.linear("vt.vision_proj", cfg.vision_dim, d, true),
            text_proj: init.linear("vt.text_proj", cfg.text_dim, d, true),
            text_to_vision: Direction::init(init, "vt.t2v", cfg),
            vision_to_text: Direction::init(init, "vt.v2t", cfg),
            fc: init.linear("vt.fc", d, d, true),
            head_blocks: (0..cfg.vt_head_blocks)
                .map(|i| init.self_block(&format!("vt.head_block{i}"), d, cfg.vt_heads, cfg.ffn_mult, cfg.ln_eps))
                .collect(),
            head: init.linear("vt.head", d, 3, true),
        }
    }

    pub fn crossmodal<'t>(
        &self,
        b: &Binder<'t, '_>,
        batch: &Batch,
        trace: &mut Vec<Var<'t>>,
    ) -> Result<CrossOutputs<'t>> {
        let tape = b.tape();
        if let Some(slice) = batch.text_segments.iter().position(Range::is_empty) {
            return Err(TensorError::DegenerateMask { op: "vision_text", slice }.into());
        }
        let text = batch.text.as_ref().expect("every sample has text");
        let pv = self.vision_proj.forward(b, tape.constant(batch.regions.clone()))?;
        let pe = self.text_proj.forward(b, tape.constant(text.clone()))?;
        let t2v = pairs(&batch.region_segments, &batch.text_segments);
        let v2t = pairs(&batch.text_segments, &batch.region_segments);
        Ok(CrossOutputs {
            text_to_vision: self.text_to_vision.forward(b, pv, pe, &t2v, trace)?,
            vision_to_text: self.vision_to_text.forward(b, pe, pv, &v2t, trace)?,
        })
    }

    /// Row order of the joined sequence and its per-sample ranges: each
    /// sample's region rows, then its token rows.
    pub fn joined_layout(batch: &Batch) -> (Vec<usize>, Vec<Range<usize>>) {
        let offset = batch.regions.rows();
        let mut index = Vec::new();
        let mut segments = Vec::new();
        for (r, t) in batch.region_segments.iter().zip(&batch.text_segments) {
            let start = index.len();
            index.extend(r.clone());
            index.extend(t.clone().map(|k| k + offset));
            segments.push(start..index.len());
        }
        (index, segments)
    }

    pub fn score<'t>(
        &self,
        b: &Binder<'t, '_>,
        cross: CrossOutputs<'t>,
        batch: &Batch,
        trace: &mut Vec<Var<'t>>,
    ) -> Result<Var<'t>> {
        let (index, segments) = Self::joined_layout(batch);
        let joined = Var::concat_rows(&[cross.text_to_vision, cross.vision_to_text])?.gather_rows(&index)?;
        let mut f = self.fc.forward(b, joined)?;
        for block in &self.head_blocks {
            f = block.forward(b, f, &segments, trace)?;
        }
        let z = f.add(joined)?;
        let pooled = z.segment_mean(&segments)?;
        Ok(self.head.forward(b, pooled)?.softmax()?)
    }

    pub fn forward<'t>(&self, b: &Binder<'t, '_>, batch: &Batch, trace: &mut Vec<Var<'t>>) -> Result<Var<'t>> {
        let cross = self.crossmodal(b, batch, trace)?;
        self.score(b, cross, batch, trace)
    }
}
