//! Text-attribute composition.
//!
//! Text and attribute rows pass through one shared self-attention stack
//! whose output is the mean of its block outputs. Each attribute then
//! attends over the text (`α`, normalized over text positions), giving a
//! matching vector `S_j = (Σ_k α_jk x_k) ⊙ y_j`. The text mean attends
//! over the attributes (`β`), and `Σ_j β_j S_j` is scored by an affine
//! head and softmax. A sample without attributes scores uniform.

use rand::Rng;
use sentifuse_tensor::{Binder, Tensor, Var};

use super::batch::Batch;
use super::blocks::{Init, LinearIds, SelfBlockIds};
use super::config::ModelConfig;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct TaParams {
    pub stack: Vec<SelfBlockIds>,
    /// `W₁` split into its text and attribute halves, plus `b₁`.
    pub a2t_text: LinearIds,
    pub a2t_attr: LinearIds,
    /// `W₂` halves, plus `b₂`.
    pub t2a_text: LinearIds,
    pub t2a_attr: LinearIds,
    pub head: LinearIds,
}

/// Per-sample mutual-attention weights, kept for inspection.
#[derive(Debug, Clone, Copy)]
pub struct MutualWeights<'t> {
    pub sample: usize,
    /// `[attributes × tokens]`, rows sum to 1; `None` without text.
    pub alpha: Option<Var<'t>>,
    /// `[attributes × 1]`.
    pub beta: Var<'t>,
}

impl TaParams {
    pub fn init<R: Rng>(init: &mut Init<'_, R>, cfg: &ModelConfig) -> Self {
        let d = cfg.text_dim;
        let stack = (0..cfg.ta_blocks)
            .map(|i| init.self_block(&format!("ta.stack{i}"), d, cfg.ta_heads, cfg.ffn_mult, cfg.ln_eps))
            .collect();
        Self {
            stack,
            a2t_text: init.linear("ta.a2t_text", d, 1, false),
            a2t_attr: init.linear("ta.a2t_attr", d, 1, true),
            t2a_text: init.linear("ta.t2a_text", d, 1, false),
            t2a_attr: init.linear("ta.t2a_attr", d, 1, true),
            head: init.linear("ta.head", d, 3, true),
        }
    }

    /// Runs the shared stack over stacked rows; output is the mean of the
    /// block outputs.
    pub fn self_attention_stack<'t>(
        &self,
        b: &Binder<'t, '_>,
        seq: Var<'t>,
        segments: &[std::ops::Range<usize>],
        trace: &mut Vec<Var<'t>>,
    ) -> Result<Var<'t>> {
        let mut x = seq;
        let mut total: Option<Var<'t>> = None;
        for block in &self.stack {
            x = block.forward(b, x, segments, trace)?;
            total = Some(match total {
                Some(t) => t.add(x)?,
                None => x,
            });
        }
        Ok(total.expect("stack has blocks").scale(1.0 / self.stack.len() as f64))
    }

    pub fn forward<'t>(
        &self,
        b: &Binder<'t, '_>,
        batch: &Batch,
        trace: &mut Vec<Var<'t>>,
        weights: &mut Vec<MutualWeights<'t>>,
    ) -> Result<Var<'t>> {
        let tape = b.tape();
        let uniform = tape.constant(Tensor::full(&[1, 3], 1.0 / 3.0));
        let Some(attrs) = &batch.attributes else {
            let rows = vec![uniform; batch.len];
            return Ok(Var::concat_rows(&rows)?);
        };
        let y = self.self_attention_stack(b, tape.constant(attrs.clone()), &batch.attribute_segments, trace)?;
        let x = match &batch.text {
            Some(t) => Some(self.self_attention_stack(b, tape.constant(t.clone()), &batch.text_segments, trace)?),
            None => None,
        };

        let y_a2t = self.a2t_attr.forward(b, y)?;
        let y_t2a = self.t2a_attr.forward(b, y)?;
        let text_terms = match x {
            Some(x) => Some((
                x,
                self.a2t_text.forward(b, x)?,
                self.t2a_text.forward(b, x.segment_mean(&batch.text_segments)?)?,
            )),
            None => None,
        };

        let mut matched = Vec::new();
        let mut order = Vec::with_capacity(batch.len);
        for i in 0..batch.len {
            let aseg = &batch.attribute_segments[i];
            if aseg.is_empty() {
                order.push(None);
                continue;
            }
            let (a0, na) = (aseg.start, aseg.len());
            let tseg = &batch.text_segments[i];
            let yi = y.slice_rows(a0, na)?;
            let t2a_attr = y_t2a.slice_rows(a0, na)?;
            let (v, alpha, beta) = match &text_terms {
                Some((x, sx, t2a_text)) if !tseg.is_empty() => {
                    let (t0, nt) = (tseg.start, tseg.len());
                    let xi = x.slice_rows(t0, nt)?;
                    let row = sx.slice_rows(t0, nt)?.reshape(&[1, nt])?;
                    let col = y_a2t.slice_rows(a0, na)?;
                    let alpha = Var::outer_sum(col, row)?.tanh().softmax()?;
                    let s = alpha.matmul(xi)?.mul(yi)?;
                    let logits = Var::outer_sum(t2a_attr, t2a_text.slice_rows(i, 1)?)?.tanh();
                    let beta = logits.masked_softmax(0, None)?;
                    (beta.matmul_t(s, true, false)?, Some(alpha), beta)
                }
                _ => {
                    let beta = t2a_attr.tanh().masked_softmax(0, None)?;
                    (tape.constant(Tensor::zeros(&[1, batch.text_dim])), None, beta)
                }
            };
            weights.push(MutualWeights { sample: i, alpha, beta });
            order.push(Some(matched.len()));
            matched.push(v);
        }

        let scored = if matched.is_empty() {
            None
        } else {
            Some(self.head.forward(b, Var::concat_rows(&matched)?)?.softmax()?)
        };
        let mut rows = Vec::with_capacity(batch.len);
        for o in order {
            rows.push(match (o, scored) {
                (Some(k), Some(s)) => s.slice_rows(k, 1)?,
                _ => uniform,
            });
        }
        Ok(Var::concat_rows(&rows)?)
    }
}
