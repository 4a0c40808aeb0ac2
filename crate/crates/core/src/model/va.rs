//! Vision-attribute composition.
//!
//! The global image vector and the mean of the present attribute rows
//! are each projected with `tanh(Wx + b)`, then composed with a gated
//! residual: `g = σ(W_g[p_v;p_f] + b_g)`,
//! `c = g ⊙ tanh(W_j[p_v;p_f] + b_j) + (1 − g) ⊙ W_r[p_v;p_f]`,
//! and scored by an affine head and softmax.

use rand::Rng;
use sentifuse_tensor::{Binder, Tensor, Var};

use super::batch::Batch;
use super::blocks::{Init, LinearIds};
use super::config::ModelConfig;
use crate::error::Result;

#[derive(Debug, Clone, Copy)]
pub struct VaParams {
    pub vision: LinearIds,
    pub attribute: LinearIds,
    pub gate: LinearIds,
    pub joint: LinearIds,
    pub residual: LinearIds,
    pub head: LinearIds,
}

impl VaParams {
    pub fn init<R: Rng>(init: &mut Init<'_, R>, cfg: &ModelConfig) -> Self {
        let h = cfg.va_hidden;
        Self {
            vision: init.linear("va.vision", cfg.vision_dim, h, true),
            attribute: init.linear("va.attribute", cfg.text_dim, h, true),
            gate: init.linear("va.gate", 2 * h, h, true),
            joint: init.linear("va.joint", 2 * h, h, true),
            residual: init.linear("va.residual", 2 * h, h, false),
            head: init.linear("va.head", h, 3, true),
        }
    }

    /// `tanh(proj(pooled))`.
    pub fn pool_project<'t>(&self, b: &Binder<'t, '_>, proj: LinearIds, pooled: Var<'t>) -> Result<Var<'t>> {
        Ok(proj.forward(b, pooled)?.tanh())
    }

    /// The composed vector `c` for every sample.
    pub fn compose<'t>(&self, b: &Binder<'t, '_>, pv: Var<'t>, pf: Var<'t>) -> Result<Var<'t>> {
        let cat = Var::concat_cols(&[pv, pf])?;
        let g = self.gate.forward(b, cat)?.sigmoid();
        let j = self.joint.forward(b, cat)?.tanh();
        let r = self.residual.forward(b, cat)?;
        Ok(r.add(g.mul(j.sub(r)?)?)?)
    }

    pub fn score<'t>(&self, b: &Binder<'t, '_>, c: Var<'t>) -> Result<Var<'t>> {
        Ok(self.head.forward(b, c)?.softmax()?)
    }

    pub fn forward<'t>(&self, b: &Binder<'t, '_>, batch: &Batch) -> Result<Var<'t>> {
        let tape = b.tape();
        let global = tape.constant(batch.global.clone());
        let pooled_attrs = match &batch.attributes {
            Some(a) => tape.constant(a.clone()).segment_mean(&batch.attribute_segments)?,
            None => tape.constant(Tensor::zeros(&[batch.len, batch.text_dim])),
        };
        let pv = self.pool_project(b, self.vision, global)?;
        let pf = self.pool_project(b, self.attribute, pooled_attrs)?;
        let c = self.compose(b, pv, pf)?;
        self.score(b, c)
    }
}
