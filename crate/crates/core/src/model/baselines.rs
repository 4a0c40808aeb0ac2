//! Comparison models over mean-pooled encodings: early fusion, late fusion
//! and the three unimodal heads.

use rand::Rng;
use sentifuse_tensor::{Binder, Tensor, Var};

use super::batch::Batch;
use super::blocks::{Init, LinearIds};
use super::config::{ModelConfig, ModelKind};
use crate::error::Result;

#[derive(Debug, Clone, Copy)]
pub enum BaselineParams {
    Early { head: LinearIds },
    Late { vision: LinearIds, text: LinearIds, attribute: LinearIds },
    Vision { head: LinearIds },
    Text { head: LinearIds },
    Attribute { head: LinearIds },
}

/// Mean of the region rows, text rows and attribute rows of each sample;
/// empty streams pool to zero.
#[derive(Debug, Clone, Copy)]
pub struct Pooled<'t> {
    pub vision: Var<'t>,
    pub text: Var<'t>,
    pub attributes: Var<'t>,
}

impl<'t> Pooled<'t> {
    pub fn new(b: &Binder<'t, '_>, batch: &Batch) -> Result<Self> {
        let tape = b.tape();
        let pool = |t: &Option<Tensor>, segs: &[std::ops::Range<usize>]| -> Result<Var<'t>> {
            Ok(match t {
                Some(t) => tape.constant(t.clone()).segment_mean(segs)?,
                None => tape.constant(Tensor::zeros(&[batch.len, batch.text_dim])),
            })
        };
        Ok(Self {
            vision: tape.constant(batch.regions.clone()).segment_mean(&batch.region_segments)?,
            text: pool(&batch.text, &batch.text_segments)?,
            attributes: pool(&batch.attributes, &batch.attribute_segments)?,
        })
    }
}

impl BaselineParams {
    pub fn init<R: Rng>(init: &mut Init<'_, R>, cfg: &ModelConfig, kind: ModelKind) -> Option<Self> {
        let (dv, dt) = (cfg.vision_dim, cfg.text_dim);
        Some(match kind {
            ModelKind::Full => return None,
            ModelKind::Early => Self::Early {
                head: init.linear("early.head", dv + 2 * dt, 3, true),
            },
            ModelKind::Late => Self::Late {
                vision: init.linear("late.vision", dv, 3, true),
                text: init.linear("late.text", dt, 3, true),
                attribute: init.linear("late.attribute", dt, 3, true),
            },
            ModelKind::ImageOnly => Self::Vision {
                head: init.linear("image_only.head", dv, 3, true),
            },
            ModelKind::TextOnly => Self::Text {
                head: init.linear("text_only.head", dt, 3, true),
            },
            ModelKind::AttrOnly => Self::Attribute {
                head: init.linear("attr_only.head", dt, 3, true),
            },
        })
    }

    pub fn forward<'t>(&self, b: &Binder<'t, '_>, batch: &Batch) -> Result<Var<'t>> {
        let p = Pooled::new(b, batch)?;
        let score = |head: &LinearIds, x: Var<'t>| -> Result<Var<'t>> { Ok(head.forward(b, x)?.softmax()?) };
        match self {
            Self::Early { head } => score(head, Var::concat_cols(&[p.vision, p.text, p.attributes])?),
            Self::Late { vision, text, attribute } => {
                let sum = score(vision, p.vision)?
                    .add(score(text, p.text)?)?
                    .add(score(attribute, p.attributes)?)?;
                Ok(sum.scale(1.0 / 3.0))
            }
            Self::Vision { head } => score(head, p.vision),
            Self::Text { head } => score(head, p.text),
            Self::Attribute { head } => score(head, p.attributes),
        }
    }
}
