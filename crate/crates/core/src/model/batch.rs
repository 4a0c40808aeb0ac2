//! Ragged mini-batches: the unmasked rows of every sample stacked into one
//! matrix per stream, with one row range per sample.
//!
//! Masked rows are never copied in, so nothing downstream can see them.

use std::ops::Range;

use sentifuse_tensor::Tensor;

use crate::encoders::EncodedPost;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone)]
pub struct Batch {
    pub len: usize,
    pub text_dim: usize,
    pub vision_dim: usize,
    /// `[Σ tokens × text_dim]`; `None` when no sample has text.
    pub text: Option<Tensor>,
    pub text_segments: Vec<Range<usize>>,
    /// `[Σ present attributes × text_dim]`.
    pub attributes: Option<Tensor>,
    pub attribute_segments: Vec<Range<usize>>,
    /// Attribute slot of every stacked attribute row.
    pub attribute_slots: Vec<usize>,
    /// `[len × vision_dim]`.
    pub global: Tensor,
    /// `[Σ regions × vision_dim]`, global region first in each sample.
    pub regions: Tensor,
    pub region_segments: Vec<Range<usize>>,
    pub labels: Vec<Option<usize>>,
}

fn stack(rows: Vec<f64>, count: usize, dim: usize) -> Option<Tensor> {
    (count > 0).then(|| Tensor::matrix(count, dim, rows).expect("row buffer matches count"))
}

impl Batch {
    pub fn new(posts: &[&EncodedPost]) -> Result<Batch> {
        let first = posts
            .first()
            .ok_or_else(|| CoreError::Config("empty batch".into()))?;
        let text_dim = first.text.dim;
        let vision_dim = first.vision.global.len();

        let mut text = Vec::new();
        let mut text_segments = Vec::new();
        let mut attrs = Vec::new();
        let mut attribute_segments = Vec::new();
        let mut attribute_slots = Vec::new();
        let mut global = Vec::new();
        let mut regions = Vec::new();
        let mut region_segments = Vec::new();
        let (mut nt, mut na, mut nr) = (0, 0, 0);

        for p in posts {
            if p.text.dim != text_dim || p.vision.global.len() != vision_dim {
                return Err(CoreError::Config("posts in a batch differ in width".into()));
            }
            let start = nt;
            for (i, &keep) in p.text.mask.iter().enumerate() {
                if keep {
                    text.extend_from_slice(p.text.row(i));
                    nt += 1;
                }
            }
            text_segments.push(start..nt);

            let start = na;
            for (slot, &keep) in p.attributes.mask.iter().enumerate() {
                if keep {
                    attrs.extend_from_slice(p.attributes.matrix.row(slot));
                    attribute_slots.push(slot);
                    na += 1;
                }
            }
            attribute_segments.push(start..na);

            global.extend_from_slice(&p.vision.global);
            let start = nr;
            for (i, &keep) in p.vision.mask.iter().enumerate() {
                if keep {
                    regions.extend_from_slice(p.vision.regions.row(i));
                    nr += 1;
                }
            }
            region_segments.push(start..nr);
        }

        Ok(Batch {
            len: posts.len(),
            text_dim,
            vision_dim,
            text: stack(text, nt, text_dim),
            text_segments,
            attributes: stack(attrs, na, text_dim),
            attribute_segments,
            attribute_slots,
            global: Tensor::matrix(posts.len(), vision_dim, global)?,
            regions: stack(regions, nr, vision_dim)
                .ok_or_else(|| CoreError::Config("batch without region features".into()))?,
            region_segments,
            labels: posts.iter().map(|p| p.label).collect(),
        })
    }

    /// Gold labels; errors if any sample is unlabelled.
    pub fn gold(&self) -> Result<Vec<usize>> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| CoreError::Config(format!("sample {i} of the batch has no label"))))
            .collect()
    }
}
