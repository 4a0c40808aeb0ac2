//! Fused multi-head scaled dot-product attention over row segments.
//!
//! Queries, keys and values are stacked row matrices. Each segment pairs a
//! range of query rows with the range of key/value rows it may attend to,
//! which lets a whole mini-batch of ragged sequences share one node.

use std::ops::Range;

use super::{axpy, dot};
use crate::error::{Result, TensorError};
use crate::tape::{slot, Node, Op, Var};
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct AttentionLayout {
    pub heads: usize,
    /// `(query rows, key rows)` per segment.
    pub segments: Vec<(Range<usize>, Range<usize>)>,
    /// `false` entries exclude the key row everywhere.
    pub key_mask: Option<Vec<bool>>,
}

impl AttentionLayout {
    /// One segment covering all `nq` queries and `nk` keys.
    pub fn single(nq: usize, nk: usize, heads: usize) -> Self {
        Self {
            heads,
            segments: vec![(0..nq, 0..nk)],
            key_mask: None,
        }
    }

    pub fn with_key_mask(mut self, mask: Vec<bool>) -> Self {
        self.key_mask = Some(mask);
        self
    }

    fn keeps(&self, key: usize) -> bool {
        self.key_mask.as_ref().map_or(true, |m| m[key])
    }
}

#[derive(Debug, Clone)]
pub(crate) struct AttentionCache {
    pub q: usize,
    pub k: usize,
    pub v: usize,
    layout: AttentionLayout,
    scale: f64,
    /// Row-major `[nq × nk]` weight blocks, one per (segment, head).
    weights: Vec<f64>,
    offsets: Vec<usize>,
}

impl<'t> Var<'t> {
    /// Scaled dot-product attention with `layout.heads` heads; the model
    /// width is split evenly across heads and scores use `1/√(width/heads)`.
    pub fn attention(q: Var<'t>, k: Var<'t>, v: Var<'t>, layout: AttentionLayout) -> Result<Var<'t>> {
        q.same_tape(&k);
        q.same_tape(&v);
        let (qv, kv, vv) = (q.value(), k.value(), v.value());
        let dm = qv.cols();
        if kv.cols() != dm || vv.cols() != dm || kv.rows() != vv.rows() {
            return Err(TensorError::Dimension {
                op: "attention",
                lhs: qv.shape().to_vec(),
                rhs: kv.shape().to_vec(),
            });
        }
        let heads = layout.heads;
        if heads == 0 || dm % heads != 0 {
            return Err(TensorError::Contract(format!(
                "{heads} heads do not divide model width {dm}"
            )));
        }
        if let Some(m) = &layout.key_mask {
            if m.len() != kv.rows() {
                return Err(TensorError::Dimension {
                    op: "attention key mask",
                    lhs: kv.shape().to_vec(),
                    rhs: vec![m.len()],
                });
            }
        }
        for (qr, kr) in &layout.segments {
            if qr.end > qv.rows() || kr.end > kv.rows() || qr.start > qr.end || kr.start > kr.end {
                return Err(TensorError::Dimension {
                    op: "attention segment",
                    lhs: vec![qv.rows(), kv.rows()],
                    rhs: vec![qr.start, qr.end, kr.start, kr.end],
                });
            }
        }

        let dh = dm / heads;
        let scale = 1.0 / (dh as f64).sqrt();
        let mut out = vec![0.0; qv.numel()];
        let mut weights = Vec::new();
        let mut offsets = Vec::with_capacity(layout.segments.len() * heads);
        let mut logits = Vec::new();

        for (s, (qr, kr)) in layout.segments.iter().enumerate() {
            let live: Vec<usize> = kr.clone().filter(|&j| layout.keeps(j)).collect();
            if !qr.is_empty() && live.is_empty() {
                return Err(TensorError::DegenerateMask {
                    op: "attention",
                    slice: s,
                });
            }
            let nk = kr.len();
            for h in 0..heads {
                offsets.push(weights.len());
                let cols = h * dh..(h + 1) * dh;
                for i in qr.clone() {
                    let qi = &qv.row(i)[cols.clone()];
                    logits.clear();
                    logits.extend(live.iter().map(|&j| scale * dot(qi, &kv.row(j)[cols.clone()])));
                    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let mut total = 0.0;
                    for l in logits.iter_mut() {
                        *l = (*l - max).exp();
                        total += *l;
                    }
                    let base = weights.len();
                    weights.resize(base + nk, 0.0);
                    let orow = &mut out[i * dm + cols.start..i * dm + cols.end];
                    for (&j, &e) in live.iter().zip(&logits) {
                        let a = e / total;
                        weights[base + (j - kr.start)] = a;
                        axpy(a, &vv.row(j)[cols.clone()], orow);
                    }
                }
            }
        }

        Ok(q.derive(
            Tensor::new(qv.shape(), out)?,
            Op::Attention(AttentionCache {
                q: q.id(),
                k: k.id(),
                v: v.id(),
                layout,
                scale,
                weights,
                offsets,
            }),
        ))
    }

    /// Attention weights of an attention node as `[segment][head]` matrices
    /// of shape `[query rows × key rows]`; segments without queries are empty.
    pub fn attention_weights(&self) -> Option<Vec<Vec<Tensor>>> {
        self.tape().with_node(self.id(), |node| match &node.op {
            Op::Attention(c) => {
                let heads = c.layout.heads;
                let mut out = Vec::new();
                for (s, (qr, kr)) in c.layout.segments.iter().enumerate() {
                    let mut per_head = Vec::new();
                    if !qr.is_empty() {
                        for h in 0..heads {
                            let off = c.offsets[s * heads + h];
                            let n = qr.len() * kr.len();
                            per_head.push(
                                Tensor::matrix(qr.len(), kr.len(), c.weights[off..off + n].to_vec())
                                    .unwrap(),
                            );
                        }
                    }
                    out.push(per_head);
                }
                Some(out)
            }
            _ => None,
        })
    }
}

pub(super) fn backward(
    nodes: &[Node],
    cache: &AttentionCache,
    g: &[f64],
    grads: &mut [Option<Vec<f64>>],
) {
    let qv = nodes[cache.q].value.clone();
    let kv = nodes[cache.k].value.clone();
    let vv = nodes[cache.v].value.clone();
    let dm = qv.cols();
    let heads = cache.layout.heads;
    let dh = dm / heads;
    let scale = cache.scale;

    let mut dq = vec![0.0; qv.numel()];
    let mut dk = vec![0.0; kv.numel()];
    let mut dv = vec![0.0; vv.numel()];
    let mut da = Vec::new();

    for (s, (qr, kr)) in cache.layout.segments.iter().enumerate() {
        if qr.is_empty() {
            continue;
        }
        let nk = kr.len();
        for h in 0..heads {
            let cols = h * dh..(h + 1) * dh;
            let off = cache.offsets[s * heads + h];
            for (ii, i) in qr.clone().enumerate() {
                let a = &cache.weights[off + ii * nk..off + (ii + 1) * nk];
                let gi = &g[i * dm + cols.start..i * dm + cols.end];
                da.clear();
                da.extend(kr.clone().map(|j| dot(gi, &vv.row(j)[cols.clone()])));
                let inner: f64 = a.iter().zip(&da).map(|(a, d)| a * d).sum();
                for (jj, j) in kr.clone().enumerate() {
                    let aij = a[jj];
                    if aij == 0.0 {
                        continue;
                    }
                    axpy(aij, gi, &mut dv[j * dm + cols.start..j * dm + cols.end]);
                    let ds = aij * (da[jj] - inner) * scale;
                    axpy(
                        ds,
                        &kv.row(j)[cols.clone()],
                        &mut dq[i * dm + cols.start..i * dm + cols.end],
                    );
                    axpy(
                        ds,
                        &qv.row(i)[cols.clone()],
                        &mut dk[j * dm + cols.start..j * dm + cols.end],
                    );
                }
            }
        }
    }

    for (id, local) in [(cache.q, dq), (cache.k, dk), (cache.v, dv)] {
        if let Some(s) = slot(nodes, grads, id) {
            s.iter_mut().zip(&local).for_each(|(s, d)| *s += d);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::AttentionLayout;
    use crate::{Tape, Tensor, Var};

    #[test]
    fn single_key_copies_value_row() {
        let tape = Tape::new();
        let q = tape.constant(Tensor::matrix(3, 4, (0..12).map(f64::from).collect()).unwrap());
        let k = tape.constant(Tensor::matrix(1, 4, vec![0.3, -0.1, 2.0, 1.0]).unwrap());
        let v = tape.constant(Tensor::matrix(1, 4, vec![1.0, 2.0, 3.0, 4.0]).unwrap());
        let o = Var::attention(q, k, v, AttentionLayout::single(3, 1, 2))
            .unwrap()
            .value();
        for r in 0..3 {
            assert_eq!(o.row(r), &[1.0, 2.0, 3.0, 4.0]);
        }
    }

    #[test]
    fn masked_key_gets_zero_weight() {
        let tape = Tape::new();
        let q = tape.constant(Tensor::matrix(2, 2, vec![1.0, 0.5, -0.2, 0.3]).unwrap());
        let kv = tape.constant(Tensor::matrix(3, 2, vec![0.1, 0.2, 0.3, 0.4, 9.0, 9.0]).unwrap());
        let layout = AttentionLayout::single(2, 3, 1).with_key_mask(vec![true, true, false]);
        let o = Var::attention(q, kv, kv, layout).unwrap();
        let w = o.attention_weights().unwrap();
        for r in 0..2 {
            assert_eq!(w[0][0].get(r, 2), 0.0);
            assert!((w[0][0].get(r, 0) + w[0][0].get(r, 1) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn all_keys_masked_is_degenerate() {
        let tape = Tape::new();
        let q = tape.constant(Tensor::zeros(&[1, 2]));
        let layout = AttentionLayout::single(1, 1, 1).with_key_mask(vec![false]);
        assert!(matches!(
            Var::attention(q, q, q, layout),
            Err(crate::TensorError::DegenerateMask { .. })
        ));
    }

    #[test]
    fn heads_must_divide_width() {
        let tape = Tape::new();
        let q = tape.constant(Tensor::zeros(&[1, 5]));
        assert!(Var::attention(q, q, q, AttentionLayout::single(1, 1, 2)).is_err());
    }

    #[test]
    fn segments_are_isolated() {
        let tape = Tape::new();
        let x = tape.constant(Tensor::matrix(3, 2, vec![1.0, 0.0, 0.0, 1.0, 5.0, 5.0]).unwrap());
        let layout = AttentionLayout {
            heads: 1,
            segments: vec![(0..2, 0..2), (2..3, 2..3)],
            key_mask: None,
        };
        let o = Var::attention(x, x, x, layout).unwrap().value();
        assert_eq!(o.row(2), &[5.0, 5.0]);
    }
}
