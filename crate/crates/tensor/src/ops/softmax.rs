//! Softmax along one axis with an optional mask over that axis.
//!
//! Masked slots are exactly zero in the output and receive zero gradient.
//! A slice whose every slot is masked has no distribution and is rejected.

use crate::error::{Result, TensorError};
use crate::tape::{slot, Node, Op, Var};
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub(crate) struct SoftmaxSpec {
    pub x: usize,
    layout: SliceLayout,
    mask: Option<Vec<bool>>,
}

/// Slices of a 2-D view: `count` slices of `len` elements, slice `s`
/// element `j` at `s * outer + j * inner`.
#[derive(Debug, Clone, Copy)]
struct SliceLayout {
    count: usize,
    len: usize,
    outer: usize,
    inner: usize,
}

impl SliceLayout {
    fn for_axis(shape: &[usize], axis: usize) -> Result<Self> {
        let rank = shape.len();
        if rank > 2 || axis >= rank {
            return Err(TensorError::Contract(format!(
                "masked_softmax supports rank ≤ 2, got shape {shape:?} with axis {axis}"
            )));
        }
        let (rows, cols) = if rank == 1 {
            (1, shape[0])
        } else {
            (shape[0], shape[1])
        };
        Ok(if axis == rank - 1 {
            Self {
                count: rows,
                len: cols,
                outer: cols,
                inner: 1,
            }
        } else {
            Self {
                count: cols,
                len: rows,
                outer: 1,
                inner: cols,
            }
        })
    }

    #[inline]
    fn at(&self, s: usize, j: usize) -> usize {
        s * self.outer + j * self.inner
    }
}

impl<'t> Var<'t> {
    /// Softmax along `axis`; `mask[j] == false` removes slot `j` of every slice.
    pub fn masked_softmax(self, axis: usize, mask: Option<&[bool]>) -> Result<Var<'t>> {
        let x = self.value();
        let layout = SliceLayout::for_axis(x.shape(), axis)?;
        if let Some(m) = mask {
            if m.len() != layout.len {
                return Err(TensorError::Dimension {
                    op: "masked_softmax",
                    lhs: x.shape().to_vec(),
                    rhs: vec![m.len()],
                });
            }
            if !m.iter().any(|&keep| keep) {
                return Err(TensorError::DegenerateMask {
                    op: "masked_softmax",
                    slice: 0,
                });
            }
        }
        let keep = |j: usize| mask.map_or(true, |m| m[j]);
        let xd = x.data();
        let mut out = vec![0.0; x.numel()];
        for s in 0..layout.count {
            let max = (0..layout.len)
                .filter(|&j| keep(j))
                .map(|j| xd[layout.at(s, j)])
                .fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for j in (0..layout.len).filter(|&j| keep(j)) {
                let e = (xd[layout.at(s, j)] - max).exp();
                out[layout.at(s, j)] = e;
                total += e;
            }
            for j in (0..layout.len).filter(|&j| keep(j)) {
                out[layout.at(s, j)] /= total;
            }
        }
        Ok(self.derive(
            Tensor::new(x.shape(), out)?,
            Op::Softmax(SoftmaxSpec {
                x: self.id(),
                layout,
                mask: mask.map(<[bool]>::to_vec),
            }),
        ))
    }

    /// Unmasked softmax along the last axis.
    pub fn softmax(self) -> Result<Var<'t>> {
        let rank = self.shape().len();
        self.masked_softmax(rank - 1, None)
    }
}

pub(super) fn backward(
    nodes: &[Node],
    id: usize,
    spec: &SoftmaxSpec,
    g: &[f64],
    grads: &mut [Option<Vec<f64>>],
) {
    let y = nodes[id].value.clone();
    let yd = y.data();
    let layout = spec.layout;
    let Some(s) = slot(nodes, grads, spec.x) else {
        return;
    };
    for slice in 0..layout.count {
        let inner: f64 = (0..layout.len)
            .map(|j| {
                let k = layout.at(slice, j);
                yd[k] * g[k]
            })
            .sum();
        for j in 0..layout.len {
            if spec.mask.as_ref().is_some_and(|m| !m[j]) {
                continue;
            }
            let k = layout.at(slice, j);
            s[k] += yd[k] * (g[k] - inner);
        }
    }
}
