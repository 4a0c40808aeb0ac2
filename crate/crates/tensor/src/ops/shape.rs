use std::ops::Range;

use crate::error::{Result, TensorError};
use crate::tape::{slot, Node, Op, Var};
use crate::tensor::Tensor;

fn dim_err(op: &'static str, lhs: &[usize], rhs: &[usize]) -> TensorError {
    TensorError::Dimension {
        op,
        lhs: lhs.to_vec(),
        rhs: rhs.to_vec(),
    }
}

/// Sum whose result does not depend on the order of `values`.
fn order_free_sum(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    values.iter().sum()
}

impl<'t> Var<'t> {
    /// Stacks matrices with equal column counts vertically.
    pub fn concat_rows(parts: &[Var<'t>]) -> Result<Var<'t>> {
        let first = parts
            .first()
            .ok_or_else(|| TensorError::Contract("concat_rows of nothing".into()))?;
        let cols = first.cols();
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            first.same_tape(p);
            let v = p.value();
            if v.cols() != cols {
                return Err(dim_err("concat_rows", first.shape().as_slice(), v.shape()));
            }
            rows += v.rows();
            data.extend_from_slice(v.data());
        }
        Ok(first.derive(
            Tensor::matrix(rows, cols, data)?,
            Op::ConcatRows(parts.iter().map(Var::id).collect()),
        ))
    }

    /// Places matrices with equal row counts side by side.
    pub fn concat_cols(parts: &[Var<'t>]) -> Result<Var<'t>> {
        let first = parts
            .first()
            .ok_or_else(|| TensorError::Contract("concat_cols of nothing".into()))?;
        let rows = first.rows();
        let values: Vec<Tensor> = parts.iter().map(Var::value).collect();
        for (p, v) in parts.iter().zip(&values) {
            first.same_tape(p);
            if v.rows() != rows {
                return Err(dim_err("concat_cols", first.shape().as_slice(), v.shape()));
            }
        }
        let cols: usize = values.iter().map(Tensor::cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for v in &values {
                data.extend_from_slice(v.row(r));
            }
        }
        Ok(first.derive(
            Tensor::matrix(rows, cols, data)?,
            Op::ConcatCols(parts.iter().map(Var::id).collect()),
        ))
    }

    pub fn slice_rows(self, start: usize, len: usize) -> Result<Var<'t>> {
        let x = self.value();
        if len == 0 || start + len > x.rows() {
            return Err(dim_err("slice_rows", x.shape(), &[start, len]));
        }
        let c = x.cols();
        let data = x.data()[start * c..(start + len) * c].to_vec();
        Ok(self.derive(
            Tensor::matrix(len, c, data)?,
            Op::SliceRows {
                x: self.id(),
                start,
            },
        ))
    }

    pub fn slice_cols(self, start: usize, len: usize) -> Result<Var<'t>> {
        let x = self.value();
        if len == 0 || start + len > x.cols() {
            return Err(dim_err("slice_cols", x.shape(), &[start, len]));
        }
        let rows = x.rows();
        let mut data = Vec::with_capacity(rows * len);
        for r in 0..rows {
            data.extend_from_slice(&x.row(r)[start..start + len]);
        }
        Ok(self.derive(
            Tensor::matrix(rows, len, data)?,
            Op::SliceCols {
                x: self.id(),
                start,
            },
        ))
    }

    /// Selects rows by index; indices may repeat.
    pub fn gather_rows(self, index: &[usize]) -> Result<Var<'t>> {
        let x = self.value();
        if index.is_empty() {
            return Err(TensorError::Contract("gather_rows with no indices".into()));
        }
        if let Some(&bad) = index.iter().find(|&&i| i >= x.rows()) {
            return Err(dim_err("gather_rows", x.shape(), &[bad]));
        }
        let c = x.cols();
        let mut data = Vec::with_capacity(index.len() * c);
        for &i in index {
            data.extend_from_slice(x.row(i));
        }
        Ok(self.derive(
            Tensor::matrix(index.len(), c, data)?,
            Op::GatherRows {
                x: self.id(),
                index: index.to_vec(),
            },
        ))
    }

    /// Mean of each row range, one output row per segment. Empty segments
    /// yield a zero row. The per-column sum is independent of row order.
    pub fn segment_mean(self, segments: &[Range<usize>]) -> Result<Var<'t>> {
        let x = self.value();
        if segments.is_empty() {
            return Err(TensorError::Contract("segment_mean with no segments".into()));
        }
        if let Some(bad) = segments.iter().find(|r| r.end > x.rows() || r.start > r.end) {
            return Err(dim_err("segment_mean", x.shape(), &[bad.start, bad.end]));
        }
        let c = x.cols();
        let mut out = vec![0.0; segments.len() * c];
        let mut column = Vec::new();
        for (s, seg) in segments.iter().enumerate() {
            if seg.is_empty() {
                continue;
            }
            let n = seg.len() as f64;
            for j in 0..c {
                column.clear();
                column.extend(seg.clone().map(|r| x.data()[r * c + j]));
                out[s * c + j] = order_free_sum(&mut column) / n;
            }
        }
        Ok(self.derive(
            Tensor::matrix(segments.len(), c, out)?,
            Op::SegmentMean {
                x: self.id(),
                segments: segments.to_vec(),
            },
        ))
    }

    /// Mean over the rows whose mask entry is true, as a `[1×c]` row.
    /// With no true entry the result is a constant zero row.
    pub fn masked_mean_rows(self, mask: &[bool]) -> Result<Var<'t>> {
        let rows = self.rows();
        if mask.len() != rows {
            return Err(dim_err("masked_mean_rows", &self.shape(), &[mask.len()]));
        }
        let keep: Vec<usize> = (0..rows).filter(|&r| mask[r]).collect();
        if keep.is_empty() {
            return Ok(self.tape().constant(Tensor::zeros(&[1, self.cols()])));
        }
        let n = keep.len();
        self.gather_rows(&keep)?.segment_mean(&[0..n])
    }

    pub fn reshape(self, shape: &[usize]) -> Result<Var<'t>> {
        let x = self.value().reshape(shape)?;
        Ok(self.derive(x, Op::Reshape(self.id())))
    }

    pub fn sum(self) -> Var<'t> {
        let total = self.value().data().iter().sum();
        self.derive(Tensor::scalar(total), Op::Sum(self.id()))
    }

    pub fn mean(self) -> Var<'t> {
        let n = self.value().numel() as f64;
        self.sum().scale(1.0 / n)
    }
}

pub(super) fn backward(nodes: &[Node], id: usize, g: &[f64], grads: &mut [Option<Vec<f64>>]) {
    let out = &nodes[id].value;
    match &nodes[id].op {
        Op::ConcatRows(ids) => {
            let mut offset = 0;
            for &p in ids {
                let n = nodes[p].value.numel();
                if let Some(s) = slot(nodes, grads, p) {
                    s.iter_mut()
                        .zip(&g[offset..offset + n])
                        .for_each(|(s, g)| *s += g);
                }
                offset += n;
            }
        }
        Op::ConcatCols(ids) => {
            let total = out.cols();
            let mut col0 = 0;
            for &p in ids {
                let c = nodes[p].value.cols();
                if let Some(s) = slot(nodes, grads, p) {
                    for (r, srow) in s.chunks_mut(c).enumerate() {
                        let grow = &g[r * total + col0..r * total + col0 + c];
                        srow.iter_mut().zip(grow).for_each(|(s, g)| *s += g);
                    }
                }
                col0 += c;
            }
        }
        Op::SliceRows { x, start } => {
            let c = out.cols();
            if let Some(s) = slot(nodes, grads, *x) {
                s[start * c..start * c + g.len()]
                    .iter_mut()
                    .zip(g)
                    .for_each(|(s, g)| *s += g);
            }
        }
        Op::SliceCols { x, start } => {
            let len = out.cols();
            let c = nodes[*x].value.cols();
            if let Some(s) = slot(nodes, grads, *x) {
                for (r, grow) in g.chunks(len).enumerate() {
                    s[r * c + start..r * c + start + len]
                        .iter_mut()
                        .zip(grow)
                        .for_each(|(s, g)| *s += g);
                }
            }
        }
        Op::GatherRows { x, index } => {
            let c = out.cols();
            if let Some(s) = slot(nodes, grads, *x) {
                for (k, &r) in index.iter().enumerate() {
                    s[r * c..(r + 1) * c]
                        .iter_mut()
                        .zip(&g[k * c..(k + 1) * c])
                        .for_each(|(s, g)| *s += g);
                }
            }
        }
        Op::SegmentMean { x, segments } => {
            let c = out.cols();
            if let Some(s) = slot(nodes, grads, *x) {
                for (k, seg) in segments.iter().enumerate() {
                    if seg.is_empty() {
                        continue;
                    }
                    let w = 1.0 / seg.len() as f64;
                    let grow = &g[k * c..(k + 1) * c];
                    for r in seg.clone() {
                        s[r * c..(r + 1) * c]
                            .iter_mut()
                            .zip(grow)
                            .for_each(|(s, g)| *s += w * g);
                    }
                }
            }
        }
        Op::Reshape(x) => {
            if let Some(s) = slot(nodes, grads, *x) {
                s.iter_mut().zip(g).for_each(|(s, g)| *s += g);
            }
        }
        Op::Sum(x) => {
            if let Some(s) = slot(nodes, grads, *x) {
                s.iter_mut().for_each(|s| *s += g[0]);
            }
        }
        _ => unreachable!("not a shape op"),
    }
}

#[cfg(test)]
mod tests {
    use crate::{Tape, Tensor, Var};

    #[test]
    fn concat_and_slice_are_inverse() {
        let tape = Tape::new();
        let a = tape.constant(Tensor::matrix(1, 2, vec![1.0, 2.0]).unwrap());
        let b = tape.constant(Tensor::matrix(2, 2, vec![3.0, 4.0, 5.0, 6.0]).unwrap());
        let c = Var::concat_rows(&[a, b]).unwrap();
        assert_eq!(c.slice_rows(1, 2).unwrap().value(), b.value());
        let d = Var::concat_cols(&[b, b]).unwrap();
        assert_eq!(d.value().row(1), &[5.0, 6.0, 5.0, 6.0]);
        assert_eq!(d.slice_cols(2, 2).unwrap().value(), b.value());
    }

    #[test]
    fn segment_mean_handles_empty_segments() {
        let tape = Tape::new();
        let x = tape.constant(Tensor::matrix(3, 1, vec![1.0, 2.0, 6.0]).unwrap());
        let m = x.segment_mean(&[0..2, 2..2, 2..3]).unwrap().value();
        assert_eq!(m.data(), &[1.5, 0.0, 6.0]);
    }

    #[test]
    fn segment_mean_is_exactly_order_free() {
        let vals = [0.1, 1e-17, 0.7, -0.3, 1e16, -1e16, 0.2];
        let tape = Tape::new();
        let a = tape.constant(Tensor::matrix(7, 1, vals.to_vec()).unwrap());
        let mut rev = vals.to_vec();
        rev.reverse();
        let b = tape.constant(Tensor::matrix(7, 1, rev).unwrap());
        let ma = a.segment_mean(&[0..7]).unwrap().value();
        let mb = b.segment_mean(&[0..7]).unwrap().value();
        assert_eq!(ma.data()[0].to_bits(), mb.data()[0].to_bits());
    }

    #[test]
    fn masked_mean_all_masked_is_zero() {
        let tape = Tape::new();
        let x = tape.var(Tensor::matrix(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap());
        let m = x.masked_mean_rows(&[false, false]).unwrap();
        assert_eq!(m.value().data(), &[0.0, 0.0]);
        let m = x.masked_mean_rows(&[false, true]).unwrap();
        assert_eq!(m.value().data(), &[3.0, 4.0]);
    }
}
