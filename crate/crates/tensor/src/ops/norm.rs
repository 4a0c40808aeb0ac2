use crate::error::{Result, TensorError};
use crate::tape::{slot, Node, Op, Var};
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub(crate) struct LayerNormCache {
    pub x: usize,
    pub gain: usize,
    pub bias: usize,
    xhat: Vec<f64>,
    inv_std: Vec<f64>,
}

impl<'t> Var<'t> {
    /// Per-row normalization to zero mean and unit (biased) variance,
    /// followed by `gain ⊙ x̂ + bias`.
    pub fn layer_norm(self, gain: Var<'t>, bias: Var<'t>, eps: f64) -> Result<Var<'t>> {
        self.same_tape(&gain);
        self.same_tape(&bias);
        let x = self.value();
        let gv = gain.value();
        let bv = bias.value();
        let d = x.cols();
        if gv.numel() != d || bv.numel() != d {
            return Err(TensorError::Dimension {
                op: "layer_norm",
                lhs: x.shape().to_vec(),
                rhs: gv.shape().to_vec(),
            });
        }
        let rows = x.rows();
        let mut xhat = vec![0.0; x.numel()];
        let mut inv_std = vec![0.0; rows];
        let mut out = vec![0.0; x.numel()];
        for r in 0..rows {
            let row = x.row(r);
            let mean = row.iter().sum::<f64>() / d as f64;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
            let inv = 1.0 / (var + eps).sqrt();
            inv_std[r] = inv;
            for j in 0..d {
                let h = (row[j] - mean) * inv;
                xhat[r * d + j] = h;
                out[r * d + j] = h * gv.data()[j] + bv.data()[j];
            }
        }
        Ok(self.derive(
            Tensor::new(x.shape(), out)?,
            Op::LayerNorm(LayerNormCache {
                x: self.id(),
                gain: gain.id(),
                bias: bias.id(),
                xhat,
                inv_std,
            }),
        ))
    }
}

pub(super) fn backward(
    nodes: &[Node],
    cache: &LayerNormCache,
    g: &[f64],
    grads: &mut [Option<Vec<f64>>],
) {
    let gain = nodes[cache.gain].value.clone();
    let d = gain.numel();
    let rows = cache.inv_std.len();

    if let Some(s) = slot(nodes, grads, cache.gain) {
        for r in 0..rows {
            for j in 0..d {
                s[j] += g[r * d + j] * cache.xhat[r * d + j];
            }
        }
    }
    if let Some(s) = slot(nodes, grads, cache.bias) {
        for row in g.chunks(d) {
            s.iter_mut().zip(row).for_each(|(s, g)| *s += g);
        }
    }
    if let Some(s) = slot(nodes, grads, cache.x) {
        let mut dxhat = vec![0.0; d];
        for r in 0..rows {
            let xh = &cache.xhat[r * d..(r + 1) * d];
            for j in 0..d {
                dxhat[j] = g[r * d + j] * gain.data()[j];
            }
            let sum: f64 = dxhat.iter().sum();
            let sum_xh: f64 = dxhat.iter().zip(xh).map(|(a, b)| a * b).sum();
            let k = cache.inv_std[r] / d as f64;
            for j in 0..d {
                s[r * d + j] += k * (d as f64 * dxhat[j] - sum - xh[j] * sum_xh);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::{Tape, Tensor};

    fn run(x: Vec<f64>, gain: Vec<f64>, bias: Vec<f64>, eps: f64) -> Tensor {
        let tape = Tape::new();
        let n = x.len();
        let x = tape.constant(Tensor::matrix(1, n, x).unwrap());
        let g = tape.constant(Tensor::vector(gain).unwrap());
        let b = tape.constant(Tensor::vector(bias).unwrap());
        x.layer_norm(g, b, eps).unwrap().value()
    }

    #[test]
    fn constant_row_maps_to_zero() {
        let y = run(vec![1.0, 1.0], vec![1.0; 2], vec![0.0; 2], 1e-5);
        assert_eq!(y.data(), &[0.0, 0.0]);
    }

    #[test]
    fn symmetric_pair_is_fixed_point() {
        let y = run(vec![1.0, -1.0], vec![1.0; 2], vec![0.0; 2], 1e-12);
        assert!((y.data()[0] - 1.0).abs() < 1e-11);
        assert!((y.data()[1] + 1.0).abs() < 1e-11);
    }

    #[test]
    fn zero_gain_broadcasts_bias() {
        let y = run(vec![3.0, -7.0, 0.5], vec![0.0; 3], vec![0.1, 0.2, 0.3], 1e-5);
        assert_eq!(y.data(), &[0.1, 0.2, 0.3]);
    }
}
