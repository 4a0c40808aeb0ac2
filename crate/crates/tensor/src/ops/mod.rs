//! Differentiable operations. Each submodule adds forward constructors on
//! [`Var`](crate::Var) and the matching backward rule.

pub mod attention;
mod elementwise;
mod linalg;
mod loss;
pub use loss::cross_entropy;
pub mod norm;
mod shape;
pub mod softmax;

use crate::tape::{Node, Op};

pub(crate) fn backprop(nodes: &[Node], id: usize, g: &[f64], grads: &mut [Option<Vec<f64>>]) {
    let node = &nodes[id];
    match &node.op {
        Op::Leaf => {}
        Op::MatMul { a, b, ta, tb } => linalg::matmul_backward(nodes, *a, *b, *ta, *tb, g, grads),
        Op::Add(..)
        | Op::Sub(..)
        | Op::Mul(..)
        | Op::AddRow { .. }
        | Op::Affine { .. }
        | Op::ScaleBy { .. }
        | Op::Tanh(_)
        | Op::Sigmoid(_)
        | Op::Relu(_)
        | Op::Exp(_)
        | Op::Log(_)
        | Op::OuterSum { .. } => elementwise::backward(nodes, id, g, grads),
        Op::Softmax(spec) => softmax::backward(nodes, id, spec, g, grads),
        Op::LayerNorm(cache) => norm::backward(nodes, cache, g, grads),
        Op::ConcatRows(_)
        | Op::ConcatCols(_)
        | Op::SliceRows { .. }
        | Op::SliceCols { .. }
        | Op::GatherRows { .. }
        | Op::SegmentMean { .. }
        | Op::Reshape(_)
        | Op::Sum(_) => shape::backward(nodes, id, g, grads),
        Op::CrossEntropy { x, gold } => loss::backward(nodes, *x, gold, g, grads),
        Op::Attention(cache) => attention::backward(nodes, cache, g, grads),
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
