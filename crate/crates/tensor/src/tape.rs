//! Define-by-run computation graph and reverse-mode sweep.
//!
//! Every operation on a [`Var`] appends a node to its [`Tape`]. Nodes are
//! only ever appended, so insertion order is a topological order and the
//! backward pass is a single reverse scan.

use std::cell::RefCell;
use std::ops::Range;

use crate::error::{Result, TensorError};
use crate::ops;
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub(crate) enum Op {
    Leaf,
    MatMul { a: usize, b: usize, ta: bool, tb: bool },
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    AddRow { x: usize, bias: usize },
    Affine { x: usize, scale: f64 },
    ScaleBy { x: usize, s: usize },
    Tanh(usize),
    Sigmoid(usize),
    Relu(usize),
    Exp(usize),
    Log(usize),
    Softmax(ops::softmax::SoftmaxSpec),
    LayerNorm(ops::norm::LayerNormCache),
    ConcatRows(Vec<usize>),
    ConcatCols(Vec<usize>),
    SliceRows { x: usize, start: usize },
    SliceCols { x: usize, start: usize },
    GatherRows { x: usize, index: Vec<usize> },
    SegmentMean { x: usize, segments: Vec<Range<usize>> },
    Reshape(usize),
    Sum(usize),
    CrossEntropy { x: usize, gold: Vec<usize> },
    OuterSum { col: usize, row: usize },
    Attention(ops::attention::AttentionCache),
}

impl Op {
    pub(crate) fn kind(&self) -> &'static str {
        match self {
            Op::Leaf => "leaf",
            Op::MatMul { .. } => "matmul",
            Op::Add(..) => "add",
            Op::Sub(..) => "sub",
            Op::Mul(..) => "mul",
            Op::AddRow { .. } => "add_row",
            Op::Affine { .. } => "affine",
            Op::ScaleBy { .. } => "scale_by",
            Op::Tanh(_) => "tanh",
            Op::Sigmoid(_) => "sigmoid",
            Op::Relu(_) => "relu",
            Op::Exp(_) => "exp",
            Op::Log(_) => "log",
            Op::Softmax(_) => "masked_softmax",
            Op::LayerNorm(_) => "layer_norm",
            Op::ConcatRows(_) => "concat_rows",
            Op::ConcatCols(_) => "concat_cols",
            Op::SliceRows { .. } => "slice_rows",
            Op::SliceCols { .. } => "slice_cols",
            Op::GatherRows { .. } => "gather_rows",
            Op::SegmentMean { .. } => "segment_mean",
            Op::Reshape(_) => "reshape",
            Op::Sum(_) => "sum",
            Op::CrossEntropy { .. } => "cross_entropy",
            Op::OuterSum { .. } => "outer_sum",
            Op::Attention(_) => "attention",
        }
    }

    pub(crate) fn inputs(&self) -> Vec<usize> {
        match self {
            Op::Leaf => vec![],
            Op::MatMul { a, b, .. } => vec![*a, *b],
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) => vec![*a, *b],
            Op::AddRow { x, bias } => vec![*x, *bias],
            Op::ScaleBy { x, s } => vec![*x, *s],
            Op::Affine { x, .. }
            | Op::SliceRows { x, .. }
            | Op::SliceCols { x, .. }
            | Op::GatherRows { x, .. }
            | Op::SegmentMean { x, .. }
            | Op::CrossEntropy { x, .. } => vec![*x],
            Op::Tanh(x)
            | Op::Sigmoid(x)
            | Op::Relu(x)
            | Op::Exp(x)
            | Op::Log(x)
            | Op::Reshape(x)
            | Op::Sum(x) => vec![*x],
            Op::Softmax(spec) => vec![spec.x],
            Op::LayerNorm(c) => vec![c.x, c.gain, c.bias],
            Op::ConcatRows(ids) | Op::ConcatCols(ids) => ids.clone(),
            Op::OuterSum { col, row } => vec![*col, *row],
            Op::Attention(c) => vec![c.q, c.k, c.v],
        }
    }
}

pub(crate) struct Node {
    pub value: Tensor,
    pub op: Op,
    pub needs_grad: bool,
}

/// One forward-op record as exposed for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: usize,
    pub kind: &'static str,
    pub inputs: Vec<usize>,
}

/// Append-only record of a forward computation.
#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    id: usize,
}

impl std::fmt::Debug for Var<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Var#{}{:?}", self.id, self.shape())
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    /// Differentiable leaf.
    pub fn var(&self, value: Tensor) -> Var<'_> {
        self.push(value, Op::Leaf, true)
    }

    /// Non-differentiable leaf.
    pub fn constant(&self, value: Tensor) -> Var<'_> {
        self.push(value, Op::Leaf, false)
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The recorded graph in topological (insertion) order.
    pub fn records(&self) -> Vec<NodeRecord> {
        self.nodes
            .borrow()
            .iter()
            .enumerate()
            .map(|(id, n)| NodeRecord {
                id,
                kind: n.op.kind(),
                inputs: n.op.inputs(),
            })
            .collect()
    }

    pub(crate) fn push(&self, value: Tensor, op: Op, needs_grad: bool) -> Var<'_> {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node {
            value,
            op,
            needs_grad,
        });
        Var {
            tape: self,
            id: nodes.len() - 1,
        }
    }

    pub(crate) fn value(&self, id: usize) -> Tensor {
        self.nodes.borrow()[id].value.clone()
    }

    pub(crate) fn needs_grad(&self, id: usize) -> bool {
        self.nodes.borrow()[id].needs_grad
    }

    pub(crate) fn with_node<R>(&self, id: usize, f: impl FnOnce(&Node) -> R) -> R {
        f(&self.nodes.borrow()[id])
    }

    /// Reverse sweep from a scalar node.
    pub fn backward(&self, loss: Var<'_>) -> Result<Gradients> {
        assert!(std::ptr::eq(loss.tape, self), "loss belongs to another tape");
        let nodes = self.nodes.borrow();
        let root = &nodes[loss.id];
        if root.value.numel() != 1 {
            return Err(TensorError::Contract(format!(
                "backward needs a scalar loss, got shape {:?}",
                root.value.shape()
            )));
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; nodes.len()];
        if !root.needs_grad {
            return Ok(Gradients { grads });
        }
        grads[loss.id] = Some(vec![1.0]);
        for id in (0..=loss.id).rev() {
            let node = &nodes[id];
            if !node.needs_grad || matches!(node.op, Op::Leaf) {
                continue;
            }
            let Some(g) = grads[id].take() else { continue };
            ops::backprop(&nodes, id, &g, &mut grads);
        }
        Ok(Gradients { grads })
    }
}

impl<'t> Var<'t> {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn tape(&self) -> &'t Tape {
        self.tape
    }

    pub fn value(&self) -> Tensor {
        self.tape.value(self.id)
    }

    pub fn shape(&self) -> Vec<usize> {
        self.tape.with_node(self.id, |n| n.value.shape().to_vec())
    }

    pub fn rows(&self) -> usize {
        self.tape.with_node(self.id, |n| n.value.rows())
    }

    pub fn cols(&self) -> usize {
        self.tape.with_node(self.id, |n| n.value.cols())
    }

    pub fn requires_grad(&self) -> bool {
        self.tape.needs_grad(self.id)
    }

    pub(crate) fn derive(&self, value: Tensor, op: Op) -> Var<'t> {
        let needs = op.inputs().iter().any(|&i| self.tape.needs_grad(i));
        self.tape.push(value, op, needs)
    }

    pub(crate) fn same_tape(&self, other: &Var<'_>) {
        assert!(
            std::ptr::eq(self.tape, other.tape),
            "operands recorded on different tapes"
        );
    }
}

/// Gradient buffers indexed by node; leaves keep theirs after the sweep.
pub struct Gradients {
    grads: Vec<Option<Vec<f64>>>,
}

impl Gradients {
    pub fn get(&self, v: Var<'_>) -> Option<&[f64]> {
        self.grads.get(v.id).and_then(|g| g.as_deref())
    }

    pub fn take(&mut self, v: Var<'_>) -> Option<Vec<f64>> {
        self.grads.get_mut(v.id).and_then(Option::take)
    }

    /// Gradient as a tensor shaped like `v`; zeros when `v` did not affect the loss.
    pub fn wrt(&self, v: Var<'_>) -> Tensor {
        let value = v.value();
        match self.get(v) {
            Some(g) => Tensor::new(value.shape(), g.to_vec()).unwrap(),
            None => Tensor::zeros(value.shape()),
        }
    }
}

/// Mutable gradient slot for `id`, created on first use; `None` if the node
/// does not take gradients.
pub(crate) fn slot<'g>(
    nodes: &[Node],
    grads: &'g mut [Option<Vec<f64>>],
    id: usize,
) -> Option<&'g mut Vec<f64>> {
    if !nodes[id].needs_grad {
        return None;
    }
    let n = nodes[id].value.numel();
    Some(grads[id].get_or_insert_with(|| vec![0.0; n]))
}
