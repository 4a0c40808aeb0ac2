//! Named finite-difference cases covering every differentiable op.
//!
//! Each case draws its inputs in `[-1, 1]` (positive where the op needs
//! it) from a seeded generator and reduces the output to a scalar with a
//! random projection.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::gradcheck::{check_scalar_fn, project};
use crate::layers::{multi_head_attention, LinearVars, MhaVars};
use crate::ops::attention::AttentionLayout;
use crate::tape::Var;
use crate::tensor::Tensor;

pub type OpFn = dyn for<'t> Fn(&[Var<'t>]) -> Result<Var<'t>>;

/// Inputs, projection weights and the op under test.
pub type Instance = (Vec<Tensor>, Tensor, Box<OpFn>);

pub struct OpCase {
    pub name: &'static str,
    build: fn(&mut ChaCha8Rng) -> Instance,
}

impl OpCase {
    pub fn instance(&self, seed: u64) -> Instance {
        (self.build)(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Worst relative error over all inputs for one seed.
    pub fn check(&self, seed: u64, eps: f64) -> Result<f64> {
        let (inputs, proj, op) = self.instance(seed);
        let errs = check_scalar_fn(&inputs, eps, |_, v| project(op(v)?, &proj))?;
        Ok(errs.into_iter().fold(0.0, f64::max))
    }
}

fn r(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor {
    Tensor::uniform(shape, -1.0, 1.0, rng)
}

fn pos(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor {
    Tensor::uniform(shape, 0.2, 1.0, rng)
}

macro_rules! case {
    ($name:expr, |$rng:ident| $body:expr) => {
        OpCase {
            name: $name,
            build: |$rng| $body,
        }
    };
}

pub fn op_cases() -> Vec<OpCase> {
    vec![
        case!("matmul", |g| (vec![r(g, &[3, 4]), r(g, &[4, 2])], r(g, &[6]), Box::new(|v| v[0].matmul(v[1])))),
        case!("matmul_nt", |g| (vec![r(g, &[3, 4]), r(g, &[5, 4])], r(g, &[15]), Box::new(|v| v[0].matmul_nt(v[1])))),
        case!("matmul_tn", |g| {
            (vec![r(g, &[4, 3]), r(g, &[4, 2])], r(g, &[6]), Box::new(|v| v[0].matmul_t(v[1], true, false)))
        }),
        case!("add", |g| (vec![r(g, &[2, 3]), r(g, &[2, 3])], r(g, &[6]), Box::new(|v| v[0].add(v[1])))),
        case!("sub", |g| (vec![r(g, &[2, 3]), r(g, &[2, 3])], r(g, &[6]), Box::new(|v| v[0].sub(v[1])))),
        case!("mul", |g| (vec![r(g, &[2, 3]), r(g, &[2, 3])], r(g, &[6]), Box::new(|v| v[0].mul(v[1])))),
        case!("add_row", |g| (vec![r(g, &[3, 4]), r(g, &[4])], r(g, &[12]), Box::new(|v| v[0].add_row(v[1])))),
        case!("affine", |g| (vec![r(g, &[5])], r(g, &[5]), Box::new(|v| Ok(v[0].affine(-1.5, 0.3))))),
        case!("scale_by", |g| (vec![r(g, &[2, 3]), r(g, &[1])], r(g, &[6]), Box::new(|v| v[0].scale_by(v[1])))),
        case!("tanh", |g| (vec![r(g, &[7])], r(g, &[7]), Box::new(|v| Ok(v[0].tanh())))),
        case!("sigmoid", |g| (vec![r(g, &[7])], r(g, &[7]), Box::new(|v| Ok(v[0].sigmoid())))),
        case!("relu", |g| (vec![r(g, &[7])], r(g, &[7]), Box::new(|v| Ok(v[0].relu())))),
        case!("exp", |g| (vec![r(g, &[7])], r(g, &[7]), Box::new(|v| Ok(v[0].exp())))),
        case!("ln", |g| (vec![pos(g, &[7])], r(g, &[7]), Box::new(|v| Ok(v[0].ln())))),
        case!("outer_sum", |g| {
            (vec![r(g, &[3, 1]), r(g, &[1, 4])], r(g, &[12]), Box::new(|v| Var::outer_sum(v[0], v[1])))
        }),
        case!("softmax", |g| (vec![r(g, &[3, 4])], r(g, &[12]), Box::new(|v| v[0].softmax()))),
        case!("masked_softmax", |g| {
            (
                vec![r(g, &[4, 3])],
                r(g, &[12]),
                Box::new(|v| v[0].masked_softmax(0, Some(&[true, false, true, true]))),
            )
        }),
        case!("layer_norm", |g| {
            (
                vec![r(g, &[3, 5]), r(g, &[5]), r(g, &[5])],
                r(g, &[15]),
                Box::new(|v| v[0].layer_norm(v[1], v[2], 1e-5)),
            )
        }),
        case!("concat_rows", |g| {
            (
                vec![r(g, &[2, 3]), r(g, &[1, 3])],
                r(g, &[15]),
                Box::new(|v| Var::concat_rows(&[v[0], v[1], v[0]])),
            )
        }),
        case!("concat_cols", |g| {
            (vec![r(g, &[2, 3]), r(g, &[2, 1])], r(g, &[8]), Box::new(|v| Var::concat_cols(&[v[0], v[1]])))
        }),
        case!("slices", |g| (vec![r(g, &[4, 5])], r(g, &[4]), Box::new(|v| v[0].slice_rows(1, 2)?.slice_cols(2, 2)))),
        case!("gather_rows", |g| (vec![r(g, &[3, 2])], r(g, &[8]), Box::new(|v| v[0].gather_rows(&[2, 0, 2, 1])))),
        case!("segment_mean", |g| {
            (vec![r(g, &[5, 3])], r(g, &[9]), Box::new(|v| v[0].segment_mean(&[0..2, 2..2, 2..5])))
        }),
        case!("masked_mean_rows", |g| {
            (
                vec![r(g, &[4, 3])],
                r(g, &[3]),
                Box::new(|v| v[0].masked_mean_rows(&[true, false, true, true])),
            )
        }),
        case!("reshape_mean", |g| (vec![r(g, &[2, 3])], r(g, &[1]), Box::new(|v| Ok(v[0].reshape(&[3, 2])?.mean())))),
        case!("sum", |g| (vec![r(g, &[2, 3])], r(g, &[1]), Box::new(|v| Ok(v[0].sum())))),
        case!("cross_entropy", |g| {
            (vec![pos(g, &[4, 3])], Tensor::scalar(1.0), Box::new(|v| v[0].cross_entropy(&[0, 2, 1, 2])))
        }),
        case!("softmax_cross_entropy", |g| {
            (
                vec![r(g, &[4, 3])],
                Tensor::scalar(1.0),
                Box::new(|v| v[0].softmax()?.cross_entropy(&[1, 1, 0, 2])),
            )
        }),
        case!("attention", |g| {
            (
                vec![r(g, &[5, 4]), r(g, &[4, 4]), r(g, &[4, 4])],
                r(g, &[20]),
                Box::new(|v| {
                    let layout = AttentionLayout {
                        heads: 2,
                        segments: vec![(0..2, 0..3), (2..5, 3..4)],
                        key_mask: Some(vec![true, false, true, true]),
                    };
                    Var::attention(v[0], v[1], v[2], layout)
                }),
            )
        }),
        case!("multi_head_attention", |g| {
            let mut inputs = vec![r(g, &[3, 5]), r(g, &[4, 6])];
            for (i, o) in [(5, 4), (6, 4), (6, 4), (4, 4)] {
                inputs.push(r(g, &[i, o]));
                inputs.push(r(g, &[o]));
            }
            (
                inputs,
                r(g, &[12]),
                Box::new(|v| {
                    let lin = |w: usize| LinearVars {
                        weight: v[w],
                        bias: Some(v[w + 1]),
                    };
                    let params = MhaVars {
                        query: lin(2),
                        key: lin(4),
                        value: lin(6),
                        output: lin(8),
                        heads: 2,
                    };
                    multi_head_attention(v[0], v[1], v[1], &params, Some(&[true, true, false, true]))
                }),
            )
        }),
    ]
}

/// The case called `name`, if any.
pub fn op_case(name: &str) -> Option<OpCase> {
    op_cases().into_iter().find(|c| c.name == name)
}
