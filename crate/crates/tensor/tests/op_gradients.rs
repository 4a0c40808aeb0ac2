//! Every differentiable op against central finite differences, on random
//! inputs over several seeds.

use sentifuse_tensor::gradcheck::{FD_EPS, MAX_REL_ERR};
use sentifuse_tensor::op_suite::{op_case, op_cases};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

#[test]
fn every_op_case_passes() {
    for case in op_cases() {
        for seed in SEEDS {
            let err = case.check(seed, FD_EPS).unwrap();
            assert!(err < MAX_REL_ERR, "{}: seed {seed} rel err {err:e}", case.name);
        }
    }
}

#[test]
fn suite_covers_the_model_ops() {
    for name in [
        "matmul", "matmul_nt", "matmul_tn", "add", "sub", "mul", "add_row", "affine", "scale_by", "tanh",
        "sigmoid", "relu", "exp", "ln", "outer_sum", "softmax", "masked_softmax", "layer_norm",
        "concat_rows", "concat_cols", "slices", "gather_rows", "segment_mean", "masked_mean_rows",
        "reshape_mean", "sum", "cross_entropy", "attention", "multi_head_attention",
    ] {
        assert!(op_case(name).is_some(), "missing case {name}");
    }
    assert!(op_case("no_such_op").is_none());
}
