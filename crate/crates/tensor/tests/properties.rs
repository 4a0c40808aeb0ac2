use proptest::prelude::*;
use sentifuse_tensor::checkpoint::{read_checkpoint, write_checkpoint};
use sentifuse_tensor::layers::{multi_head_attention, LinearVars, MhaVars};
use sentifuse_tensor::{ParamStore, Tape, Tensor, Var};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Tensor> {
    prop::collection::vec(-5.0f64..5.0, rows * cols)
        .prop_map(move |d| Tensor::matrix(rows, cols, d).unwrap())
}

fn sized_matrix() -> impl Strategy<Value = Tensor> {
    (1usize..6, 1usize..7).prop_flat_map(|(r, c)| matrix(r, c))
}

proptest! {
    #[test]
    fn softmax_slices_sum_to_one(x in sized_matrix(), mask_bits in prop::collection::vec(any::<bool>(), 7)) {
        let tape = Tape::new();
        let v = tape.constant(x.clone());
        let cols = x.cols();
        let mut mask: Vec<bool> = mask_bits[..cols].to_vec();
        mask[0] = true;
        let y = v.masked_softmax(1, Some(&mask)).unwrap().value();
        for r in 0..y.rows() {
            let row = y.row(r);
            let total: f64 = row.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            for (j, &keep) in mask.iter().enumerate() {
                if keep {
                    prop_assert!(row[j] > 0.0 && row[j] <= 1.0);
                } else {
                    prop_assert_eq!(row[j], 0.0);
                }
            }
        }
    }

    #[test]
    fn softmax_shift_invariant(x in sized_matrix(), c in -50.0f64..50.0) {
        let tape = Tape::new();
        let v = tape.constant(x);
        let a = v.softmax().unwrap().value();
        let b = v.affine(1.0, c).softmax().unwrap().value();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn layer_norm_standardizes_rows(x in (1usize..5, 2usize..9).prop_flat_map(|(r, c)| matrix(r, c))) {
        let tape = Tape::new();
        let d = x.cols();
        let v = tape.constant(x.clone());
        let g = tape.constant(Tensor::full(&[d], 1.0));
        let b = tape.constant(Tensor::zeros(&[d]));
        let y = v.layer_norm(g, b, 1e-5).unwrap().value();
        for r in 0..x.rows() {
            let row = x.row(r);
            let mu = row.iter().sum::<f64>() / d as f64;
            let var = row.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / d as f64;
            let out = y.row(r);
            let m = out.iter().sum::<f64>() / d as f64;
            prop_assert!(m.abs() < 1e-9);
            // eps shrinks the output variance to var / (var + eps)
            let v2 = out.iter().map(|v| (v - m).powi(2)).sum::<f64>() / d as f64;
            prop_assert!((v2 - var / (var + 1e-5)).abs() < 1e-9);
        }
    }

    #[test]
    fn single_key_attention_ignores_queries(q1 in matrix(3, 4), q2 in matrix(3, 4), kv in matrix(1, 4), w in matrix(4, 4)) {
        let run = |q: &Tensor| {
            let tape = Tape::new();
            let lin = LinearVars { weight: tape.constant(w.clone()), bias: None };
            let params = MhaVars { query: lin, key: lin, value: lin, output: lin, heads: 2 };
            let qv = tape.constant(q.clone());
            let kvv = tape.constant(kv.clone());
            multi_head_attention(qv, kvv, kvv, &params, None).unwrap().value()
        };
        let a = run(&q1);
        let b = run(&q2);
        for r in 0..3 {
            prop_assert_eq!(a.row(r), a.row(0));
            prop_assert_eq!(a.row(r), b.row(r));
        }
    }

    #[test]
    fn checkpoint_round_trip_is_exact(a in sized_matrix(), b in prop::collection::vec(any::<f64>(), 1..20), meta in ".{0,40}") {
        let mut store = ParamStore::new();
        store.add("layer.weight", a);
        let n = b.len();
        store.add("raw bits", Tensor::vector(b).unwrap());
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &store, &meta).unwrap();
        let (back, m) = read_checkpoint(&buf[..]).unwrap();
        prop_assert_eq!(m, meta);
        prop_assert_eq!(back.len(), 2);
        for ((n1, t1), (n2, t2)) in store.iter().zip(back.iter()) {
            prop_assert_eq!(n1, n2);
            prop_assert_eq!(t1.shape(), t2.shape());
            let bits1: Vec<u64> = t1.data().iter().map(|v| v.to_bits()).collect();
            let bits2: Vec<u64> = t2.data().iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(bits1, bits2);
        }
        prop_assert_eq!(back.get(back.id_of("raw bits").unwrap()).numel(), n);
    }
}

#[test]
fn repeated_evaluation_is_bit_identical() {
    let run = || {
        let tape = Tape::new();
        let x = tape.var(Tensor::matrix(2, 3, vec![0.1, -0.4, 0.9, 0.3, 0.3, -0.7]).unwrap());
        let w = tape.var(Tensor::matrix(3, 3, (0..9).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap());
        let h = x.matmul(w).unwrap().tanh();
        let y = Var::concat_rows(&[h, x]).unwrap().softmax().unwrap();
        let loss = y.cross_entropy(&[0, 1, 2, 0]).unwrap();
        let grads = tape.backward(loss).unwrap();
        (loss.value(), grads.wrt(w))
    };
    let (l1, g1) = run();
    let (l2, g2) = run();
    assert_eq!(l1.data()[0].to_bits(), l2.data()[0].to_bits());
    assert_eq!(g1, g2);
}

#[test]
fn graph_records_are_topological() {
    let tape = Tape::new();
    let x = tape.var(Tensor::scalar(1.0));
    let y = x.tanh().mul(x).unwrap();
    let _ = y.sum();
    for rec in tape.records() {
        assert!(rec.inputs.iter().all(|&i| i < rec.id), "{rec:?}");
    }
    assert_eq!(tape.records()[1].kind, "tanh");
}
