use crate::error::{Result, TensorError};
use crate::gemm::{gemm, MatRef};
use crate::tape::{slot, Node, Op, Var};
use crate::tensor::Tensor;

fn as_matrix(t: &Tensor) -> (usize, usize) {
    (t.rows(), t.cols())
}

impl<'t> Var<'t> {
    /// `self · rhs` for `[m×k]·[k×n]`.
    pub fn matmul(self, rhs: Var<'t>) -> Result<Var<'t>> {
        self.matmul_t(rhs, false, false)
    }

    /// `self · rhsᵀ`.
    pub fn matmul_nt(self, rhs: Var<'t>) -> Result<Var<'t>> {
        self.matmul_t(rhs, false, true)
    }

    /// Matrix product with either operand optionally read transposed.
    pub fn matmul_t(self, rhs: Var<'t>, ta: bool, tb: bool) -> Result<Var<'t>> {
        self.same_tape(&rhs);
        let a = self.value();
        let b = rhs.value();
        let (ar, ac) = as_matrix(&a);
        let (br, bc) = as_matrix(&b);
        let lhs = MatRef::new(a.data(), ar, ac, ta);
        let rhs_ref = MatRef::new(b.data(), br, bc, tb);
        let (m, k) = lhs.dims();
        let (kb, n) = rhs_ref.dims();
        if k != kb {
            return Err(TensorError::Dimension {
                op: "matmul",
                lhs: a.shape().to_vec(),
                rhs: b.shape().to_vec(),
            });
        }
        let mut out = vec![0.0; m * n];
        gemm(1.0, lhs, rhs_ref, 0.0, &mut out);
        Ok(self.derive(
            Tensor::matrix(m, n, out)?,
            Op::MatMul {
                a: self.id(),
                b: rhs.id(),
                ta,
                tb,
            },
        ))
    }
}

pub(super) fn matmul_backward(
    nodes: &[Node],
    a: usize,
    b: usize,
    ta: bool,
    tb: bool,
    g: &[f64],
    grads: &mut [Option<Vec<f64>>],
) {
    let av = nodes[a].value.clone();
    let bv = nodes[b].value.clone();
    let (ar, ac) = as_matrix(&av);
    let (br, bc) = as_matrix(&bv);
    let a_ref = MatRef::new(av.data(), ar, ac, ta);
    let b_ref = MatRef::new(bv.data(), br, bc, tb);
    let (m, _) = a_ref.dims();
    let (_, n) = b_ref.dims();

    if let Some(ga) = slot(nodes, grads, a) {
        if !ta {
            // dA = G · op(B)ᵀ
            let g_ref = MatRef::new(g, m, n, false);
            let bt = MatRef::new(bv.data(), br, bc, !tb);
            gemm(1.0, g_ref, bt, 1.0, ga);
        } else {
            // A stored [k×m]: dA = op(B) · Gᵀ
            let gt = MatRef::new(g, m, n, true);
            gemm(1.0, b_ref, gt, 1.0, ga);
        }
    }
    if let Some(gb) = slot(nodes, grads, b) {
        if !tb {
            // dB = op(A)ᵀ · G
            let at = MatRef::new(av.data(), ar, ac, !ta);
            let g_ref = MatRef::new(g, m, n, false);
            gemm(1.0, at, g_ref, 1.0, gb);
        } else {
            // B stored [n×k]: dB = Gᵀ · op(A)
            let gt = MatRef::new(g, m, n, true);
            gemm(1.0, gt, a_ref, 1.0, gb);
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::{Tape, Tensor};

    #[test]
    fn hand_computed_product() {
        let tape = Tape::new();
        let a = tape.constant(Tensor::matrix(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap());
        let b = tape.constant(Tensor::matrix(2, 1, vec![1.0, 1.0]).unwrap());
        let c = a.matmul(b).unwrap().value();
        assert_eq!(c.shape(), &[2, 1]);
        assert_eq!(c.data(), &[3.0, 7.0]);
    }

    #[test]
    fn identity_and_annihilator() {
        let tape = Tape::new();
        let a = Tensor::matrix(2, 3, vec![1.5, -2.0, 0.25, 4.0, 5.0, -6.0]).unwrap();
        let av = tape.constant(a.clone());
        let eye = tape.constant(Tensor::identity(2));
        assert_eq!(eye.matmul(av).unwrap().value(), a);
        let zero = tape.constant(Tensor::zeros(&[3, 4]));
        let z = av.matmul(zero).unwrap().value();
        assert!(z.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatch_names_both_shapes() {
        let tape = Tape::new();
        let a = tape.constant(Tensor::zeros(&[2, 3]));
        let b = tape.constant(Tensor::zeros(&[2, 3]));
        let err = a.matmul(b).unwrap_err().to_string();
        assert!(err.contains("[2, 3] vs [2, 3]"), "{err}");
    }

    #[test]
    fn transposed_variants_agree() {
        let tape = Tape::new();
        let a = tape.constant(Tensor::matrix(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap());
        let b = tape.constant(Tensor::matrix(2, 3, vec![0.5, -1.0, 2.0, 1.0, 0.0, -3.0]).unwrap());
        let nt = a.matmul_nt(b).unwrap().value();
        // [1,2,3]·[0.5,-1,2] = 4.5 ; [1,2,3]·[1,0,-3] = -8 ; [4,5,6]·.. = 9, -14
        assert_eq!(nt.data(), &[4.5, -8.0, 9.0, -14.0]);
        let tn = a.matmul_t(b, true, false).unwrap().value();
        assert_eq!(tn.shape(), &[3, 3]);
        assert_eq!(tn.get(0, 0), 1.0 * 0.5 + 4.0 * 1.0);
    }
}
