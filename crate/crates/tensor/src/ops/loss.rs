use crate::error::{Result, TensorError};
use crate::tape::{slot, Node, Op, Var};
use crate::tensor::Tensor;

impl<'t> Var<'t> {
    /// Mean over rows of `-ln(p[gold] / Σp)` for rows of class scores.
    ///
    /// Scores are renormalized inside the log, so rows that already sum to
    /// one give the usual negative log-likelihood.
    pub fn cross_entropy(self, gold: &[usize]) -> Result<Var<'t>> {
        let x = self.value();
        let (rows, classes) = (x.rows(), x.cols());
        if gold.len() != rows {
            return Err(TensorError::Dimension {
                op: "cross_entropy",
                lhs: x.shape().to_vec(),
                rhs: vec![gold.len()],
            });
        }
        if let Some(&label) = gold.iter().find(|&&g| g >= classes) {
            return Err(TensorError::Label { label, classes });
        }
        let total: f64 = gold
            .iter()
            .enumerate()
            .map(|(r, &g)| {
                let row = x.row(r);
                -(row[g] / row.iter().sum::<f64>()).ln()
            })
            .sum();
        Ok(self.derive(
            Tensor::scalar(total / rows as f64),
            Op::CrossEntropy {
                x: self.id(),
                gold: gold.to_vec(),
            },
        ))
    }
}

/// Loss for a single score vector; see [`Var::cross_entropy`].
pub fn cross_entropy(score: &[f64], gold: usize) -> Result<f64> {
    if gold >= score.len() {
        return Err(TensorError::Label {
            label: gold,
            classes: score.len(),
        });
    }
    Ok(-(score[gold] / score.iter().sum::<f64>()).ln())
}

pub(super) fn backward(
    nodes: &[Node],
    x: usize,
    gold: &[usize],
    g: &[f64],
    grads: &mut [Option<Vec<f64>>],
) {
    let xv = nodes[x].value.clone();
    let c = xv.cols();
    let scale = g[0] / gold.len() as f64;
    if let Some(s) = slot(nodes, grads, x) {
        for (r, &label) in gold.iter().enumerate() {
            let row = xv.row(r);
            let total: f64 = row.iter().sum();
            for j in 0..c {
                s[r * c + j] += scale / total;
            }
            s[r * c + label] -= scale / row[label];
        }
    }
}
