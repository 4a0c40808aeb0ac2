//! Central finite differences as an independent check on backward rules.
//!
//! Only forward evaluations are used here; the analytic side comes from
//! [`Tape::backward`].

use crate::error::Result;
use crate::tape::{Tape, Var};
use crate::tensor::Tensor;

/// Default perturbation for central differences.
pub const FD_EPS: f64 = 1e-5;

/// Largest accepted relative error between analytic and numeric gradients.
pub const MAX_REL_ERR: f64 = 1e-4;

/// Magnitude below which a gradient entry counts as zero: the denominator
/// of [`relative_error`] never drops under it. Central differences on an
/// O(1) loss carry roughly 1e-10 of rounding noise, far below this.
pub const REL_ERR_FLOOR: f64 = 1e-6;

/// `|a − n| / max(|a|, |n|, REL_ERR_FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs()).max(REL_ERR_FLOOR);
    (analytic - numeric).abs() / scale
}

/// Central difference of `f` along coordinate `index` of `x`.
pub fn central_difference(
    x: &mut [f64],
    index: usize,
    eps: f64,
    mut f: impl FnMut(&[f64]) -> f64,
) -> f64 {
    let orig = x[index];
    x[index] = orig + eps;
    let plus = f(x);
    x[index] = orig - eps;
    let minus = f(x);
    x[index] = orig;
    (plus - minus) / (2.0 * eps)
}

/// Compares backward against central differences for a scalar function of
/// several tensors, perturbing every element of every input. Returns the
/// largest relative error per input.
pub fn check_scalar_fn<F>(inputs: &[Tensor], eps: f64, f: F) -> Result<Vec<f64>>
where
    F: for<'t> Fn(&'t Tape, &[Var<'t>]) -> Result<Var<'t>>,
{
    let tape = Tape::new();
    let vars: Vec<Var<'_>> = inputs.iter().map(|t| tape.var(t.clone())).collect();
    let out = f(&tape, &vars)?;
    let grads = tape.backward(out)?;
    let analytic: Vec<Tensor> = vars.iter().map(|&v| grads.wrt(v)).collect();

    let eval = |values: &[Tensor]| -> Result<f64> {
        let tape = Tape::new();
        let vars: Vec<Var<'_>> = values.iter().map(|t| tape.constant(t.clone())).collect();
        Ok(f(&tape, &vars)?.value().data()[0])
    };

    let mut worst = vec![0.0f64; inputs.len()];
    let mut current: Vec<Tensor> = inputs.to_vec();
    for (i, input) in inputs.iter().enumerate() {
        for k in 0..input.numel() {
            let orig = input.data()[k];
            let mut probe = |delta: f64| -> Result<f64> {
                current[i].data_mut()[k] = orig + delta;
                let v = eval(&current);
                current[i].data_mut()[k] = orig;
                v
            };
            let numeric = (probe(eps)? - probe(-eps)?) / (2.0 * eps);
            let err = relative_error(analytic[i].data()[k], numeric);
            worst[i] = worst[i].max(err);
        }
    }
    Ok(worst)
}

/// Reduces a tensor-valued output to a scalar by a fixed weighted sum, so
/// that every output element contributes to the checked gradient.
pub fn project<'t>(out: Var<'t>, weights: &Tensor) -> Result<Var<'t>> {
    let w = out.tape().constant(weights.reshape(&out.shape())?);
    Ok(out.mul(w)?.sum())
}
