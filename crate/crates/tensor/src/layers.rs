//! Composite layers assembled from tape operations.

use crate::error::Result;
use crate::ops::attention::AttentionLayout;
use crate::tape::Var;

/// `x · weight + bias` with `weight` stored `[in × out]`.
#[derive(Clone, Copy, Debug)]
pub struct LinearVars<'t> {
    pub weight: Var<'t>,
    pub bias: Option<Var<'t>>,
}

impl<'t> LinearVars<'t> {
    pub fn forward(&self, x: Var<'t>) -> Result<Var<'t>> {
        let y = x.matmul(self.weight)?;
        match self.bias {
            Some(b) => y.add_row(b),
            None => Ok(y),
        }
    }
}

/// Query/key/value/output projections of a multi-head attention layer.
#[derive(Clone, Copy, Debug)]
pub struct MhaVars<'t> {
    pub query: LinearVars<'t>,
    pub key: LinearVars<'t>,
    pub value: LinearVars<'t>,
    pub output: LinearVars<'t>,
    pub heads: usize,
}

/// Projects queries and keys/values to the model width, attends per head
/// with `softmax(QKᵀ/√(d_model/heads))` over unmasked keys, concatenates
/// the heads and applies the output projection.
pub fn multi_head_attention<'t>(
    queries: Var<'t>,
    keys: Var<'t>,
    values: Var<'t>,
    params: &MhaVars<'t>,
    key_mask: Option<&[bool]>,
) -> Result<Var<'t>> {
    let mut layout = AttentionLayout::single(queries.rows(), keys.rows(), params.heads);
    if let Some(m) = key_mask {
        layout = layout.with_key_mask(m.to_vec());
    }
    let (out, _) = attend(queries, keys, values, params, layout)?;
    Ok(out)
}

/// Like [`multi_head_attention`] over row segments; also returns the raw
/// attention node so weights can be inspected.
pub fn attend<'t>(
    queries: Var<'t>,
    keys: Var<'t>,
    values: Var<'t>,
    params: &MhaVars<'t>,
    layout: AttentionLayout,
) -> Result<(Var<'t>, Var<'t>)> {
    let q = params.query.forward(queries)?;
    let k = params.key.forward(keys)?;
    let v = params.value.forward(values)?;
    let heads = Var::attention(q, k, v, layout)?;
    Ok((params.output.forward(heads)?, heads))
}
