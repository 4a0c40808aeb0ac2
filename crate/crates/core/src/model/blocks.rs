//! Parameter handles for the reusable layers and their forward passes.
//!
//! Each `*Ids` struct records where a layer's tensors live in a
//! [`ParamStore`]; `bind` places them on a tape through a [`Binder`].

use rand::Rng;
use sentifuse_tensor::layers::{attend, LinearVars, MhaVars};
use sentifuse_tensor::{AttentionLayout, Binder, ParamId, ParamStore, Result, Tensor, Var};

/// Registers parameters with Glorot-uniform weights and zero biases.
pub struct Init<'a, R: Rng> {
    pub store: &'a mut ParamStore,
    pub rng: &'a mut R,
}

impl<R: Rng> Init<'_, R> {
    pub fn linear(&mut self, name: &str, fan_in: usize, fan_out: usize, bias: bool) -> LinearIds {
        let weight = self
            .store
            .add(format!("{name}.weight"), Tensor::glorot_uniform(fan_in, fan_out, self.rng));
        let bias = bias.then(|| self.store.add(format!("{name}.bias"), Tensor::zeros(&[fan_out])));
        LinearIds { weight, bias }
    }

    pub fn vector(&mut self, name: &str, len: usize, value: f64) -> ParamId {
        self.store.add(name, Tensor::full(&[len], value))
    }

    pub fn layer_norm(&mut self, name: &str, dim: usize) -> LayerNormIds {
        LayerNormIds {
            gain: self.vector(&format!("{name}.gain"), dim, 1.0),
            bias: self.vector(&format!("{name}.bias"), dim, 0.0),
        }
    }

    pub fn mha(&mut self, name: &str, dq: usize, dk: usize, dm: usize, heads: usize) -> MhaIds {
        MhaIds {
            query: self.linear(&format!("{name}.query"), dq, dm, true),
            key: self.linear(&format!("{name}.key"), dk, dm, true),
            value: self.linear(&format!("{name}.value"), dk, dm, true),
            output: self.linear(&format!("{name}.output"), dm, dm, true),
            heads,
        }
    }

    pub fn ffn(&mut self, name: &str, dim: usize, mult: usize) -> FfnIds {
        FfnIds {
            inner: self.linear(&format!("{name}.inner"), dim, mult * dim, true),
            outer: self.linear(&format!("{name}.outer"), mult * dim, dim, true),
        }
    }

    pub fn self_block(&mut self, name: &str, dim: usize, heads: usize, mult: usize, eps: f64) -> SelfBlockIds {
        SelfBlockIds {
            attn: self.mha(&format!("{name}.attn"), dim, dim, dim, heads),
            ln_attn: self.layer_norm(&format!("{name}.ln_attn"), dim),
            ffn: self.ffn(&format!("{name}.ffn"), dim, mult),
            ln_ffn: self.layer_norm(&format!("{name}.ln_ffn"), dim),
            eps,
        }
    }

    pub fn cross_block(&mut self, name: &str, dim: usize, heads: usize, mult: usize, eps: f64) -> CrossBlockIds {
        CrossBlockIds {
            ln_query: self.layer_norm(&format!("{name}.ln_query"), dim),
            ln_source: self.layer_norm(&format!("{name}.ln_source"), dim),
            attn: self.mha(&format!("{name}.attn"), dim, dim, dim, heads),
            ln_ffn: self.layer_norm(&format!("{name}.ln_ffn"), dim),
            ffn: self.ffn(&format!("{name}.ffn"), dim, mult),
            eps,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LinearIds {
    pub weight: ParamId,
    pub bias: Option<ParamId>,
}

impl LinearIds {
    pub fn bind<'t>(&self, b: &Binder<'t, '_>) -> LinearVars<'t> {
        LinearVars {
            weight: b.var(self.weight),
            bias: self.bias.map(|id| b.var(id)),
        }
    }

    pub fn forward<'t>(&self, b: &Binder<'t, '_>, x: Var<'t>) -> Result<Var<'t>> {
        self.bind(b).forward(x)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LayerNormIds {
    pub gain: ParamId,
    pub bias: ParamId,
}

impl LayerNormIds {
    pub fn forward<'t>(&self, b: &Binder<'t, '_>, x: Var<'t>, eps: f64) -> Result<Var<'t>> {
        x.layer_norm(b.var(self.gain), b.var(self.bias), eps)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MhaIds {
    pub query: LinearIds,
    pub key: LinearIds,
    pub value: LinearIds,
    pub output: LinearIds,
    pub heads: usize,
}

impl MhaIds {
    pub fn bind<'t>(&self, b: &Binder<'t, '_>) -> MhaVars<'t> {
        MhaVars {
            query: self.query.bind(b),
            key: self.key.bind(b),
            value: self.value.bind(b),
            output: self.output.bind(b),
            heads: self.heads,
        }
    }

    /// Segmented attention; `trace` collects the raw weight node.
    pub fn forward<'t>(
        &self,
        b: &Binder<'t, '_>,
        queries: Var<'t>,
        source: Var<'t>,
        segments: &[(std::ops::Range<usize>, std::ops::Range<usize>)],
        trace: &mut Vec<Var<'t>>,
    ) -> Result<Var<'t>> {
        let layout = AttentionLayout {
            heads: self.heads,
            segments: segments.iter().filter(|(q, _)| !q.is_empty()).cloned().collect(),
            key_mask: None,
        };
        let (out, node) = attend(queries, source, source, &self.bind(b), layout)?;
        trace.push(node);
        Ok(out)
    }
}

/// Two affine maps with a rectifier between them.
#[derive(Debug, Clone, Copy)]
pub struct FfnIds {
    pub inner: LinearIds,
    pub outer: LinearIds,
}

impl FfnIds {
    pub fn forward<'t>(&self, b: &Binder<'t, '_>, x: Var<'t>) -> Result<Var<'t>> {
        let h = self.inner.forward(b, x)?.relu();
        self.outer.forward(b, h)
    }
}

/// Post-norm self-attention block:
/// `a = LN(x + MHA(x))`, `out = LN(a + FFN(a))`.
#[derive(Debug, Clone, Copy)]
pub struct SelfBlockIds {
    pub attn: MhaIds,
    pub ln_attn: LayerNormIds,
    pub ffn: FfnIds,
    pub ln_ffn: LayerNormIds,
    pub eps: f64,
}

impl SelfBlockIds {
    pub fn forward<'t>(
        &self,
        b: &Binder<'t, '_>,
        x: Var<'t>,
        segments: &[std::ops::Range<usize>],
        trace: &mut Vec<Var<'t>>,
    ) -> Result<Var<'t>> {
        let pairs: Vec<_> = segments.iter().map(|s| (s.clone(), s.clone())).collect();
        let attended = self.attn.forward(b, x, x, &pairs, trace)?;
        let a = self.ln_attn.forward(b, x.add(attended)?, self.eps)?;
        let f = self.ffn.forward(b, a)?;
        self.ln_ffn.forward(b, a.add(f)?, self.eps)
    }
}

/// Cross-modal block: `Ŷ = MHA(LN(Y), LN(src)) + LN(Y)`,
/// `out = FFN(LN(Ŷ)) + LN(Ŷ)`.
#[derive(Debug, Clone, Copy)]
pub struct CrossBlockIds {
    pub ln_query: LayerNormIds,
    pub ln_source: LayerNormIds,
    pub attn: MhaIds,
    pub ln_ffn: LayerNormIds,
    pub ffn: FfnIds,
    pub eps: f64,
}

impl CrossBlockIds {
    pub fn forward<'t>(
        &self,
        b: &Binder<'t, '_>,
        y: Var<'t>,
        source: Var<'t>,
        segments: &[(std::ops::Range<usize>, std::ops::Range<usize>)],
        trace: &mut Vec<Var<'t>>,
    ) -> Result<Var<'t>> {
        let q = self.ln_query.forward(b, y, self.eps)?;
        let s = self.ln_source.forward(b, source, self.eps)?;
        let hat = self.attn.forward(b, q, s, segments, trace)?.add(q)?;
        let n = self.ln_ffn.forward(b, hat, self.eps)?;
        self.ffn.forward(b, n)?.add(n)
    }
}
