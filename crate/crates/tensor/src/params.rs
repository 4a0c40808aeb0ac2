use std::cell::RefCell;

use crate::tape::{Gradients, Tape, Var};
use crate::tensor::Tensor;

/// Index of a tensor in a [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId(usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Ordered collection of named learnable tensors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamStore {
    names: Vec<String>,
    tensors: Vec<Tensor>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a tensor; names must be unique.
    pub fn add(&mut self, name: impl Into<String>, value: Tensor) -> ParamId {
        let name = name.into();
        assert!(
            !self.names.contains(&name),
            "duplicate parameter name `{name}`"
        );
        self.names.push(name);
        self.tensors.push(value);
        ParamId(self.tensors.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn get(&self, id: ParamId) -> &Tensor {
        &self.tensors[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.tensors[id.0]
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn id_of(&self, name: &str) -> Option<ParamId> {
        self.names.iter().position(|n| n == name).map(ParamId)
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.tensors.len()).map(ParamId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.names.iter().map(String::as_str).zip(&self.tensors)
    }

    pub fn numel(&self) -> usize {
        self.tensors.iter().map(Tensor::numel).sum()
    }

    /// Replaces every tensor with the one of the same name in `other`;
    /// both stores must hold the same names and shapes.
    pub fn copy_from(&mut self, other: &ParamStore) -> Result<(), String> {
        if self.names != other.names {
            return Err("parameter names differ".into());
        }
        for (dst, src) in self.tensors.iter_mut().zip(&other.tensors) {
            if dst.shape() != src.shape() {
                return Err(format!("shape {:?} vs {:?}", dst.shape(), src.shape()));
            }
            *dst = src.clone();
        }
        Ok(())
    }
}

/// Gradients aligned with a [`ParamStore`]; `None` for parameters the loss
/// did not reach.
pub type ParamGrads = Vec<Option<Vec<f64>>>;

/// Lazily places store parameters on a tape as differentiable leaves.
pub struct Binder<'t, 's> {
    tape: &'t Tape,
    store: &'s ParamStore,
    vars: RefCell<Vec<Option<Var<'t>>>>,
    trainable: bool,
}

impl<'t, 's> Binder<'t, 's> {
    pub fn new(tape: &'t Tape, store: &'s ParamStore) -> Self {
        Self {
            tape,
            store,
            vars: RefCell::new(vec![None; store.len()]),
            trainable: true,
        }
    }

    /// Binds parameters as constants; no gradients are tracked.
    pub fn frozen(tape: &'t Tape, store: &'s ParamStore) -> Self {
        Self {
            trainable: false,
            ..Self::new(tape, store)
        }
    }

    pub fn tape(&self) -> &'t Tape {
        self.tape
    }

    pub fn store(&self) -> &'s ParamStore {
        self.store
    }

    pub fn var(&self, id: ParamId) -> Var<'t> {
        let mut vars = self.vars.borrow_mut();
        *vars[id.0].get_or_insert_with(|| {
            let value = self.store.get(id).clone();
            if self.trainable {
                self.tape.var(value)
            } else {
                self.tape.constant(value)
            }
        })
    }

    /// Moves the gradient of every bound parameter out of `grads`.
    pub fn collect(&self, grads: &mut Gradients) -> ParamGrads {
        self.vars
            .borrow()
            .iter()
            .map(|v| v.and_then(|v| grads.take(v)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binder_reuses_leaf() {
        let mut store = ParamStore::new();
        let w = store.add("w", Tensor::scalar(2.0));
        let tape = Tape::new();
        let binder = Binder::new(&tape, &store);
        let a = binder.var(w);
        let b = binder.var(w);
        assert_eq!(a.id(), b.id());
        let y = a.mul(b).unwrap();
        let mut grads = tape.backward(y).unwrap();
        let pg = binder.collect(&mut grads);
        assert_eq!(pg[0].as_deref(), Some(&[4.0][..]));
    }

    #[test]
    fn frozen_binder_tracks_nothing() {
        let mut store = ParamStore::new();
        let w = store.add("w", Tensor::scalar(2.0));
        let tape = Tape::new();
        let binder = Binder::frozen(&tape, &store);
        assert!(!binder.var(w).requires_grad());
    }
}
