//! Dense `f64` tensors with define-by-run reverse-mode differentiation.
//!
//! The crate provides the numeric substrate for the fusion model: a
//! [`Tape`] that records operations on [`Var`] handles, the attention and
//! normalization primitives the model is built from, the AdamW optimizer
//! with its step schedule, and a binary checkpoint container.

pub mod checkpoint;
mod error;
mod gemm;
pub mod gradcheck;
pub mod layers;
pub mod op_suite;
pub mod ops;
pub mod optim;
mod params;
mod tape;
mod tensor;

pub use error::{Result, TensorError};
pub use ops::attention::AttentionLayout;
pub use params::{Binder, ParamGrads, ParamId, ParamStore};
pub use tape::{Gradients, NodeRecord, Tape, Var};
pub use tensor::Tensor;

pub use ops::cross_entropy;
