//! Three-branch multimodal sentiment fusion over precomputed features.

pub mod artifacts;
pub mod data;
pub mod encoders;
mod error;
pub mod gradcheck;
pub mod metrics;
pub mod model;
pub mod train;

pub use error::{CoreError, Result};
