use thiserror::Error;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("dimension error in {op}: {lhs:?} vs {rhs:?}")]
    Dimension {
        op: &'static str,
        lhs: Vec<usize>,
        rhs: Vec<usize>,
    },

    #[error("invalid shape {shape:?} for {len} values")]
    Shape { shape: Vec<usize>, len: usize },

    #[error("degenerate mask in {op}: slice {slice} has no unmasked entry")]
    DegenerateMask { op: &'static str, slice: usize },

    #[error("label {label} out of range for {classes} classes")]
    Label { label: usize, classes: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite gradient for parameter `{name}` (element {index}: {value})")]
    NonFiniteGradient {
        name: String,
        index: usize,
        value: f64,
    },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = TensorError> = std::result::Result<T, E>;
