//! Crate-wide error type.

use crate::tensor::Shape;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0} vs {1}")]
    ShapeMismatch(Shape, Shape),

    /// Densification refused: the full array would exceed the configured cap.
    #[error("tensor has {elems} elements, above the densification cap of {cap}")]
    DensifyCap { elems: usize, cap: usize },

    #[error("mode sizes overflow the addressable range")]
    SizeOverflow,

    #[error("column count mismatch: {0} vs {1}")]
    ColumnMismatch(usize, usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("expected an order-{expected} tensor, got order {got}")]
    OrderMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input tensor has zero norm")]
    ZeroNorm,

    /// Sampling produced a zero-norm tensor twice in a row.
    #[error("degenerate input: sampled tensor has zero norm")]
    DegenerateInput,
}
