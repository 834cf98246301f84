//! Randomized embeddings of large tensors without densification.
//!
//! The crate provides dense, tensor-train and CP representations of
//! multi-way arrays, inner-product kernels between any pair of formats,
//! and random projection families whose rows are themselves low-rank
//! tensors. Projecting a rank-structured input then costs polynomial work
//! in the mode sizes and ranks rather than the full element count.
//!
//! Projection families live behind the [`projection::ProjectionFamily`]
//! trait and are selected by name at runtime; see
//! [`projection::family_by_name`]. The [`verify`] module carries the
//! closed-form moment identities the samplers are tested against.

pub mod error;
pub mod matrix;
pub mod projection;
pub mod random;
pub mod seed;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{khatri_rao, Matrix};
pub use projection::{
    family_by_name, family_names, Embedding, FamilyConfig, Projection, ProjectionFamily,
    CP_FAMILY, GAUSSIAN_FAMILY, TT_FAMILY, VERY_SPARSE_FAMILY,
};
pub use random::{random_input, InputFormat, InputSpec};
pub use seed::{Seed, RNG_TAG};
pub use tensor::{
    frobenius_norm, inner, CPTensor, DenseTensor, Shape, TTCore, TTTensor, Tensor, TensorRef,
    DEFAULT_ORACLE_CAP,
};
