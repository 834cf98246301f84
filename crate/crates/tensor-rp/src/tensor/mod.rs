//! Tensor formats: dense arrays plus the TT and CP low-rank representations.
//!
//! All formats share one linearization: element (i_1, ..., i_N) of a tensor
//! with mode sizes (d_1, ..., d_N) sits at flat offset
//! i_1 + d_1 * (i_2 + d_2 * (i_3 + ...)), the first index varying fastest.
//! Every vectorization, reshape and Kronecker pairing in the crate follows
//! that order.

mod cp;
mod dense;
mod inner;
mod tt;

pub use cp::{cp_to_dense, cp_to_dense_capped, CPTensor};
pub use dense::{dense_inner, lin_comb, DenseTensor};
pub use inner::{cp_inner_cp, cp_inner_dense, tt_inner_cp, tt_inner_dense, tt_inner_tt};
pub use tt::{tt_to_dense, tt_to_dense_capped, TTCore, TTTensor};

use crate::error::{Error, Result};
use std::fmt;

/// Default cap on densification, in elements. Densifying is meant for
/// oracles, baselines and small inputs; anything larger is refused.
pub const DEFAULT_ORACLE_CAP: usize = 10_000_000;

/// Mode sizes (d_1, ..., d_N) of an order-N tensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("shape needs at least one mode".into()));
        }
        let mut size = 1usize;
        for &d in &dims {
            if d == 0 {
                return Err(Error::InvalidParameter("mode sizes must be positive".into()));
            }
            size = size.checked_mul(d).ok_or(Error::SizeOverflow)?;
        }
        Ok(Shape { dims })
    }

    /// d^N hypercube shape, the form all experiment presets use.
    pub fn cube(d: usize, n: usize) -> Result<Self> {
        Shape::new(vec![d; n])
    }

    /// Number of modes N.
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total number of elements, prod d_n.
    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Borrowed view of a tensor in any supported format.
#[derive(Debug, Clone, Copy)]
pub enum TensorRef<'a> {
    Dense(&'a DenseTensor),
    Tt(&'a TTTensor),
    Cp(&'a CPTensor),
}

impl<'a> TensorRef<'a> {
    pub fn shape(&self) -> &'a Shape {
        match *self {
            TensorRef::Dense(t) => t.shape(),
            TensorRef::Tt(t) => t.shape(),
            TensorRef::Cp(t) => t.shape(),
        }
    }

    pub fn format_name(&self) -> &'static str {
        match self {
            TensorRef::Dense(_) => "dense",
            TensorRef::Tt(_) => "tt",
            TensorRef::Cp(_) => "cp",
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(*self)
    }

    /// Materializes the full array, refusing above `cap` elements.
    pub fn to_dense_capped(&self, cap: usize) -> Result<DenseTensor> {
        match self {
            TensorRef::Dense(t) => {
                if t.shape().size() > cap {
                    return Err(Error::DensifyCap { elems: t.shape().size(), cap });
                }
                Ok((*t).clone())
            }
            TensorRef::Tt(t) => tt_to_dense_capped(t, cap),
            TensorRef::Cp(t) => cp_to_dense_capped(t, cap),
        }
    }

    /// One-line description of format, shape and rank, for diagnostics.
    pub fn describe(&self) -> String {
        match self {
            TensorRef::Dense(t) => format!("dense {}", t.shape()),
            TensorRef::Tt(t) => format!("tt {} rank={}", t.shape(), t.rank()),
            TensorRef::Cp(t) => format!("cp {} rank={}", t.shape(), t.rank()),
        }
    }
}

impl<'a> From<&'a DenseTensor> for TensorRef<'a> {
    fn from(t: &'a DenseTensor) -> Self {
        TensorRef::Dense(t)
    }
}

impl<'a> From<&'a TTTensor> for TensorRef<'a> {
    fn from(t: &'a TTTensor) -> Self {
        TensorRef::Tt(t)
    }
}

impl<'a> From<&'a CPTensor> for TensorRef<'a> {
    fn from(t: &'a CPTensor) -> Self {
        TensorRef::Cp(t)
    }
}

/// Owned tensor in any supported format.
#[derive(Debug, Clone)]
pub enum Tensor {
    Dense(DenseTensor),
    Tt(TTTensor),
    Cp(CPTensor),
}

impl Tensor {
    pub fn as_ref(&self) -> TensorRef<'_> {
        match self {
            Tensor::Dense(t) => TensorRef::Dense(t),
            Tensor::Tt(t) => TensorRef::Tt(t),
            Tensor::Cp(t) => TensorRef::Cp(t),
        }
    }

    pub fn shape(&self) -> &Shape {
        self.as_ref().shape()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.as_ref().frobenius_norm()
    }

    /// Multiplies the represented tensor by `c` without changing structure.
    pub fn scale_in_place(&mut self, c: f64) {
        match self {
            Tensor::Dense(t) => t.scale(c),
            Tensor::Tt(t) => t.scale_in_place(c),
            Tensor::Cp(t) => t.scale_in_place(c),
        }
    }
}

/// Inner product between two tensors of any format pair.
///
/// Low-rank pairs are contracted in their native formats; only pairs
/// involving a dense tensor touch full arrays, and then only the one that is
/// already dense.
pub fn inner(a: TensorRef<'_>, b: TensorRef<'_>) -> Result<f64> {
    use TensorRef::*;
    match (a, b) {
        (Dense(x), Dense(y)) => dense_inner(x, y),
        (Tt(x), Tt(y)) => tt_inner_tt(x, y),
        (Cp(x), Cp(y)) => cp_inner_cp(x, y),
        (Tt(x), Cp(y)) | (Cp(y), Tt(x)) => tt_inner_cp(x, y),
        (Tt(x), Dense(y)) | (Dense(y), Tt(x)) => tt_inner_dense(x, y),
        (Cp(x), Dense(y)) | (Dense(y), Cp(x)) => cp_inner_dense(x, y),
    }
}

/// Frobenius norm in the tensor's native format.
pub fn frobenius_norm(t: TensorRef<'_>) -> f64 {
    let sq = match t {
        TensorRef::Dense(x) => x.values().iter().map(|v| v * v).sum(),
        // self-inner products can come out a hair negative in floating point
        TensorRef::Tt(x) => tt_inner_tt(x, x).expect("same shape"),
        TensorRef::Cp(x) => cp_inner_cp(x, x).expect("same shape"),
    };
    sq.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_rejects_empty_and_zero() {
        assert!(Shape::new(vec![]).is_err());
        assert!(Shape::new(vec![3, 0]).is_err());
    }

    #[test]
    fn shape_rejects_overflow() {
        assert!(matches!(Shape::new(vec![usize::MAX, 2]), Err(Error::SizeOverflow)));
    }

    #[test]
    fn shape_size_and_display() {
        let s = Shape::new(vec![4, 4, 3]).unwrap();
        assert_eq!(s.size(), 48);
        assert_eq!(s.order(), 3);
        assert_eq!(s.to_string(), "4x4x3");
    }
}
