//! Tensor-train format: a chain of order-3 cores with uniform interior rank.
//!
//! Core n has dimensions (r_{n-1}, d_n, r_n) with r_0 = r_N = 1 and every
//! interior rank equal to one number R. Element (i_1, ..., i_N) is the
//! product of the matrix slices G1[:, i_1, :] ... GN[:, i_N, :], a 1x1 matrix
//! once the chain collapses.

use crate::error::{Error, Result};
use crate::tensor::{DenseTensor, Shape, DEFAULT_ORACLE_CAP};

/// One order-3 TT core, stored row-major over (left, mode, right).
#[derive(Debug, Clone, PartialEq)]
pub struct TTCore {
    left: usize,
    mode: usize,
    right: usize,
    data: Vec<f64>,
}

impl TTCore {
    pub fn new(left: usize, mode: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        if left == 0 || mode == 0 || right == 0 {
            return Err(Error::InvalidParameter("core dimensions must be positive".into()));
        }
        if data.len() != left * mode * right {
            return Err(Error::LengthMismatch(left * mode * right, data.len()));
        }
        Ok(TTCore { left, mode, right, data })
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn right(&self) -> usize {
        self.right
    }

    #[inline]
    pub fn at(&self, a: usize, i: usize, b: usize) -> f64 {
        self.data[(a * self.mode + i) * self.right + b]
    }

    /// Row b -> G[a, i, b] of the slice for mode index `i`, contiguous.
    #[inline]
    pub fn slice_row(&self, a: usize, i: usize) -> &[f64] {
        &self.data[(a * self.mode + i) * self.right..][..self.right]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }
}

/// Tensor in TT format.
#[derive(Debug, Clone, PartialEq)]
pub struct TTTensor {
    shape: Shape,
    rank: usize,
    cores: Vec<TTCore>,
}

impl TTTensor {
    /// Validates the chain: boundary ranks 1, interior ranks all `rank`,
    /// mode sizes matching `shape`. An order-1 tensor has no interior ranks,
    /// so `rank` must be 1 there.
    pub fn new(shape: Shape, rank: usize, cores: Vec<TTCore>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidParameter("rank must be positive".into()));
        }
        let n = shape.order();
        if cores.len() != n {
            return Err(Error::OrderMismatch { expected: n, got: cores.len() });
        }
        if n == 1 && rank != 1 {
            return Err(Error::InvalidParameter(
                "an order-1 TT tensor has no interior ranks; rank must be 1".into(),
            ));
        }
        for (ix, (core, &d)) in cores.iter().zip(shape.dims()).enumerate() {
            let want_left = if ix == 0 { 1 } else { rank };
            let want_right = if ix == n - 1 { 1 } else { rank };
            if core.left != want_left || core.mode != d || core.right != want_right {
                return Err(Error::InvalidParameter(format!(
                    "core {ix} has dims ({}, {}, {}), expected ({want_left}, {d}, {want_right})",
                    core.left, core.mode, core.right
                )));
            }
        }
        Ok(TTTensor { shape, rank, cores })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cores(&self) -> &[TTCore] {
        &self.cores
    }

    /// Scales the represented tensor by `c`, touching only the first core.
    pub fn scale_in_place(&mut self, c: f64) {
        self.cores[0].scale(c);
    }

    /// Element (i_1, ..., i_N) by direct chain multiplication. O(N R^2) per
    /// element; meant for spot checks, not bulk evaluation.
    pub fn element(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.shape.order());
        // left-to-right vector-matrix products through the chain
        let mut vec = vec![1.0];
        for (core, &i) in self.cores.iter().zip(idx) {
            let mut next = vec![0.0; core.right];
            for (a, &v) in vec.iter().enumerate() {
                for (nv, &gv) in next.iter_mut().zip(core.slice_row(a, i)) {
                    *nv += v * gv;
                }
            }
            vec = next;
        }
        vec[0]
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::tensor::frobenius_norm(self.into())
    }
}

/// Materializes a TT tensor with the default element cap.
pub fn tt_to_dense(t: &TTTensor) -> Result<DenseTensor> {
    tt_to_dense_capped(t, DEFAULT_ORACLE_CAP)
}

/// Materializes a TT tensor, refusing above `cap` elements.
///
/// Left-to-right sweep keeping a (prefix x r_n) panel; O(D R^2 d) time,
/// O(D R) transient memory.
pub fn tt_to_dense_capped(t: &TTTensor, cap: usize) -> Result<DenseTensor> {
    let size = t.shape.size();
    if size > cap {
        return Err(Error::DensifyCap { elems: size, cap });
    }
    let mut panel = vec![1.0];
    let mut prefix = 1usize;
    let mut right = 1usize;
    for core in &t.cores {
        let d = core.mode;
        let r = core.right;
        let mut next = vec![0.0; prefix * d * r];
        for i in 0..d {
            for p in 0..prefix {
                let wrow = &panel[p * right..(p + 1) * right];
                // new flat index p + prefix * i keeps earlier modes fastest
                let orow = &mut next[(i * prefix + p) * r..][..r];
                for (a, &wv) in wrow.iter().enumerate() {
                    for (o, &gv) in orow.iter_mut().zip(core.slice_row(a, i)) {
                        *o += wv * gv;
                    }
                }
            }
        }
        panel = next;
        prefix *= d;
        right = r;
    }
    DenseTensor::new(t.shape.clone(), panel)
}
