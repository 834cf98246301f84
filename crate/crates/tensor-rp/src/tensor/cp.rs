//! CP format: a sum of R rank-1 terms, one factor matrix per mode.
//!
//! Factor n is d_n x R; element (i_1, ..., i_N) is
//! sum_r prod_n F_n[i_n, r].

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tensor::{DenseTensor, Shape, DEFAULT_ORACLE_CAP};

#[derive(Debug, Clone, PartialEq)]
pub struct CPTensor {
    shape: Shape,
    rank: usize,
    factors: Vec<Matrix>,
}

impl CPTensor {
    pub fn new(shape: Shape, rank: usize, factors: Vec<Matrix>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidParameter("rank must be positive".into()));
        }
        if factors.len() != shape.order() {
            return Err(Error::OrderMismatch { expected: shape.order(), got: factors.len() });
        }
        for (ix, (f, &d)) in factors.iter().zip(shape.dims()).enumerate() {
            if f.rows() != d || f.cols() != rank {
                return Err(Error::InvalidParameter(format!(
                    "factor {ix} is {}x{}, expected {d}x{rank}",
                    f.rows(),
                    f.cols()
                )));
            }
        }
        Ok(CPTensor { shape, rank, factors })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    /// Scales the represented tensor by `c`, touching only the first factor.
    pub fn scale_in_place(&mut self, c: f64) {
        self.factors[0].scale(c);
    }

    /// Element (i_1, ..., i_N) as the explicit sum of products.
    pub fn element(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.shape.order());
        (0..self.rank)
            .map(|r| {
                self.factors
                    .iter()
                    .zip(idx)
                    .map(|(f, &i)| f.at(i, r))
                    .product::<f64>()
            })
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::tensor::frobenius_norm(self.into())
    }
}

/// Materializes a CP tensor with the default element cap.
pub fn cp_to_dense(t: &CPTensor) -> Result<DenseTensor> {
    cp_to_dense_capped(t, DEFAULT_ORACLE_CAP)
}

/// Materializes a CP tensor, refusing above `cap` elements. Accumulates one
/// rank-1 term at a time in flat order; O(D R) time.
pub fn cp_to_dense_capped(t: &CPTensor, cap: usize) -> Result<DenseTensor> {
    let size = t.shape.size();
    if size > cap {
        return Err(Error::DensifyCap { elems: size, cap });
    }
    let mut values = vec![0.0; size];
    for r in 0..t.rank {
        let mut comp = t.factors[0].column(r);
        for f in &t.factors[1..] {
            let col = f.column(r);
            let mut next = Vec::with_capacity(comp.len() * col.len());
            // later modes vary slower: new flat index p + len(comp) * i
            for &cv in &col {
                for &pv in &comp {
                    next.push(pv * cv);
                }
            }
            comp = next;
        }
        for (v, c) in values.iter_mut().zip(&comp) {
            *v += c;
        }
    }
    DenseTensor::new(t.shape.clone(), values)
}
