//! Dense tensors stored as one flat array in first-index-fastest order.

use crate::error::{Error, Result};
use crate::tensor::Shape;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    values: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Shape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.size() {
            return Err(Error::LengthMismatch(shape.size(), values.len()));
        }
        Ok(DenseTensor { shape, values })
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.size();
        DenseTensor { shape, values: vec![0.0; n] }
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut idx = vec![0usize; shape.order()];
        let mut values = Vec::with_capacity(shape.size());
        for _ in 0..shape.size() {
            values.push(f(&idx));
            // advance the multi-index, first mode fastest
            for (i, d) in idx.iter_mut().zip(shape.dims()) {
                *i += 1;
                if *i < *d {
                    break;
                }
                *i = 0;
            }
        }
        DenseTensor { shape, values }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.order());
        let mut flat = 0usize;
        for (&i, &d) in idx.iter().zip(self.shape.dims()).rev() {
            debug_assert!(i < d);
            flat = flat * d + i;
        }
        flat
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// <x, y> for dense tensors of equal shape, accumulated in f64 in flat order.
pub fn dense_inner(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    if a.shape != b.shape {
        return Err(Error::ShapeMismatch(a.shape.clone(), b.shape.clone()));
    }
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum())
}

/// alpha * a + beta * b, elementwise.
pub fn lin_comb(alpha: f64, a: &DenseTensor, beta: f64, b: &DenseTensor) -> Result<DenseTensor> {
    if a.shape != b.shape {
        return Err(Error::ShapeMismatch(a.shape.clone(), b.shape.clone()));
    }
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| alpha * x + beta * y)
        .collect();
    Ok(DenseTensor { shape: a.shape.clone(), values })
}
