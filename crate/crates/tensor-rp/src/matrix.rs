//! Minimal dense matrix (row-major) and the column-wise Khatri-Rao product.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch(rows * cols, data.len()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }

    /// Row `i` as a contiguous slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch(self.cols, other.rows));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let lrow = self.row(i);
            for (j, &lv) in lrow.iter().enumerate() {
                let rrow = other.row(j);
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &rv) in orow.iter_mut().zip(rrow) {
                    *o += lv * rv;
                }
            }
        }
        Ok(out)
    }
}

/// Column-wise Kronecker (Khatri-Rao) product.
///
/// Column j of the result is a_j (x) b_j with the index of `a` varying
/// slowest: entry (ia * b.rows + ib, j) equals a[ia, j] * b[ib, j]. Chained
/// right-to-left over the factor list, this matches the first-index-fastest
/// tensor linearization used everywhere in the crate.
pub fn khatri_rao(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.cols {
        return Err(Error::ColumnMismatch(a.cols, b.cols));
    }
    let mut out = Matrix::zeros(a.rows * b.rows, a.cols);
    for ia in 0..a.rows {
        let arow = a.row(ia);
        for ib in 0..b.rows {
            let brow = b.row(ib);
            let orow = &mut out.data[(ia * b.rows + ib) * a.cols..][..a.cols];
            for ((o, &av), &bv) in orow.iter_mut().zip(arow).zip(brow) {
                *o = av * bv;
            }
        }
    }
    Ok(out)
}
