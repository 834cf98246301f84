//! Inner-product kernels between tensor formats.
//!
//! All kernels contract mode by mode with fixed loop order, so results are
//! bit-reproducible for given operands. None of them materializes a full
//! array; the dense-input kernels stream over the dense operand only.

use crate::error::{Error, Result};
use crate::tensor::{CPTensor, DenseTensor, TTTensor};

/// <a, b> for two TT tensors of equal shape.
///
/// Sweeps a boundary matrix M of size (r_a x r_b) through the chain:
/// M' = sum_i A_i^T M B_i. O(N d R_a R_b (R_a + R_b)) time.
pub fn tt_inner_tt(a: &TTTensor, b: &TTTensor) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(a.shape().clone(), b.shape().clone()));
    }
    let mut m = vec![1.0];
    let mut la = 1usize;
    let mut lb = 1usize;
    for (ca, cb) in a.cores().iter().zip(b.cores()) {
        let d = ca.mode();
        let ra = ca.right();
        let rb = cb.right();
        let mut next = vec![0.0; ra * rb];
        let mut tmp = vec![0.0; ra * lb];
        for i in 0..d {
            tmp.iter_mut().for_each(|v| *v = 0.0);
            // tmp[p, q] = sum_a A[a, i, p] * M[a, q]
            for ai in 0..la {
                let arow = ca.slice_row(ai, i);
                let mrow = &m[ai * lb..(ai + 1) * lb];
                for (p, &av) in arow.iter().enumerate() {
                    let trow = &mut tmp[p * lb..(p + 1) * lb];
                    for (t, &mv) in trow.iter_mut().zip(mrow) {
                        *t += av * mv;
                    }
                }
            }
            // next[p, r] += sum_q tmp[p, q] * B[q, i, r]
            for p in 0..ra {
                let trow = &tmp[p * lb..(p + 1) * lb];
                let nrow = &mut next[p * rb..(p + 1) * rb];
                for (q, &tv) in trow.iter().enumerate() {
                    for (n, &bv) in nrow.iter_mut().zip(cb.slice_row(q, i)) {
                        *n += tv * bv;
                    }
                }
            }
        }
        m = next;
        la = ra;
        lb = rb;
    }
    debug_assert_eq!(la * lb, 1);
    Ok(m[0])
}

/// <a, b> for a TT tensor against a CP tensor of equal shape.
///
/// Carries an (r_n x R_cp) boundary through the chain, absorbing one factor
/// per mode. O(N d R_tt^2 R_cp) time.
pub fn tt_inner_cp(a: &TTTensor, b: &CPTensor) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(a.shape().clone(), b.shape().clone()));
    }
    let rc = b.rank();
    let mut m = vec![1.0; rc];
    let mut la = 1usize;
    for (core, factor) in a.cores().iter().zip(b.factors()) {
        let d = core.mode();
        let ra = core.right();
        let mut next = vec![0.0; ra * rc];
        let mut tmp = vec![0.0; ra * rc];
        for i in 0..d {
            tmp.iter_mut().for_each(|v| *v = 0.0);
            // tmp[p, r] = sum_a A[a, i, p] * M[a, r]
            for ai in 0..la {
                let arow = core.slice_row(ai, i);
                let mrow = &m[ai * rc..(ai + 1) * rc];
                for (p, &av) in arow.iter().enumerate() {
                    let trow = &mut tmp[p * rc..(p + 1) * rc];
                    for (t, &mv) in trow.iter_mut().zip(mrow) {
                        *t += av * mv;
                    }
                }
            }
            // next[p, r] += tmp[p, r] * F[i, r]
            let frow = factor.row(i);
            for p in 0..ra {
                let trow = &tmp[p * rc..(p + 1) * rc];
                let nrow = &mut next[p * rc..(p + 1) * rc];
                for ((n, &tv), &fv) in nrow.iter_mut().zip(trow).zip(frow) {
                    *n += tv * fv;
                }
            }
        }
        m = next;
        la = ra;
    }
    debug_assert_eq!(la, 1);
    Ok(m.iter().sum())
}

/// <a, b> for two CP tensors of equal shape: elementwise product of the
/// per-mode Gram matrices, then a full sum. O(N d R_a R_b) time.
pub fn cp_inner_cp(a: &CPTensor, b: &CPTensor) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(a.shape().clone(), b.shape().clone()));
    }
    let ra = a.rank();
    let rb = b.rank();
    let mut acc = vec![1.0; ra * rb];
    let mut gram = vec![0.0; ra * rb];
    for (fa, fb) in a.factors().iter().zip(b.factors()) {
        gram.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..fa.rows() {
            let arow = fa.row(i);
            let brow = fb.row(i);
            for (r, &av) in arow.iter().enumerate() {
                let grow = &mut gram[r * rb..(r + 1) * rb];
                for (g, &bv) in grow.iter_mut().zip(brow) {
                    *g += av * bv;
                }
            }
        }
        for (a, &g) in acc.iter_mut().zip(&gram) {
            *a *= g;
        }
    }
    Ok(acc.iter().sum())
}

/// <t, x> for a TT tensor against a dense tensor of equal shape.
///
/// Folds the dense array through the chain one mode at a time, never
/// materializing the TT side. O(D R^2) time, O(D R) transient memory.
pub fn tt_inner_dense(t: &TTTensor, x: &DenseTensor) -> Result<f64> {
    if t.shape() != x.shape() {
        return Err(Error::ShapeMismatch(t.shape().clone(), x.shape().clone()));
    }
    let mut w = x.values().to_vec();
    let mut left = 1usize;
    let mut tail = x.shape().size();
    for core in t.cores() {
        let d = core.mode();
        let r = core.right();
        tail /= d;
        let mut next = vec![0.0; r * tail];
        for a in 0..left {
            let wa = &w[a * d * tail..(a + 1) * d * tail];
            for i in 0..d {
                for (p, &gv) in core.slice_row(a, i).iter().enumerate() {
                    let nrow = &mut next[p * tail..(p + 1) * tail];
                    // w[a][i + d * rest], stride d over rest
                    let mut at = i;
                    for n in nrow.iter_mut() {
                        *n += gv * wa[at];
                        at += d;
                    }
                }
            }
        }
        w = next;
        left = r;
    }
    debug_assert_eq!(w.len(), 1);
    Ok(w[0])
}

/// <c, x> for a CP tensor against a dense tensor of equal shape.
///
/// Folds the dense array against each rank-1 column in turn. O(D R) time.
pub fn cp_inner_dense(c: &CPTensor, x: &DenseTensor) -> Result<f64> {
    if c.shape() != x.shape() {
        return Err(Error::ShapeMismatch(c.shape().clone(), x.shape().clone()));
    }
    let dims = x.shape().dims();
    let mut total = 0.0;
    let mut cur: Vec<f64> = Vec::new();
    let mut next: Vec<f64> = Vec::new();
    for r in 0..c.rank() {
        cur.clear();
        cur.extend_from_slice(x.values());
        for (f, &d) in c.factors().iter().zip(dims) {
            let tail = cur.len() / d;
            next.clear();
            next.resize(tail, 0.0);
            for i in 0..d {
                let fv = f.at(i, r);
                let mut at = i;
                for n in next.iter_mut() {
                    *n += fv * cur[at];
                    at += d;
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        total += cur[0];
    }
    Ok(total)
}
