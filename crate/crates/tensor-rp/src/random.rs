//! Samplers for projection maps and for random test inputs.
//!
//! Stream layout: row i of a projection draws core/factor n from
//! `seed.child(i).child(n)`; dense and sparse rows use component 0. A row's
//! stream therefore never moves when k changes, and the three Gaussian
//! families produce bit-identical rows in the order-1 case where they
//! coincide.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::projection::{
    CPProjection, DenseGaussianProjection, SparseRow, TTProjection, VerySparseProjection,
};
use crate::seed::{ChaCha8Rng, Seed};
use crate::tensor::{CPTensor, Shape, TTCore, TTTensor, Tensor};
use rand::Rng;
use rand_distr::StandardNormal;

/// Requested format for a random input tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Tt,
    Cp,
}

impl InputFormat {
    pub fn name(self) -> &'static str {
        match self {
            InputFormat::Tt => "tt",
            InputFormat::Cp => "cp",
        }
    }
}

/// Description of a random input tensor to sample.
#[derive(Debug, Clone)]
pub struct InputSpec {
    pub shape: Shape,
    pub format: InputFormat,
    pub rank: usize,
    pub unit_norm: bool,
}

fn normal_vec(rng: &mut ChaCha8Rng, n: usize, sigma: f64) -> Vec<f64> {
    (0..n).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn tt_rank_ends(n: usize, rank: usize, ix: usize) -> (usize, usize) {
    let left = if ix == 0 { 1 } else { rank };
    let right = if ix == n - 1 { 1 } else { rank };
    (left, right)
}

/// One TT row with the variance split that makes the map an expected
/// isometry: end cores get entry variance 1/sqrt(R), interior cores 1/R.
/// An order-1 row is a plain Gaussian vector (variance 1, R forced to 1).
fn tt_row(shape: &Shape, rank: usize, row_seed: Seed) -> TTTensor {
    let n = shape.order();
    let cores = shape
        .dims()
        .iter()
        .enumerate()
        .map(|(ix, &d)| {
            let (l, r) = tt_rank_ends(n, rank, ix);
            let variance = if n == 1 {
                1.0
            } else if ix == 0 || ix == n - 1 {
                1.0 / (rank as f64).sqrt()
            } else {
                1.0 / rank as f64
            };
            let mut rng = row_seed.child(ix as u64).rng();
            let data = normal_vec(&mut rng, l * d * r, variance.sqrt());
            TTCore::new(l, d, r, data).expect("dimensions are consistent")
        })
        .collect();
    TTTensor::new(shape.clone(), rank, cores).expect("chain is consistent")
}

/// One CP row: every factor entry has variance (1/R)^(1/N).
fn cp_row(shape: &Shape, rank: usize, row_seed: Seed) -> CPTensor {
    let n = shape.order() as f64;
    let sigma = (1.0 / rank as f64).powf(1.0 / (2.0 * n));
    let factors = shape
        .dims()
        .iter()
        .enumerate()
        .map(|(ix, &d)| {
            let mut rng = row_seed.child(ix as u64).rng();
            Matrix::from_vec(d, rank, normal_vec(&mut rng, d * rank, sigma))
                .expect("length matches")
        })
        .collect();
    CPTensor::new(shape.clone(), rank, factors).expect("factors are consistent")
}

fn check_k_rank(k: usize, rank: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if rank == 0 {
        return Err(Error::InvalidParameter("rank must be positive".into()));
    }
    Ok(())
}

/// Samples a k-row TT projection for tensors of `shape`.
pub fn sample_tt_projection(
    shape: &Shape,
    rank: usize,
    k: usize,
    seed: Seed,
) -> Result<TTProjection> {
    check_k_rank(k, rank)?;
    if shape.order() == 1 && rank != 1 {
        return Err(Error::InvalidParameter(
            "order-1 TT projections have no interior ranks; use rank 1".into(),
        ));
    }
    let rows = (0..k).map(|i| tt_row(shape, rank, seed.child(i as u64))).collect();
    TTProjection::new(shape.clone(), rank, rows)
}

/// Samples a k-row CP projection for tensors of `shape`.
pub fn sample_cp_projection(
    shape: &Shape,
    rank: usize,
    k: usize,
    seed: Seed,
) -> Result<CPProjection> {
    check_k_rank(k, rank)?;
    let rows = (0..k).map(|i| cp_row(shape, rank, seed.child(i as u64))).collect();
    CPProjection::new(shape.clone(), rank, rows)
}

/// Samples a dense k x D Gaussian projection with unit-variance entries.
pub fn sample_gaussian_rp(dim: usize, k: usize, seed: Seed) -> Result<DenseGaussianProjection> {
    check_k_rank(k, 1)?;
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let rows = (0..k)
        .map(|i| {
            let mut rng = seed.child(i as u64).child(0).rng();
            normal_vec(&mut rng, dim, 1.0)
        })
        .collect();
    DenseGaussianProjection::new(dim, rows)
}

/// Samples a k x D very sparse sign projection: entries are +-sqrt(s) with
/// probability 1/(2s) each and 0 otherwise. Rows are drawn by geometric gap
/// skipping, equivalent in distribution to sampling every entry.
pub fn sample_very_sparse_rp(
    dim: usize,
    k: usize,
    sparsity: f64,
    seed: Seed,
) -> Result<VerySparseProjection> {
    check_k_rank(k, 1)?;
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(sparsity >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sparsity must be at least 1, got {sparsity}"
        )));
    }
    let root_s = sparsity.sqrt();
    let ln_q = if sparsity > 1.0 { (1.0 - 1.0 / sparsity).ln() } else { f64::NEG_INFINITY };
    let rows = (0..k)
        .map(|i| {
            let mut rng = seed.child(i as u64).child(0).rng();
            let mut indices = Vec::new();
            let mut values = Vec::new();
            let mut pos = 0usize;
            while pos < dim {
                if sparsity > 1.0 {
                    // gap ~ Geometric(1/s) on {0, 1, ...}
                    let u = 1.0 - rng.gen::<f64>(); // (0, 1]
                    let gap = (u.ln() / ln_q).floor();
                    if gap >= (dim - pos) as f64 {
                        break;
                    }
                    pos += gap as usize;
                }
                indices.push(pos);
                values.push(if rng.gen::<bool>() { root_s } else { -root_s });
                pos += 1;
            }
            SparseRow::new(indices, values)
        })
        .collect();
    VerySparseProjection::new(dim, sparsity, rows)
}

/// Random TT tensor with unit-variance core entries.
pub fn random_tt_tensor(shape: &Shape, rank: usize, seed: Seed) -> Result<TTTensor> {
    if rank == 0 {
        return Err(Error::InvalidParameter("rank must be positive".into()));
    }
    if shape.order() == 1 && rank != 1 {
        return Err(Error::InvalidParameter(
            "order-1 TT tensors have no interior ranks; use rank 1".into(),
        ));
    }
    let n = shape.order();
    let cores = shape
        .dims()
        .iter()
        .enumerate()
        .map(|(ix, &d)| {
            let (l, r) = tt_rank_ends(n, rank, ix);
            let mut rng = seed.child(ix as u64).rng();
            TTCore::new(l, d, r, normal_vec(&mut rng, l * d * r, 1.0)).expect("consistent")
        })
        .collect();
    TTTensor::new(shape.clone(), rank, cores)
}

/// Random CP tensor with unit-variance factor entries.
pub fn random_cp_tensor(shape: &Shape, rank: usize, seed: Seed) -> Result<CPTensor> {
    if rank == 0 {
        return Err(Error::InvalidParameter("rank must be positive".into()));
    }
    let factors = shape
        .dims()
        .iter()
        .enumerate()
        .map(|(ix, &d)| {
            let mut rng = seed.child(ix as u64).rng();
            Matrix::from_vec(d, rank, normal_vec(&mut rng, d * rank, 1.0)).expect("consistent")
        })
        .collect();
    CPTensor::new(shape.clone(), rank, factors)
}

/// Random dense tensor with unit-variance entries.
pub fn random_dense_tensor(shape: &Shape, seed: Seed) -> crate::tensor::DenseTensor {
    let mut rng = seed.child(0).rng();
    let values = normal_vec(&mut rng, shape.size(), 1.0);
    crate::tensor::DenseTensor::new(shape.clone(), values).expect("length matches")
}

/// Samples a random low-rank input tensor per `spec`.
///
/// With `unit_norm` set, the result is rescaled in place to Frobenius norm 1.
/// A zero-norm draw is resampled once from a derived seed; a second zero is
/// reported as degenerate.
pub fn random_input(spec: &InputSpec, seed: Seed) -> Result<Tensor> {
    for attempt in 0..2u64 {
        let aseed = seed.child(attempt);
        let mut t = match spec.format {
            InputFormat::Tt => Tensor::Tt(random_tt_tensor(&spec.shape, spec.rank, aseed)?),
            InputFormat::Cp => Tensor::Cp(random_cp_tensor(&spec.shape, spec.rank, aseed)?),
        };
        let norm = t.frobenius_norm();
        if norm == 0.0 {
            continue;
        }
        if spec.unit_norm {
            t.scale_in_place(1.0 / norm);
        }
        return Ok(t);
    }
    Err(Error::DegenerateInput)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::TensorRef;

    fn mean_and_m2(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let m2 = values.iter().map(|v| v * v).sum::<f64>() / n;
        (mean, m2)
    }

    /// Pooled entry moments over ~1e6 samples must sit within 3 standard
    /// errors of the design variance for every core position.
    #[test]
    fn tt_core_entry_moments() {
        let shape = Shape::new(vec![8, 8, 8]).unwrap();
        let rank = 4;
        let k = 600; // 600 rows x 3 cores, >= 1e6 entries total
        let p = sample_tt_projection(&shape, rank, k, Seed::new(90)).unwrap();
        for core_ix in 0..3 {
            let mut entries = Vec::new();
            for row in p.rows() {
                entries.extend_from_slice(row.cores()[core_ix].values());
            }
            let want_var = if core_ix == 1 { 1.0 / rank as f64 } else { 1.0 / (rank as f64).sqrt() };
            let (mean, m2) = mean_and_m2(&entries);
            let n = entries.len() as f64;
            // se(mean) = sigma / sqrt(n); se(m2) ~ sigma^2 sqrt(2/n)
            let se_mean = want_var.sqrt() / n.sqrt();
            let se_m2 = want_var * (2.0 / n).sqrt();
            assert!(mean.abs() < 3.0 * se_mean, "core {core_ix} mean {mean}");
            assert!((m2 - want_var).abs() < 3.0 * se_m2, "core {core_ix} m2 {m2} want {want_var}");
        }
    }

    #[test]
    fn cp_factor_entry_moments() {
        let shape = Shape::new(vec![10, 10, 10, 10]).unwrap();
        let rank = 5;
        let k = 250;
        let p = sample_cp_projection(&shape, rank, k, Seed::new(91)).unwrap();
        let want_var = (1.0f64 / rank as f64).powf(1.0 / 4.0);
        let mut entries = Vec::new();
        for row in p.rows() {
            for f in row.factors() {
                entries.extend_from_slice(f.values());
            }
        }
        let (mean, m2) = mean_and_m2(&entries);
        let n = entries.len() as f64;
        assert!(mean.abs() < 3.0 * want_var.sqrt() / n.sqrt(), "mean {mean}");
        assert!((m2 - want_var).abs() < 3.0 * want_var * (2.0 / n).sqrt(), "m2 {m2}");
    }

    #[test]
    fn very_sparse_entry_moments_and_support() {
        let dim = 10_000;
        let s = 4.0;
        let k = 100;
        let p = sample_very_sparse_rp(dim, k, s, Seed::new(92)).unwrap();
        let mut nonzero = 0usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for row in p.rows() {
            nonzero += row.len();
            for &v in row.values() {
                assert!(v == s.sqrt() || v == -s.sqrt());
                sum += v;
                sum_sq += v * v;
            }
        }
        let n = (dim * k) as f64;
        // fraction nonzero ~ Binomial(n, 1/s)
        let frac = nonzero as f64 / n;
        let se_frac = ((1.0 / s) * (1.0 - 1.0 / s) / n).sqrt();
        assert!((frac - 1.0 / s).abs() < 5.0 * se_frac, "frac {frac}");
        let mean = sum / n;
        let m2 = sum_sq / n;
        assert!(mean.abs() < 3.0 / n.sqrt(), "mean {mean}");
        assert!((m2 - 1.0).abs() < 3.0 * (s + 2.0) * (1.0 / n).sqrt(), "m2 {m2}");
    }

    #[test]
    fn very_sparse_s_one_is_dense_signs() {
        let p = sample_very_sparse_rp(50, 3, 1.0, Seed::new(93)).unwrap();
        for row in p.rows() {
            assert_eq!(row.len(), 50);
            assert!(row.values().iter().all(|&v| v == 1.0 || v == -1.0));
        }
    }

    #[test]
    fn very_sparse_rejects_sub_one_sparsity() {
        assert!(sample_very_sparse_rp(10, 2, 0.5, Seed::new(1)).is_err());
        assert!(sample_very_sparse_rp(10, 2, f64::NAN, Seed::new(1)).is_err());
    }

    /// Drawing more rows must not disturb the rows already drawn.
    #[test]
    fn row_streams_do_not_move_when_k_grows() {
        let shape = Shape::new(vec![3, 3, 3]).unwrap();
        let seed = Seed::new(94);
        let small = sample_tt_projection(&shape, 2, 3, seed).unwrap();
        let large = sample_tt_projection(&shape, 2, 7, seed).unwrap();
        for (a, b) in small.rows().iter().zip(large.rows()) {
            assert_eq!(a, b);
        }
        let gs = sample_gaussian_rp(20, 2, seed).unwrap();
        let gl = sample_gaussian_rp(20, 5, seed).unwrap();
        assert_eq!(gs.rows()[0], gl.rows()[0]);
        assert_eq!(gs.rows()[1], gl.rows()[1]);
    }

    #[test]
    fn sampling_is_reproducible() {
        let shape = Shape::new(vec![4, 4]).unwrap();
        let a = sample_cp_projection(&shape, 3, 4, Seed::new(95)).unwrap();
        let b = sample_cp_projection(&shape, 3, 4, Seed::new(95)).unwrap();
        for (x, y) in a.rows().iter().zip(b.rows()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn order_one_tt_requires_rank_one() {
        let shape = Shape::new(vec![6]).unwrap();
        assert!(sample_tt_projection(&shape, 2, 3, Seed::new(1)).is_err());
        assert!(sample_tt_projection(&shape, 1, 3, Seed::new(1)).is_ok());
    }

    #[test]
    fn random_input_unit_norm_is_tight() {
        for (format, seed) in [(InputFormat::Tt, 96), (InputFormat::Cp, 97)] {
            let spec = InputSpec {
                shape: Shape::new(vec![3; 6]).unwrap(),
                format,
                rank: 4,
                unit_norm: true,
            };
            let t = random_input(&spec, Seed::new(seed)).unwrap();
            assert!((t.frobenius_norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_input_without_normalization_keeps_raw_norm() {
        let spec = InputSpec {
            shape: Shape::new(vec![5, 5]).unwrap(),
            format: InputFormat::Tt,
            rank: 2,
            unit_norm: false,
        };
        let t = random_input(&spec, Seed::new(98)).unwrap();
        assert!(t.frobenius_norm() > 0.0);
        assert!((t.frobenius_norm() - 1.0).abs() > 1e-6);
    }

    #[test]
    fn gaussian_rows_have_unit_variance() {
        let p = sample_gaussian_rp(5000, 40, Seed::new(99)).unwrap();
        let mut all = Vec::new();
        for row in p.rows() {
            all.extend_from_slice(row);
        }
        let (mean, m2) = mean_and_m2(&all);
        let n = all.len() as f64;
        assert!(mean.abs() < 3.0 / n.sqrt());
        assert!((m2 - 1.0).abs() < 3.0 * (2.0 / n).sqrt());
    }

    #[test]
    fn describe_mentions_format_and_rank() {
        let spec = InputSpec {
            shape: Shape::new(vec![3, 3]).unwrap(),
            format: InputFormat::Cp,
            rank: 2,
            unit_norm: false,
        };
        let t = random_input(&spec, Seed::new(100)).unwrap();
        let d = match &t {
            Tensor::Cp(c) => TensorRef::from(c).describe(),
            _ => unreachable!(),
        };
        assert!(d.contains("cp") && d.contains("rank=2"));
    }
}
