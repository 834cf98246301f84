//! Statistical verification: closed-form moment identities for the
//! projection families, variance and embedding-size bounds, and Monte Carlo
//! estimators to check implementations against them.
//!
//! Estimators parallelize over trials with per-trial child seeds and reduce
//! in trial order, so reports are reproducible for a given seed regardless
//! of thread count.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::projection::{FamilyConfig, ProjectionFamily};
use crate::seed::Seed;
use crate::tensor::{DenseTensor, TensorRef};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Number of delete-one blocks used for jackknife variance errors.
pub const JACKKNIFE_BLOCKS: usize = 100;

/// Monte Carlo summary of a scalar statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub trials: usize,
    pub mean: f64,
    /// Sample variance (n-1 denominator).
    pub variance: f64,
    /// Standard error of the mean.
    pub mean_stderr: f64,
    /// Delete-block jackknife standard error of the variance.
    pub variance_stderr: f64,
}

impl MomentReport {
    /// Builds the report from raw per-trial values.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n >= 2, "need at least two trials");
        let mean = values.iter().sum::<f64>() / n as f64;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let variance = ss / (n - 1) as f64;
        MomentReport {
            trials: n,
            mean,
            variance,
            mean_stderr: (variance / n as f64).sqrt(),
            variance_stderr: jackknife_variance_stderr(values, JACKKNIFE_BLOCKS),
        }
    }
}

/// Delete-block jackknife standard error of the sample variance.
fn jackknife_variance_stderr(values: &[f64], blocks: usize) -> f64 {
    let n = values.len();
    let b = blocks.min(n);
    if b < 2 {
        return 0.0;
    }
    let s1: f64 = values.iter().sum();
    let s2: f64 = values.iter().map(|v| v * v).sum();
    let mut leave_out = Vec::with_capacity(b);
    for j in 0..b {
        let lo = j * n / b;
        let hi = (j + 1) * n / b;
        let block = &values[lo..hi];
        let nb = block.len();
        let b1: f64 = block.iter().sum();
        let b2: f64 = block.iter().map(|v| v * v).sum();
        let m = (n - nb) as f64;
        if m < 2.0 {
            return 0.0;
        }
        let v = ((s2 - b2) - (s1 - b1) * (s1 - b1) / m) / (m - 1.0);
        leave_out.push(v);
    }
    let mean_v = leave_out.iter().sum::<f64>() / b as f64;
    let ss: f64 = leave_out.iter().map(|v| (v - mean_v) * (v - mean_v)).sum();
    ((b - 1) as f64 / b as f64 * ss).sqrt()
}

/// Relative norm distortion |‖f(x)‖^2 / ‖x‖^2 - 1| of an embedding.
pub fn distortion(embedding: &crate::projection::Embedding, x: TensorRef<'_>) -> Result<f64> {
    let norm_sq = {
        let n = x.frobenius_norm();
        n * n
    };
    if norm_sq == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((embedding.norm_sq() / norm_sq - 1.0).abs())
}

/// Estimates mean and variance of ‖f(x)‖^2 over fresh draws of the map,
/// with x held fixed. Trial t samples its map from `seed.child(t)`.
pub fn estimate_projection_moments(
    family: &dyn ProjectionFamily,
    cfg: &FamilyConfig,
    k: usize,
    x: TensorRef<'_>,
    trials: usize,
    seed: Seed,
) -> Result<MomentReport> {
    assert!(trials >= 100, "moment estimates need at least 100 trials");
    let shape = x.shape().clone();
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let p = family.sample(&shape, cfg, k, seed.child(t as u64))?;
            Ok(p.project(x)?.norm_sq())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentReport::from_values(&values))
}

/// Upper bound on Var ‖f(x)‖^2 for the TT family on a unit-norm input:
/// (3 (1 + 2/R)^(N-1) - 1) / k. Multiply by ‖x‖^4 for general inputs.
pub fn variance_bound_tt(modes: usize, rank: usize, k: usize) -> f64 {
    let base = 1.0 + 2.0 / rank as f64;
    (3.0 * base.powi(modes as i32 - 1) - 1.0) / k as f64
}

/// Upper bound on Var ‖f(x)‖^2 for the CP family on a unit-norm input:
/// (3^(N-1) (1 + 2/R) - 1) / k.
pub fn variance_bound_cp(modes: usize, rank: usize, k: usize) -> f64 {
    let base = 1.0 + 2.0 / rank as f64;
    (3.0f64.powi(modes as i32 - 1) * base - 1.0) / k as f64
}

/// Exact variance of ‖f(X)‖^2 for the order-2 TT family:
/// (2 ‖X‖_F^4 + (6/R) tr((X^T X)^2)) / k.
pub fn tt_variance_exact_order2(x: &DenseTensor, rank: usize, k: usize) -> Result<f64> {
    let dims = x.shape().dims();
    if dims.len() != 2 {
        return Err(Error::OrderMismatch { expected: 2, got: dims.len() });
    }
    let (d1, d2) = (dims[0], dims[1]);
    let v = x.values();
    // X stored first index fastest: X[a, i] = v[a + d1 * i]
    let mut gram = vec![0.0; d2 * d2];
    for i in 0..d2 {
        for j in 0..d2 {
            let mut g = 0.0;
            for a in 0..d1 {
                g += v[a + d1 * i] * v[a + d1 * j];
            }
            gram[i * d2 + j] = g;
        }
    }
    let norm_sq: f64 = (0..d2).map(|i| gram[i * d2 + i]).sum();
    let trace_sq: f64 = gram.iter().map(|g| g * g).sum(); // tr((X^T X)^2), gram symmetric
    Ok((2.0 * norm_sq * norm_sq + 6.0 / rank as f64 * trace_sq) / k as f64)
}

/// Which family a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFormat {
    Tt,
    Cp,
}

/// Parameters of an embedding-size bound.
#[derive(Debug, Clone)]
pub struct BoundParams {
    /// Number of modes N.
    pub modes: usize,
    /// Row rank R.
    pub rank: usize,
    /// Embedding dimension k (informational; not used by `min_k_bound`).
    pub k: usize,
    /// Distortion level.
    pub epsilon: f64,
    /// Number of points to preserve.
    pub points: usize,
    /// Failure probability.
    pub delta: f64,
    /// Leading constant; the analysis leaves it unpinned, so it is supplied
    /// by the caller (1 by default).
    pub constant: f64,
}

impl BoundParams {
    fn validate(&self) -> Result<()> {
        if self.modes == 0 || self.rank == 0 || self.points == 0 {
            return Err(Error::InvalidParameter("modes, rank and points must be positive".into()));
        }
        if !(self.epsilon > 0.0) || !(self.delta > 0.0) || !(self.constant > 0.0) {
            return Err(Error::InvalidParameter(
                "epsilon, delta and constant must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Sufficient embedding dimension for distortion epsilon on `points` points
/// with failure probability delta:
/// TT: c eps^-2 (1 + 2/R)^N log^(2N)(m / delta),
/// CP: c eps^-2 3^(N-1) (1 + 2/R) log^(2N)(m / delta).
pub fn min_k_bound(p: &BoundParams, format: BoundFormat) -> Result<u64> {
    p.validate()?;
    let base = 1.0 + 2.0 / p.rank as f64;
    let family_term = match format {
        BoundFormat::Tt => base.powi(p.modes as i32),
        BoundFormat::Cp => 3.0f64.powi(p.modes as i32 - 1) * base,
    };
    let log_term = (p.points as f64 / p.delta).ln().powi(2 * p.modes as i32);
    let raw = p.constant * p.epsilon.powi(-2) * family_term * log_term;
    if !raw.is_finite() {
        return Err(Error::InvalidParameter("bound overflows".into()));
    }
    Ok(raw.ceil() as u64)
}

/// Monte Carlo check of E <A, B>^4 = 3 sigma^4 ‖B‖_F^4 for A with i.i.d.
/// N(0, sigma^2) entries. Returns the estimate of the fourth moment.
pub fn isserlis_check(sigma: f64, b: &Matrix, trials: usize, seed: Seed) -> MomentReport {
    assert!(trials >= 10_000, "fourth-moment estimates need at least 1e4 trials");
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed.child(t as u64).rng();
            let mut inner = 0.0;
            for &bv in b.values() {
                let a: f64 = rng.sample(StandardNormal);
                inner += sigma * a * bv;
            }
            inner * inner * inner * inner
        })
        .collect();
    MomentReport::from_values(&values)
}

/// Closed form matching [`isserlis_check`].
pub fn isserlis_expected(sigma: f64, b: &Matrix) -> f64 {
    let nsq = b.norm_sq();
    3.0 * sigma.powi(4) * nsq * nsq
}

/// Monte Carlo check of
/// E ‖B A‖_F^4 = n sigma^4 (n ‖B‖_F^4 + 2 tr((B^T B)^2))
/// for A of size m x n with i.i.d. N(0, sigma^2) entries.
pub fn wishart_check(
    sigma: f64,
    b: &Matrix,
    n: usize,
    trials: usize,
    seed: Seed,
) -> MomentReport {
    assert!(trials >= 10_000, "fourth-moment estimates need at least 1e4 trials");
    assert!(n >= 1);
    let m = b.cols();
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed.child(t as u64).rng();
            let mut a = Vec::with_capacity(m * n);
            for _ in 0..m * n {
                let z: f64 = rng.sample(StandardNormal);
                a.push(sigma * z);
            }
            // ‖B A‖_F^2 accumulated row by row
            let mut norm_sq = 0.0;
            for i in 0..b.rows() {
                let brow = b.row(i);
                for j in 0..n {
                    let mut acc = 0.0;
                    for (l, &bv) in brow.iter().enumerate() {
                        acc += bv * a[l * n + j];
                    }
                    norm_sq += acc * acc;
                }
            }
            norm_sq * norm_sq
        })
        .collect();
    MomentReport::from_values(&values)
}

/// Closed form matching [`wishart_check`].
pub fn wishart_expected(sigma: f64, b: &Matrix, n: usize) -> f64 {
    let nsq = b.norm_sq();
    // tr((B^T B)^2) = ‖B^T B‖_F^2
    let m = b.cols();
    let mut trace_sq = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mut g = 0.0;
            for r in 0..b.rows() {
                g += b.at(r, i) * b.at(r, j);
            }
            trace_sq += g * g;
        }
    }
    (n as f64) * sigma.powi(4) * (n as f64 * nsq * nsq + 2.0 * trace_sq)
}

/// Empirical exceedance P(distortion >= epsilon) over fresh draws of the
/// map. Trial t samples from `seed.child(t)`, so runs with different k but
/// the same seed share row streams and are positively coupled.
pub fn tail_check(
    family: &dyn ProjectionFamily,
    cfg: &FamilyConfig,
    k: usize,
    x: TensorRef<'_>,
    epsilon: f64,
    trials: usize,
    seed: Seed,
) -> Result<f64> {
    assert!(trials >= 1000, "tail estimates need at least 1e3 trials");
    if epsilon < 0.0 {
        return Err(Error::InvalidParameter("epsilon must be nonnegative".into()));
    }
    let shape = x.shape().clone();
    let hits: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<bool> {
            let p = family.sample(&shape, cfg, k, seed.child(t as u64))?;
            let e = p.project(x)?;
            Ok(distortion(&e, x)? >= epsilon)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(hits.iter().filter(|&&h| h).count() as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{Embedding, CP_FAMILY, GAUSSIAN_FAMILY, TT_FAMILY};
    use crate::random::{random_dense_tensor, random_input, InputFormat, InputSpec};
    use crate::tensor::Shape;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-30) || a == b
    }

    #[test]
    fn variance_bound_tt_examples() {
        assert!(close(variance_bound_tt(1, 1, 1), 2.0, 1e-12));
        assert!(close(variance_bound_tt(2, 2, 1), 5.0, 1e-12));
        // 1/k scaling
        assert!(close(variance_bound_tt(2, 2, 10), 0.5, 1e-12));
    }

    #[test]
    fn variance_bound_cp_examples() {
        assert!(close(variance_bound_cp(1, 1, 1), 2.0, 1e-12));
        assert!(close(variance_bound_cp(3, 2, 1), 17.0, 1e-12));
    }

    /// For two or more modes the CP bound dominates the TT bound at equal
    /// (N, R, k): 3^(N-2) >= (1 + 2/R)^(N-2). They coincide at N = 2 and,
    /// with the rank forced to 1, at N = 1.
    #[test]
    fn cp_bound_dominates_tt_bound() {
        assert!(close(variance_bound_tt(1, 1, 1), variance_bound_cp(1, 1, 1), 1e-12));
        for n in 2..=25 {
            for r in 1..=100 {
                let tt = variance_bound_tt(n, r, 1);
                let cp = variance_bound_cp(n, r, 1);
                assert!(
                    cp >= tt - 1e-9 * cp.abs(),
                    "N={n} R={r}: cp {cp} < tt {tt}"
                );
            }
        }
    }

    #[test]
    fn exact_order2_variance_examples() {
        // X = e1 e1^T: ‖X‖^4 = 1, tr((X^T X)^2) = 1
        let shape = Shape::new(vec![2, 2]).unwrap();
        let x = DenseTensor::new(shape, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(close(tt_variance_exact_order2(&x, 1, 1).unwrap(), 8.0, 1e-12));

        // X = I_2 / sqrt(2): ‖X‖^4 = 1, tr((X^T X)^2) = 1/2
        let shape = Shape::new(vec![2, 2]).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        let x = DenseTensor::new(shape, vec![s, 0.0, 0.0, s]).unwrap();
        assert!(close(tt_variance_exact_order2(&x, 3, 1).unwrap(), 3.0, 1e-12));
    }

    #[test]
    fn exact_order2_requires_order_two() {
        let x = DenseTensor::zeros(Shape::new(vec![2, 2, 2]).unwrap());
        assert!(tt_variance_exact_order2(&x, 1, 1).is_err());
    }

    /// The exact order-2 variance always sits below the order-2 bound
    /// (tr((X^T X)^2) <= ‖X‖^4 and 2 + 6/R <= 3(1 + 2/R) - 1).
    #[test]
    fn exact_order2_never_exceeds_bound() {
        for seed in 0..20u64 {
            let shape = Shape::new(vec![5, 4]).unwrap();
            let mut x = random_dense_tensor(&shape, Seed::new(seed));
            let norm = x.frobenius_norm();
            x.scale(1.0 / norm);
            for r in [1usize, 2, 7] {
                let exact = tt_variance_exact_order2(&x, r, 3).unwrap();
                let bound = variance_bound_tt(2, r, 3);
                assert!(exact <= bound + 1e-12, "r={r}: {exact} > {bound}");
            }
        }
    }

    #[test]
    fn min_k_bound_examples() {
        // N=1, R=1, m/delta = e: log term is 1, family term 3
        let p = BoundParams {
            modes: 1,
            rank: 1,
            k: 1,
            epsilon: 0.5,
            points: 1,
            delta: (-1.0f64).exp(),
            constant: 1.0,
        };
        let k = min_k_bound(&p, BoundFormat::Tt).unwrap();
        assert_eq!(k, (3.0f64 / 0.25).ceil() as u64);

        // CP/TT ratio at N=5, R=2 is 3^4 * 2 / 2^5 = 5.0625 before ceiling
        let p = BoundParams {
            modes: 5,
            rank: 2,
            k: 1,
            epsilon: 1.0,
            points: 1,
            delta: (-1.0f64).exp(),
            constant: 1.0,
        };
        let tt = min_k_bound(&p, BoundFormat::Tt).unwrap();
        let cp = min_k_bound(&p, BoundFormat::Cp).unwrap();
        assert_eq!(tt, 32);
        assert_eq!(cp, 162);
    }

    #[test]
    fn min_k_bound_monotonicity() {
        let base = BoundParams {
            modes: 3,
            rank: 2,
            k: 1,
            epsilon: 0.3,
            points: 50,
            delta: 0.01,
            constant: 1.0,
        };
        for fmt in [BoundFormat::Tt, BoundFormat::Cp] {
            let k0 = min_k_bound(&base, fmt).unwrap();
            // increasing R shrinks the bound
            let richer = BoundParams { rank: 8, ..base.clone() };
            assert!(min_k_bound(&richer, fmt).unwrap() <= k0);
            // shrinking delta grows the bound
            let stricter = BoundParams { delta: 0.0001, ..base.clone() };
            assert!(min_k_bound(&stricter, fmt).unwrap() >= k0);
            // more modes grow the bound (log(m/delta) > 1 here)
            let deeper = BoundParams { modes: 4, ..base.clone() };
            assert!(min_k_bound(&deeper, fmt).unwrap() >= k0);
        }
    }

    #[test]
    fn min_k_bound_rejects_bad_params() {
        let p = BoundParams {
            modes: 1,
            rank: 1,
            k: 1,
            epsilon: 0.0,
            points: 1,
            delta: 0.1,
            constant: 1.0,
        };
        assert!(min_k_bound(&p, BoundFormat::Tt).is_err());
    }

    #[test]
    fn isserlis_zero_matrix_gives_zero() {
        let b = Matrix::zeros(3, 3);
        let r = isserlis_check(1.0, &b, 10_000, Seed::new(70));
        assert_eq!(r.mean, 0.0);
        assert_eq!(isserlis_expected(1.0, &b), 0.0);
    }

    #[test]
    fn isserlis_identity_case() {
        // B = I_1, sigma = 1: E A^4 = 3
        let b = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let r = isserlis_check(1.0, &b, 40_000, Seed::new(71));
        assert!(close(isserlis_expected(1.0, &b), 3.0, 1e-12));
        assert!((r.mean - 3.0).abs() < 4.0 * r.mean_stderr, "mean {}", r.mean);
    }

    #[test]
    fn wishart_scalar_case() {
        // B = [1], n = 1: E A^4 = 3
        let b = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        assert!(close(wishart_expected(1.0, &b, 1), 3.0, 1e-12));
        let r = wishart_check(1.0, &b, 1, 40_000, Seed::new(72));
        assert!((r.mean - 3.0).abs() < 4.0 * r.mean_stderr, "mean {}", r.mean);
    }

    #[test]
    fn distortion_examples() {
        let shape = Shape::new(vec![2, 2]).unwrap();
        let x = DenseTensor::new(shape.clone(), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        // embedding with the same norm: zero distortion
        let e = Embedding::new(vec![1.0, 0.0]);
        assert_eq!(distortion(&e, (&x).into()).unwrap(), 0.0);
        let e = Embedding::new(vec![0.0, 0.0]);
        assert_eq!(distortion(&e, (&x).into()).unwrap(), 1.0);
        let zero = DenseTensor::zeros(shape);
        assert!(matches!(distortion(&e, (&zero).into()), Err(Error::ZeroNorm)));
    }

    #[test]
    fn moment_report_from_constant_values() {
        let r = MomentReport::from_values(&[2.0; 500]);
        assert_eq!(r.mean, 2.0);
        assert_eq!(r.variance, 0.0);
        assert_eq!(r.mean_stderr, 0.0);
        assert_eq!(r.variance_stderr, 0.0);
    }

    #[test]
    fn estimated_mean_is_isometric_for_small_grid() {
        let spec = InputSpec {
            shape: Shape::new(vec![3, 3, 3]).unwrap(),
            format: InputFormat::Tt,
            rank: 3,
            unit_norm: true,
        };
        let x = random_input(&spec, Seed::new(73)).unwrap();
        for (fam, name) in [(&TT_FAMILY as &dyn ProjectionFamily, "tt"), (&CP_FAMILY, "cp")] {
            let cfg = FamilyConfig::with_rank(2);
            let r =
                estimate_projection_moments(fam, &cfg, 10, x.as_ref(), 3000, Seed::new(74))
                    .unwrap();
            assert!(
                (r.mean - 1.0).abs() < 3.0 * r.mean_stderr,
                "{name}: mean {} +- {}",
                r.mean,
                r.mean_stderr
            );
        }
    }

    #[test]
    fn gaussian_variance_matches_chi_square() {
        // ‖f(x)‖^2 ~ chi^2_k / k for unit x: variance 2/k
        let shape = Shape::new(vec![16]).unwrap();
        let mut x = random_dense_tensor(&shape, Seed::new(75));
        let norm = x.frobenius_norm();
        x.scale(1.0 / norm);
        let k = 8;
        let cfg = FamilyConfig::default();
        let r = estimate_projection_moments(
            &GAUSSIAN_FAMILY,
            &cfg,
            k,
            (&x).into(),
            20_000,
            Seed::new(76),
        )
        .unwrap();
        let want = 2.0 / k as f64;
        assert!(
            (r.variance - want).abs() < 4.0 * r.variance_stderr,
            "variance {} +- {}, want {want}",
            r.variance,
            r.variance_stderr
        );
    }

    #[test]
    fn tail_check_at_zero_epsilon_is_one() {
        let spec = InputSpec {
            shape: Shape::new(vec![3, 3]).unwrap(),
            format: InputFormat::Tt,
            rank: 2,
            unit_norm: true,
        };
        let x = random_input(&spec, Seed::new(77)).unwrap();
        let cfg = FamilyConfig::with_rank(2);
        let p = tail_check(&TT_FAMILY, &cfg, 4, x.as_ref(), 0.0, 1000, Seed::new(78)).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn jackknife_tracks_known_variance_error() {
        // chi-square-like values: jackknife se should be within a factor of
        // the asymptotic se of the sample variance
        let mut rng = Seed::new(79).rng();
        let values: Vec<f64> =
            (0..10_000).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).collect();
        let se = jackknife_variance_stderr(&values, 100);
        // Var of chi^2_1 sample variance at n=1e4: sqrt((mu4 - sigma^4)/n), mu4 = 60, sigma^2 = 2
        let asym = ((60.0f64 - 4.0) / 10_000.0).sqrt();
        assert!(se > 0.3 * asym && se < 3.0 * asym, "se {se} vs {asym}");
    }
}
