//! Pairwise-distance study: how well each family preserves the distance
//! geometry of a 50-point set (CIFAR-10 images, or synthetic unit tensors
//! of the same shape when no dataset is given).

use super::{family_runs, mean, points_seed, proj_seed, stderr_of_mean};
use crate::cifar;
use crate::config::ExperimentConfig;
use crate::records::{write_records, ResultRecord, AGGREGATE_TRIAL};
use anyhow::{bail, Result};
use rayon::prelude::*;
use std::time::Instant;
use tensor_rp::projection::Embedding;
use tensor_rp::random::random_dense_tensor;
use tensor_rp::DenseTensor;

/// Distance-ratio summary of one embedded point set: statistics of
/// ‖f(x_i) - f(x_j)‖ / ‖x_i - x_j‖ over ordered pairs i != j.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseStats {
    pub n_points: usize,
    pub mean_ratio: f64,
    pub std_ratio: f64,
}

/// Euclidean distance between two same-shape dense tensors.
fn input_distance(a: &DenseTensor, b: &DenseTensor) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Ratio statistics for embedded points against precomputed input
/// distances. Pairs at zero input distance carry no distortion
/// information and are skipped; a set with no informative pair is
/// rejected.
pub fn pairwise_stats(embeddings: &[Embedding], input_dist: &PairDistances) -> Result<PairwiseStats> {
    let n = embeddings.len();
    if n < 2 {
        bail!("pairwise statistics need at least 2 points, got {n}");
    }
    if n != input_dist.n {
        bail!("embedding count {} does not match distance table for {}", n, input_dist.n);
    }
    let mut ratios = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = input_dist.get(i, j);
            if d == 0.0 {
                continue;
            }
            ratios.push(embeddings[i].distance(&embeddings[j])? / d);
        }
    }
    if ratios.is_empty() {
        bail!("all point pairs coincide; distance ratios are undefined");
    }
    let m = mean(&ratios);
    let var = ratios.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / ratios.len() as f64;
    Ok(PairwiseStats { n_points: n, mean_ratio: m, std_ratio: var.max(0.0).sqrt() })
}

/// Symmetric table of input distances.
pub struct PairDistances {
    n: usize,
    d: Vec<f64>,
}

impl PairDistances {
    pub fn new(points: &[DenseTensor]) -> Self {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let dist = input_distance(&points[i], &points[j]);
                d[i * n + j] = dist;
                d[j * n + i] = dist;
            }
        }
        PairDistances { n, d }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

fn synthetic_points(cfg: &ExperimentConfig, count: usize) -> Result<Vec<DenseTensor>> {
    let shape = cifar::image_shape();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut t = random_dense_tensor(&shape, points_seed(cfg, i));
        let norm = t.frobenius_norm();
        if norm == 0.0 {
            bail!("synthetic point {i} degenerated to zero");
        }
        t.scale(1.0 / norm);
        out.push(t);
    }
    Ok(out)
}

pub fn run_pairwise(cfg: &ExperimentConfig) -> Result<()> {
    let points = match &cfg.dataset {
        Some(path) => cifar::load_cifar10(path)?,
        None => synthetic_points(cfg, cifar::POINTS)?,
    };
    let distances = PairDistances::new(&points);
    let shape = cifar::image_shape();
    let runs = family_runs(cfg)?;
    let threads = rayon::current_num_threads();
    let regime = cfg.regime_label();
    let experiment = cfg.experiment.name();
    let mut records = Vec::new();

    for (ci, run) in runs.iter().enumerate() {
        let fc = run.family_config(cfg);
        for &k in &cfg.k_grid {
            let block = Instant::now();
            let per_trial: Vec<(PairwiseStats, f64)> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| -> Result<(PairwiseStats, f64)> {
                    let start = Instant::now();
                    let p = run.family.sample(&shape, &fc, k, proj_seed(cfg, ci, t))?;
                    let embeddings: Vec<Embedding> = points
                        .iter()
                        .map(|x| Ok(p.project(x.into())?))
                        .collect::<Result<_>>()?;
                    let stats = pairwise_stats(&embeddings, &distances)?;
                    Ok((stats, start.elapsed().as_secs_f64()))
                })
                .collect::<Result<_>>()?;
            for (t, (stats, secs)) in per_trial.iter().enumerate() {
                for (metric, value) in [
                    ("pairwise_ratio_mean", stats.mean_ratio),
                    ("pairwise_ratio_std", stats.std_ratio),
                ] {
                    records.push(ResultRecord::new(
                        experiment,
                        &regime,
                        run.name(),
                        run.rank_label(),
                        k,
                        t as i64,
                        cfg.seed,
                        metric,
                        value,
                        *secs,
                        threads,
                    ));
                }
            }
            let wall = block.elapsed().as_secs_f64();
            let means: Vec<f64> = per_trial.iter().map(|(s, _)| s.mean_ratio).collect();
            let stds: Vec<f64> = per_trial.iter().map(|(s, _)| s.std_ratio).collect();
            let mut aggregates =
                vec![("pairwise_ratio_mean", mean(&means)), ("pairwise_ratio_std", mean(&stds))];
            if let Some(se) = stderr_of_mean(&means) {
                aggregates.push(("pairwise_ratio_mean_stderr", se));
            }
            for (metric, value) in aggregates {
                records.push(ResultRecord::new(
                    experiment,
                    &regime,
                    run.name(),
                    run.rank_label(),
                    k,
                    AGGREGATE_TRIAL,
                    cfg.seed,
                    metric,
                    value,
                    wall,
                    threads,
                ));
            }
        }
    }
    write_records(&cfg.out, &records)
}
