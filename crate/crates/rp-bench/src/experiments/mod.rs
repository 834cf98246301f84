//! Experiment drivers. Each run_* function consumes a resolved config,
//! executes its study and writes one CSV in deterministic row order.
//!
//! Seed derivation is fixed so that results are reproducible and usefully
//! coupled: trial t draws its input from child(INPUT_SALT).child(t) and its
//! projection from child(PROJ_SALT).child(run index).child(t). The
//! projection stream does not depend on k, so sweeps over k share row
//! streams and larger embeddings extend smaller ones row by row.

pub mod distortion;
pub mod pairwise;
pub mod timing;
pub mod verify;

use crate::config::ExperimentConfig;
use anyhow::{bail, Result};
use tensor_rp::{
    family_by_name, FamilyConfig, InputSpec, ProjectionFamily, Seed, Tensor,
};

const INPUT_SALT: u64 = 1;
const PROJ_SALT: u64 = 2;
const POINTS_SALT: u64 = 3;

/// One projection configuration: a family plus a rank when it takes one.
pub struct FamilyRun {
    pub family: &'static dyn ProjectionFamily,
    pub rank: usize,
}

impl FamilyRun {
    pub fn name(&self) -> &'static str {
        self.family.name()
    }

    /// Rank for the CSV rank column; 0 for rank-free families.
    pub fn rank_label(&self) -> usize {
        if self.family.uses_rank() {
            self.rank
        } else {
            crate::records::NO_RANK
        }
    }

    pub fn family_config(&self, cfg: &ExperimentConfig) -> FamilyConfig {
        FamilyConfig {
            rank: self.rank,
            sparsity: cfg.sparsity,
            densify_cap: cfg.oracle_cap,
        }
    }
}

/// Expands the configured family list into per-rank runs, preserving the
/// order families were requested in.
pub fn family_runs(cfg: &ExperimentConfig) -> Result<Vec<FamilyRun>> {
    let mut runs = Vec::new();
    for name in &cfg.families {
        let family = match family_by_name(name) {
            Some(f) => f,
            None => bail!("unknown family '{name}'"),
        };
        if !family.uses_rank() {
            runs.push(FamilyRun { family, rank: 1 });
            continue;
        }
        let ranks = match name.as_str() {
            "tt" => &cfg.tt_ranks,
            "cp" => &cfg.cp_ranks,
            other => bail!("no rank list for family '{other}'"),
        };
        for &rank in ranks {
            runs.push(FamilyRun { family, rank });
        }
    }
    Ok(runs)
}

pub fn master_seed(cfg: &ExperimentConfig) -> Seed {
    Seed::new(cfg.seed)
}

pub fn input_seed(cfg: &ExperimentConfig, trial: usize) -> Seed {
    master_seed(cfg).child(INPUT_SALT).child(trial as u64)
}

pub fn proj_seed(cfg: &ExperimentConfig, run_index: usize, trial: usize) -> Seed {
    master_seed(cfg).child(PROJ_SALT).child(run_index as u64).child(trial as u64)
}

pub fn points_seed(cfg: &ExperimentConfig, index: usize) -> Seed {
    master_seed(cfg).child(POINTS_SALT).child(index as u64)
}

/// Input tensors shared by all configurations of a run: one per trial, or
/// a single one under --fixed-input.
pub fn trial_inputs(cfg: &ExperimentConfig) -> Result<Vec<Tensor>> {
    let spec = InputSpec {
        shape: cfg.shape(),
        format: cfg.input_format,
        rank: cfg.input_rank,
        unit_norm: true,
    };
    let count = if cfg.fixed_input { 1 } else { cfg.trials };
    (0..count)
        .map(|t| Ok(tensor_rp::random_input(&spec, input_seed(cfg, t))?))
        .collect()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Standard error of the mean; None below two samples.
pub fn stderr_of_mean(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
    Some((var / n as f64).sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}
