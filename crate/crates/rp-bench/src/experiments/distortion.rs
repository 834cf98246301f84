//! Distortion study: per (family, rank, k), projects fresh unit-norm
//! low-rank inputs and records |‖f(x)‖^2 - 1| per trial plus mean rows.

use super::{family_runs, mean, proj_seed, stderr_of_mean, trial_inputs};
use crate::config::ExperimentConfig;
use crate::records::{write_records, ResultRecord, AGGREGATE_TRIAL};
use anyhow::{Context, Result};
use rayon::prelude::*;
use std::time::Instant;
use tensor_rp::verify::distortion;

pub fn run_distortion(cfg: &ExperimentConfig) -> Result<()> {
    let runs = family_runs(cfg)?;
    let inputs = trial_inputs(cfg)?;
    let shape = cfg.shape();
    let threads = rayon::current_num_threads();
    let regime = cfg.regime_label();
    let experiment = cfg.experiment.name();
    let mut records = Vec::new();

    for (ci, run) in runs.iter().enumerate() {
        let fc = run.family_config(cfg);
        for &k in &cfg.k_grid {
            let t0 = Instant::now();
            let per_trial: Vec<(f64, f64)> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| -> Result<(f64, f64)> {
                    let start = Instant::now();
                    let x = inputs[t % inputs.len()].as_ref();
                    let p = run
                        .family
                        .sample(&shape, &fc, k, proj_seed(cfg, ci, t))
                        .with_context(|| format!("sampling {} k={k}", run.name()))?;
                    let e = p.project(x)?;
                    let d = distortion(&e, x)?;
                    Ok((d, start.elapsed().as_secs_f64()))
                })
                .collect::<Result<_>>()?;
            let values: Vec<f64> = per_trial.iter().map(|&(d, _)| d).collect();
            for (t, &(d, secs)) in per_trial.iter().enumerate() {
                records.push(ResultRecord::new(
                    experiment,
                    &regime,
                    run.name(),
                    run.rank_label(),
                    k,
                    t as i64,
                    cfg.seed,
                    "distortion",
                    d,
                    secs,
                    threads,
                ));
            }
            let block = t0.elapsed().as_secs_f64();
            records.push(ResultRecord::new(
                experiment,
                &regime,
                run.name(),
                run.rank_label(),
                k,
                AGGREGATE_TRIAL,
                cfg.seed,
                "distortion_mean",
                mean(&values),
                block,
                threads,
            ));
            if let Some(se) = stderr_of_mean(&values) {
                records.push(ResultRecord::new(
                    experiment,
                    &regime,
                    run.name(),
                    run.rank_label(),
                    k,
                    AGGREGATE_TRIAL,
                    cfg.seed,
                    "distortion_stderr",
                    se,
                    block,
                    threads,
                ));
            }
        }
    }
    write_records(&cfg.out, &records)
}
