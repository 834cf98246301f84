//! Timing study: median project() wall time per (family, rank, input
//! format, k). Sampling is excluded from the timed region; densification
//! of low-rank inputs by the dense baselines is not, since that cost is
//! what the comparison is about. Runs single-threaded for comparability.

use super::{family_runs, master_seed, median};
use crate::config::ExperimentConfig;
use crate::records::{write_records, ResultRecord, AGGREGATE_TRIAL};
use anyhow::Result;
use std::time::Instant;
use tensor_rp::{random_input, InputFormat, InputSpec};

pub const WARMUPS: usize = 3;
pub const REPEATS: usize = 20;

const TIMING_INPUT_SALT: u64 = 4;
const TIMING_PROJ_SALT: u64 = 5;

pub fn run_timing(cfg: &ExperimentConfig) -> Result<()> {
    let runs = family_runs(cfg)?;
    let shape = cfg.shape();
    let regime = cfg.regime_label();
    let experiment = cfg.experiment.name();
    let mut records = Vec::new();

    for (fi, fmt) in [InputFormat::Tt, InputFormat::Cp].into_iter().enumerate() {
        let spec = InputSpec {
            shape: shape.clone(),
            format: fmt,
            rank: cfg.input_rank,
            unit_norm: true,
        };
        let input = random_input(
            &spec,
            master_seed(cfg).child(TIMING_INPUT_SALT).child(fi as u64),
        )?;
        let metric = format!("time_median_s_{}_input", fmt.name());
        let repeats_metric = format!("time_repeats_{}_input", fmt.name());
        for (ci, run) in runs.iter().enumerate() {
            let fc = run.family_config(cfg);
            for &k in &cfg.k_grid {
                let block = Instant::now();
                let seed =
                    master_seed(cfg).child(TIMING_PROJ_SALT).child(ci as u64).child(fi as u64);
                let p = run.family.sample(&shape, &fc, k, seed)?;
                for _ in 0..WARMUPS {
                    p.project(input.as_ref())?;
                }
                let mut times = Vec::with_capacity(REPEATS);
                for _ in 0..REPEATS {
                    let t0 = Instant::now();
                    let e = p.project(input.as_ref())?;
                    times.push(t0.elapsed().as_secs_f64());
                    std::hint::black_box(e.norm_sq());
                }
                let wall = block.elapsed().as_secs_f64();
                records.push(ResultRecord::new(
                    experiment,
                    &regime,
                    run.name(),
                    run.rank_label(),
                    k,
                    AGGREGATE_TRIAL,
                    cfg.seed,
                    &metric,
                    median(&times),
                    wall,
                    1,
                ));
                records.push(ResultRecord::new(
                    experiment,
                    &regime,
                    run.name(),
                    run.rank_label(),
                    k,
                    AGGREGATE_TRIAL,
                    cfg.seed,
                    &repeats_metric,
                    REPEATS as f64,
                    wall,
                    1,
                ));
            }
        }
    }
    write_records(&cfg.out, &records)
}
