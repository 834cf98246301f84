//! Verification run: drives the statistical check suites end to end at
//! the configured sizes, prints one pass/fail line per check and writes
//! the observations to CSV. The process exit code reflects the overall
//! outcome.

use super::{family_runs, master_seed};
use crate::config::ExperimentConfig;
use crate::records::{write_records, ResultRecord, AGGREGATE_TRIAL, NO_RANK};
use anyhow::Result;
use std::time::Instant;
use tensor_rp::random::random_dense_tensor;
use tensor_rp::verify::{
    estimate_projection_moments, isserlis_check, isserlis_expected, tail_check,
    tt_variance_exact_order2, variance_bound_cp, variance_bound_tt, wishart_check,
    wishart_expected,
};
use tensor_rp::{random_input, FamilyConfig, InputSpec, Matrix, Seed, Shape};

/// Per-suite trial floors; the configured trial count is raised to these
/// so the tolerances below stay meaningful.
pub const MOMENT_TRIALS_MIN: usize = 1000;
pub const FOURTH_MOMENT_TRIALS_MIN: usize = 10_000;
pub const ORDER2_TRIALS_MIN: usize = 20_000;
pub const TAIL_TRIALS_MIN: usize = 1000;

const VERIFY_INPUT_SALT: u64 = 6;
const VERIFY_CHECK_SALT: u64 = 7;

struct CheckRow {
    family: String,
    rank: usize,
    k: usize,
    metric: String,
    value: f64,
}

struct CheckOutcome {
    name: String,
    passed: bool,
    detail: String,
    rows: Vec<CheckRow>,
}

fn check_seed(cfg: &ExperimentConfig, index: u64) -> Seed {
    master_seed(cfg).child(VERIFY_CHECK_SALT).child(index)
}

pub fn run_verify(cfg: &ExperimentConfig) -> Result<bool> {
    let t0 = Instant::now();
    let mut outcomes = Vec::new();

    let spec = InputSpec {
        shape: cfg.shape(),
        format: cfg.input_format,
        rank: cfg.input_rank,
        unit_norm: true,
    };
    let x = random_input(&spec, master_seed(cfg).child(VERIFY_INPUT_SALT))?;
    let k_mid = cfg.k_grid[cfg.k_grid.len() / 2];
    let moment_trials = cfg.trials.max(MOMENT_TRIALS_MIN);

    // Expected isometry and variance bound, per tensorized family.
    let tensorized: Vec<_> = family_runs(cfg)?
        .into_iter()
        .filter(|r| r.family.uses_rank())
        .collect();
    let mut seen = std::collections::HashSet::new();
    for (i, run) in tensorized.iter().enumerate() {
        if !seen.insert(run.name()) {
            continue; // first configured rank of each family
        }
        let fc = run.family_config(cfg);
        let report = estimate_projection_moments(
            run.family,
            &fc,
            k_mid,
            x.as_ref(),
            moment_trials,
            check_seed(cfg, 10 + i as u64),
        )?;
        let tol = 3.0 * report.mean_stderr;
        let passed = (report.mean - 1.0).abs() <= tol;
        outcomes.push(CheckOutcome {
            name: format!("isometry_{}", run.name()),
            passed,
            detail: format!(
                "mean {:.4} within {:.4} of 1 at {} trials",
                report.mean, tol, report.trials
            ),
            rows: vec![
                CheckRow {
                    family: run.name().into(),
                    rank: run.rank,
                    k: k_mid,
                    metric: "isometry_mean".into(),
                    value: report.mean,
                },
                CheckRow {
                    family: run.name().into(),
                    rank: run.rank,
                    k: k_mid,
                    metric: "isometry_tolerance".into(),
                    value: tol,
                },
            ],
        });

        let bound = match run.name() {
            "tt" => variance_bound_tt(cfg.n_modes, run.rank, k_mid),
            _ => variance_bound_cp(cfg.n_modes, run.rank, k_mid),
        };
        let limit = bound + 4.0 * report.variance_stderr;
        let passed = report.variance <= limit;
        outcomes.push(CheckOutcome {
            name: format!("variance_bound_{}", run.name()),
            passed,
            detail: format!("variance {:.4} <= {:.4}", report.variance, limit),
            rows: vec![
                CheckRow {
                    family: run.name().into(),
                    rank: run.rank,
                    k: k_mid,
                    metric: "variance".into(),
                    value: report.variance,
                },
                CheckRow {
                    family: run.name().into(),
                    rank: run.rank,
                    k: k_mid,
                    metric: "variance_limit".into(),
                    value: limit,
                },
            ],
        });
    }

    // Exact order-2 variance on a fixed 6x6 matrix.
    {
        let rank = cfg.tt_ranks.first().copied().unwrap_or(2);
        let k = cfg.k_grid[0];
        let shape = Shape::new(vec![6, 6])?;
        let m = random_dense_tensor(&shape, check_seed(cfg, 20));
        let exact = tt_variance_exact_order2(&m, rank, k)?;
        let fc = FamilyConfig::with_rank(rank);
        let report = estimate_projection_moments(
            &tensor_rp::TT_FAMILY,
            &fc,
            k,
            (&m).into(),
            cfg.trials.max(ORDER2_TRIALS_MIN),
            check_seed(cfg, 21),
        )?;
        let tol = 4.0 * report.variance_stderr;
        let passed = (report.variance - exact).abs() <= tol;
        outcomes.push(CheckOutcome {
            name: "order2_exact_variance".into(),
            passed,
            detail: format!("variance {:.4} vs exact {:.4} +- {:.4}", report.variance, exact, tol),
            rows: vec![
                CheckRow {
                    family: "tt".into(),
                    rank,
                    k,
                    metric: "order2_variance".into(),
                    value: report.variance,
                },
                CheckRow {
                    family: "tt".into(),
                    rank,
                    k,
                    metric: "order2_exact".into(),
                    value: exact,
                },
                CheckRow {
                    family: "tt".into(),
                    rank,
                    k,
                    metric: "order2_tolerance".into(),
                    value: tol,
                },
            ],
        });
    }

    // Fourth-moment identities for Gaussian matrices.
    let fourth_trials = cfg.trials.max(FOURTH_MOMENT_TRIALS_MIN);
    {
        let b = matrix_from_seed(4, 4, check_seed(cfg, 30));
        let expected = isserlis_expected(1.0, &b);
        let report = isserlis_check(1.0, &b, fourth_trials, check_seed(cfg, 31));
        let tol = 4.0 * report.mean_stderr;
        let passed = (report.mean - expected).abs() <= tol;
        outcomes.push(CheckOutcome {
            name: "gaussian_fourth_moment".into(),
            passed,
            detail: format!("mean {:.3} vs {:.3} +- {:.3}", report.mean, expected, tol),
            rows: vec![
                CheckRow {
                    family: "-".into(),
                    rank: NO_RANK,
                    k: 0,
                    metric: "isserlis_mean".into(),
                    value: report.mean,
                },
                CheckRow {
                    family: "-".into(),
                    rank: NO_RANK,
                    k: 0,
                    metric: "isserlis_expected".into(),
                    value: expected,
                },
            ],
        });
    }
    {
        let b = matrix_from_seed(3, 4, check_seed(cfg, 40));
        let n = 3;
        let expected = wishart_expected(1.0, &b, n);
        let report = wishart_check(1.0, &b, n, fourth_trials, check_seed(cfg, 41));
        let tol = 4.0 * report.mean_stderr;
        let passed = (report.mean - expected).abs() <= tol;
        outcomes.push(CheckOutcome {
            name: "matrix_fourth_moment".into(),
            passed,
            detail: format!("mean {:.3} vs {:.3} +- {:.3}", report.mean, expected, tol),
            rows: vec![
                CheckRow {
                    family: "-".into(),
                    rank: NO_RANK,
                    k: 0,
                    metric: "wishart_mean".into(),
                    value: report.mean,
                },
                CheckRow {
                    family: "-".into(),
                    rank: NO_RANK,
                    k: 0,
                    metric: "wishart_expected".into(),
                    value: expected,
                },
            ],
        });
    }

    // Tail decay: exceedance at the largest k must not exceed the smallest.
    {
        let rank = cfg.tt_ranks.first().copied().unwrap_or(2);
        let fc = FamilyConfig::with_rank(rank);
        let eps = 0.5;
        let trials = cfg.trials.max(TAIL_TRIALS_MIN);
        let k_lo = cfg.k_grid[0];
        let k_hi = *cfg.k_grid.last().expect("nonempty grid");
        let seed = check_seed(cfg, 50);
        let p_lo = tail_check(&tensor_rp::TT_FAMILY, &fc, k_lo, x.as_ref(), eps, trials, seed)?;
        let p_hi = tail_check(&tensor_rp::TT_FAMILY, &fc, k_hi, x.as_ref(), eps, trials, seed)?;
        let se = ((p_lo * (1.0 - p_lo) + p_hi * (1.0 - p_hi)) / trials as f64).sqrt();
        let passed = p_hi <= p_lo + 3.0 * se;
        outcomes.push(CheckOutcome {
            name: "tail_decay".into(),
            passed,
            detail: format!("P(dist >= {eps}) {p_hi:.3} at k={k_hi} vs {p_lo:.3} at k={k_lo}"),
            rows: vec![
                CheckRow {
                    family: "tt".into(),
                    rank,
                    k: k_lo,
                    metric: "tail_exceedance".into(),
                    value: p_lo,
                },
                CheckRow {
                    family: "tt".into(),
                    rank,
                    k: k_hi,
                    metric: "tail_exceedance".into(),
                    value: p_hi,
                },
            ],
        });
    }

    // Report and serialize.
    let threads = rayon::current_num_threads();
    let regime = cfg.regime_label();
    let experiment = cfg.experiment.name();
    let wall = t0.elapsed().as_secs_f64();
    let mut records = Vec::new();
    let mut all_passed = true;
    for outcome in &outcomes {
        all_passed &= outcome.passed;
        println!(
            "[{}] {}: {}",
            if outcome.passed { "pass" } else { "FAIL" },
            outcome.name,
            outcome.detail
        );
        for row in &outcome.rows {
            records.push(ResultRecord::new(
                experiment,
                &regime,
                &row.family,
                row.rank,
                row.k,
                AGGREGATE_TRIAL,
                cfg.seed,
                &row.metric,
                row.value,
                wall,
                threads,
            ));
        }
        let head = &outcome.rows[0];
        records.push(ResultRecord::new(
            experiment,
            &regime,
            &head.family,
            head.rank,
            head.k,
            AGGREGATE_TRIAL,
            cfg.seed,
            &format!("{}_pass", outcome.name),
            if outcome.passed { 1.0 } else { 0.0 },
            wall,
            threads,
        ));
    }
    write_records(&cfg.out, &records)?;
    println!(
        "{}: {} of {} checks passed",
        if all_passed { "ok" } else { "FAILED" },
        outcomes.iter().filter(|o| o.passed).count(),
        outcomes.len()
    );
    Ok(all_passed)
}

/// Standard normal matrix drawn from a derived stream.
fn matrix_from_seed(rows: usize, cols: usize, seed: Seed) -> Matrix {
    let shape = Shape::new(vec![rows, cols]).expect("static shape");
    let t = random_dense_tensor(&shape, seed);
    // dense layout is first-index-fastest, i.e. column-major for a matrix
    Matrix::from_fn(rows, cols, |i, j| t.values()[i + rows * j])
}
