use clap::Parser;
use rp_bench::config::{CliArgs, Experiment, ExperimentConfig};
use rp_bench::experiments;

/// Exit codes: 0 success, 1 configuration or runtime error, 2 verification
/// failure.
fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let args = match CliArgs::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match ExperimentConfig::from_cli(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e:#}");
            return 1;
        }
    };
    let outcome = match cfg.experiment {
        Experiment::Distortion => experiments::distortion::run_distortion(&cfg).map(|()| true),
        Experiment::Timing => experiments::timing::run_timing(&cfg).map(|()| true),
        Experiment::Pairwise => experiments::pairwise::run_pairwise(&cfg).map(|()| true),
        Experiment::Verify => experiments::verify::run_verify(&cfg),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
