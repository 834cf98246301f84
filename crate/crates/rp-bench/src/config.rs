//! Experiment configuration: a flat key=value config file, command-line
//! overrides, and regime presets. CLI flags win over file keys, file keys
//! win over preset defaults.

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use tensor_rp::tensor::DEFAULT_ORACLE_CAP;
use tensor_rp::{family_by_name, family_names, InputFormat, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Distortion,
    Timing,
    Pairwise,
    Verify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Distortion => "distortion",
            Experiment::Timing => "timing",
            Experiment::Pairwise => "pairwise",
            Experiment::Verify => "verify",
        }
    }
}

impl FromStr for Experiment {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distortion" => Ok(Experiment::Distortion),
            "timing" => Ok(Experiment::Timing),
            "pairwise" => Ok(Experiment::Pairwise),
            "verify" => Ok(Experiment::Verify),
            other => bail!("unknown experiment '{other}' (distortion, timing, pairwise, verify)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Small,
    Medium,
    High,
    Custom,
}

impl Regime {
    /// Preset (d, N) for the named regimes.
    pub fn preset(self) -> Option<(usize, usize)> {
        match self {
            Regime::Small => Some((15, 3)),
            Regime::Medium => Some((3, 12)),
            Regime::High => Some((3, 25)),
            Regime::Custom => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Small => "small",
            Regime::Medium => "medium",
            Regime::High => "high",
            Regime::Custom => "custom",
        }
    }
}

impl FromStr for Regime {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Regime::Small),
            "medium" => Ok(Regime::Medium),
            "high" => Ok(Regime::High),
            "custom" => Ok(Regime::Custom),
            other => bail!("unknown regime '{other}' (small, medium, high, custom)"),
        }
    }
}

fn parse_input_format(s: &str) -> Result<InputFormat> {
    match s {
        "tt" => Ok(InputFormat::Tt),
        "cp" => Ok(InputFormat::Cp),
        other => bail!("unknown input format '{other}' (tt, cp)"),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rp-bench",
    about = "Distortion, timing and distance-preservation experiments for tensorized random projections"
)]
pub struct CliArgs {
    /// Flat key=value config file; flags below override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// distortion | timing | pairwise | verify
    #[arg(long)]
    pub experiment: Option<String>,
    /// small | medium | high | custom
    #[arg(long)]
    pub regime: Option<String>,
    /// Mode size override (required for the custom regime).
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of modes override (required for the custom regime).
    #[arg(long = "N")]
    pub n_modes: Option<usize>,
    /// Input tensor format: tt | cp
    #[arg(long = "input-format")]
    pub input_format: Option<String>,
    /// Rank of the random input tensors.
    #[arg(long = "input-rank")]
    pub input_rank: Option<usize>,
    /// Comma-separated projection families (tt, cp, gaussian, very-sparse).
    #[arg(long, value_delimiter = ',')]
    pub families: Option<Vec<String>>,
    /// Ranks for the tt family.
    #[arg(long = "tt-ranks", value_delimiter = ',')]
    pub tt_ranks: Option<Vec<usize>>,
    /// Ranks for the cp family.
    #[arg(long = "cp-ranks", value_delimiter = ',')]
    pub cp_ranks: Option<Vec<usize>>,
    /// Embedding dimensions to sweep.
    #[arg(long = "k-grid", value_delimiter = ',')]
    pub k_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Nonzero-entry spacing s of the very sparse family (default sqrt(D)).
    #[arg(long)]
    pub sparsity: Option<f64>,
    /// CIFAR-10 binary batch file for the pairwise experiment.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Reuse one input tensor across trials instead of resampling.
    #[arg(long = "fixed-input")]
    pub fixed_input: bool,
    /// Densification cap gating the dense baselines.
    #[arg(long = "oracle-cap")]
    pub oracle_cap: Option<usize>,
}

/// Option bag shared by the config file and the CLI before defaulting.
#[derive(Debug, Default, Clone)]
struct RawConfig {
    experiment: Option<String>,
    regime: Option<String>,
    d: Option<usize>,
    n_modes: Option<usize>,
    input_format: Option<String>,
    input_rank: Option<usize>,
    families: Option<Vec<String>>,
    tt_ranks: Option<Vec<usize>>,
    cp_ranks: Option<Vec<usize>>,
    k_grid: Option<Vec<usize>>,
    trials: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    sparsity: Option<f64>,
    dataset: Option<PathBuf>,
    fixed_input: Option<bool>,
    oracle_cap: Option<usize>,
}

fn parse_list<T: FromStr>(value: &str, key: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(|p| p.trim())
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|e| anyhow!("bad {key} entry '{p}': {e}")))
        .collect()
}

impl RawConfig {
    fn from_file(path: &Path) -> Result<RawConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let parse_err = |e: anyhow::Error| anyhow!("{}:{}: {e}", path.display(), lineno + 1);
            match key {
                "experiment" => raw.experiment = Some(value.to_string()),
                "regime" => raw.regime = Some(value.to_string()),
                "d" => raw.d = Some(value.parse().map_err(|e| parse_err(anyhow!("bad d: {e}")))?),
                "N" => {
                    raw.n_modes =
                        Some(value.parse().map_err(|e| parse_err(anyhow!("bad N: {e}")))?)
                }
                "input-format" => raw.input_format = Some(value.to_string()),
                "input-rank" => {
                    raw.input_rank = Some(
                        value.parse().map_err(|e| parse_err(anyhow!("bad input-rank: {e}")))?,
                    )
                }
                "families" => {
                    raw.families = Some(parse_list(value, "families").map_err(parse_err)?)
                }
                "tt-ranks" => {
                    raw.tt_ranks = Some(parse_list(value, "tt-ranks").map_err(parse_err)?)
                }
                "cp-ranks" => {
                    raw.cp_ranks = Some(parse_list(value, "cp-ranks").map_err(parse_err)?)
                }
                "k-grid" => raw.k_grid = Some(parse_list(value, "k-grid").map_err(parse_err)?),
                "trials" => {
                    raw.trials =
                        Some(value.parse().map_err(|e| parse_err(anyhow!("bad trials: {e}")))?)
                }
                "seed" => {
                    raw.seed =
                        Some(value.parse().map_err(|e| parse_err(anyhow!("bad seed: {e}")))?)
                }
                "out" => raw.out = Some(PathBuf::from(value)),
                "sparsity" => {
                    raw.sparsity =
                        Some(value.parse().map_err(|e| parse_err(anyhow!("bad sparsity: {e}")))?)
                }
                "dataset" => raw.dataset = Some(PathBuf::from(value)),
                "fixed-input" => {
                    raw.fixed_input = Some(
                        value
                            .parse()
                            .map_err(|e| parse_err(anyhow!("bad fixed-input: {e}")))?,
                    )
                }
                "oracle-cap" => {
                    raw.oracle_cap = Some(
                        value.parse().map_err(|e| parse_err(anyhow!("bad oracle-cap: {e}")))?,
                    )
                }
                other => bail!("{}:{}: unknown key '{other}'", path.display(), lineno + 1),
            }
        }
        Ok(raw)
    }

    fn overlay_cli(mut self, args: &CliArgs) -> RawConfig {
        macro_rules! take {
            ($field:ident) => {
                if args.$field.is_some() {
                    self.$field = args.$field.clone();
                }
            };
        }
        take!(experiment);
        take!(regime);
        take!(d);
        take!(n_modes);
        take!(input_format);
        take!(input_rank);
        take!(families);
        take!(tt_ranks);
        take!(cp_ranks);
        take!(k_grid);
        take!(trials);
        take!(seed);
        take!(out);
        take!(sparsity);
        take!(dataset);
        take!(oracle_cap);
        if args.fixed_input {
            self.fixed_input = Some(true);
        }
        self
    }
}

/// Fully resolved, validated experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub regime: Regime,
    pub d: usize,
    pub n_modes: usize,
    pub input_format: InputFormat,
    pub input_rank: usize,
    pub families: Vec<String>,
    pub tt_ranks: Vec<usize>,
    pub cp_ranks: Vec<usize>,
    pub k_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub sparsity: Option<f64>,
    pub dataset: Option<PathBuf>,
    pub fixed_input: bool,
    pub oracle_cap: usize,
}

pub const DEFAULT_TT_RANKS: [usize; 3] = [2, 5, 10];
pub const DEFAULT_CP_RANKS: [usize; 3] = [4, 25, 100];
pub const DEFAULT_K_GRID: [usize; 6] = [5, 10, 25, 50, 100, 200];
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_INPUT_RANK: usize = 10;
pub const DEFAULT_SEED: u64 = 42;

fn default_families(regime: Regime) -> Vec<String> {
    let names: &[&str] = match regime {
        Regime::Small => &["tt", "cp", "gaussian", "very-sparse"],
        Regime::Medium => &["tt", "cp", "very-sparse"],
        Regime::High | Regime::Custom => &["tt", "cp"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

impl ExperimentConfig {
    pub fn from_cli(args: &CliArgs) -> Result<ExperimentConfig> {
        let raw = match &args.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        ExperimentConfig::resolve(raw.overlay_cli(args))
    }

    fn resolve(raw: RawConfig) -> Result<ExperimentConfig> {
        let experiment = raw
            .experiment
            .as_deref()
            .ok_or_else(|| anyhow!("--experiment is required"))?
            .parse::<Experiment>()?;
        let regime = match raw.regime.as_deref() {
            Some(s) => s.parse::<Regime>()?,
            None => Regime::Medium,
        };
        let (d, n_modes) = match (regime.preset(), raw.d, raw.n_modes) {
            (Some((pd, pn)), d, n) => (d.unwrap_or(pd), n.unwrap_or(pn)),
            (None, Some(d), Some(n)) => (d, n),
            (None, _, _) => bail!("custom regime requires both --d and --N"),
        };
        let families = raw.families.unwrap_or_else(|| default_families(regime));
        let cfg = ExperimentConfig {
            experiment,
            regime,
            d,
            n_modes,
            input_format: parse_input_format(raw.input_format.as_deref().unwrap_or("tt"))?,
            input_rank: raw.input_rank.unwrap_or(DEFAULT_INPUT_RANK),
            families,
            tt_ranks: raw.tt_ranks.unwrap_or_else(|| DEFAULT_TT_RANKS.to_vec()),
            cp_ranks: raw.cp_ranks.unwrap_or_else(|| DEFAULT_CP_RANKS.to_vec()),
            k_grid: raw.k_grid.unwrap_or_else(|| DEFAULT_K_GRID.to_vec()),
            trials: raw.trials.unwrap_or(DEFAULT_TRIALS),
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            out: raw
                .out
                .unwrap_or_else(|| PathBuf::from(format!("{}.csv", experiment.name()))),
            sparsity: raw.sparsity,
            dataset: raw.dataset,
            fixed_input: raw.fixed_input.unwrap_or(false),
            oracle_cap: raw.oracle_cap.unwrap_or(DEFAULT_ORACLE_CAP),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n_modes == 0 {
            bail!("d and N must be positive");
        }
        if self.trials == 0 {
            bail!("trials must be positive");
        }
        if self.input_rank == 0 {
            bail!("input-rank must be positive");
        }
        if self.k_grid.is_empty() {
            bail!("k-grid must be nonempty");
        }
        if self.k_grid.iter().any(|&k| k == 0) {
            bail!("k values must be positive");
        }
        if self.k_grid.windows(2).any(|w| w[0] >= w[1]) {
            bail!("k-grid must be strictly increasing");
        }
        if self.families.is_empty() {
            bail!("families must be nonempty");
        }
        for name in &self.families {
            if family_by_name(name).is_none() {
                bail!("unknown family '{}' (known: {})", name, family_names().join(", "));
            }
        }
        if self.families.iter().any(|f| f == "tt") && self.tt_ranks.is_empty() {
            bail!("tt family requested with empty tt-ranks");
        }
        if self.families.iter().any(|f| f == "cp") && self.cp_ranks.is_empty() {
            bail!("cp family requested with empty cp-ranks");
        }
        if self.tt_ranks.iter().chain(&self.cp_ranks).any(|&r| r == 0) {
            bail!("ranks must be positive");
        }
        if let Some(s) = self.sparsity {
            if !(s >= 1.0) {
                bail!("sparsity must be at least 1");
            }
        }
        if self.input_format == InputFormat::Tt && self.n_modes == 1 && self.input_rank != 1 {
            bail!("order-1 tt inputs require input-rank 1");
        }
        // Dense baselines densify the input; refuse them when the full
        // array would not fit under the cap.
        let needs_dense = self.families.iter().any(|f| f == "gaussian" || f == "very-sparse");
        if needs_dense && self.experiment != Experiment::Pairwise {
            match self.full_dim() {
                Some(dim) if dim <= self.oracle_cap => {}
                _ => bail!(
                    "gaussian/very-sparse baselines need the dense array; d^N = {}^{} exceeds the densification cap {} (raise --oracle-cap or drop the baseline)",
                    self.d,
                    self.n_modes,
                    self.oracle_cap
                ),
            }
        }
        Ok(())
    }

    /// d^N if it fits in usize.
    pub fn full_dim(&self) -> Option<usize> {
        let mut acc: usize = 1;
        for _ in 0..self.n_modes {
            acc = acc.checked_mul(self.d)?;
        }
        Some(acc)
    }

    /// Shape of the synthetic input tensors (cubic d^N).
    pub fn shape(&self) -> Shape {
        Shape::cube(self.d, self.n_modes).expect("validated shape")
    }

    /// Regime label for CSV rows; custom regimes embed (d, N).
    pub fn regime_label(&self) -> String {
        match self.regime {
            Regime::Custom => format!("custom-d{}-n{}", self.d, self.n_modes),
            r => r.name().to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn args(argv: &[&str]) -> CliArgs {
        CliArgs::try_parse_from(std::iter::once("rp-bench").chain(argv.iter().copied())).unwrap()
    }

    #[test]
    fn regime_presets_and_defaults() {
        let cfg = ExperimentConfig::from_cli(&args(&["--experiment", "distortion"])).unwrap();
        assert_eq!(cfg.regime, Regime::Medium);
        assert_eq!((cfg.d, cfg.n_modes), (3, 12));
        assert_eq!(cfg.tt_ranks, vec![2, 5, 10]);
        assert_eq!(cfg.cp_ranks, vec![4, 25, 100]);
        assert_eq!(cfg.k_grid, vec![5, 10, 25, 50, 100, 200]);
        assert_eq!(cfg.trials, 100);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.input_rank, 10);
        assert_eq!(cfg.families, vec!["tt", "cp", "very-sparse"]);
        assert_eq!(cfg.out, PathBuf::from("distortion.csv"));

        let cfg =
            ExperimentConfig::from_cli(&args(&["--experiment", "timing", "--regime", "small"]))
                .unwrap();
        assert_eq!((cfg.d, cfg.n_modes), (15, 3));
        assert_eq!(cfg.families, vec!["tt", "cp", "gaussian", "very-sparse"]);

        let cfg =
            ExperimentConfig::from_cli(&args(&["--experiment", "timing", "--regime", "high"]))
                .unwrap();
        assert_eq!((cfg.d, cfg.n_modes), (3, 25));
        assert_eq!(cfg.families, vec!["tt", "cp"]);
    }

    #[test]
    fn custom_regime_requires_shape() {
        let a = args(&["--experiment", "distortion", "--regime", "custom"]);
        assert!(ExperimentConfig::from_cli(&a).is_err());
        let a = args(&["--experiment", "distortion", "--regime", "custom", "--d", "4", "--N", "3"]);
        let cfg = ExperimentConfig::from_cli(&a).unwrap();
        assert_eq!((cfg.d, cfg.n_modes), (4, 3));
        assert_eq!(cfg.regime_label(), "custom-d4-n3");
    }

    #[test]
    fn presets_accept_overrides() {
        let a = args(&["--experiment", "timing", "--regime", "medium", "--N", "8"]);
        let cfg = ExperimentConfig::from_cli(&a).unwrap();
        assert_eq!((cfg.d, cfg.n_modes), (3, 8));
        assert_eq!(cfg.regime_label(), "medium");
    }

    #[test]
    fn zero_trials_rejected() {
        let a = args(&["--experiment", "verify", "--trials", "0"]);
        let err = ExperimentConfig::from_cli(&a).unwrap_err().to_string();
        assert!(err.contains("trials"), "{err}");
    }

    #[test]
    fn dense_baseline_gated_by_cap() {
        let a = args(&["--experiment", "distortion", "--regime", "high", "--families", "tt,gaussian"]);
        let err = ExperimentConfig::from_cli(&a).unwrap_err().to_string();
        assert!(err.contains("cap"), "{err}");
        // raising the cap is not enough for 3^25, which overflows any
        // realistic cap, but medium fits under the default
        let a = args(&["--experiment", "distortion", "--regime", "medium", "--families", "tt,very-sparse"]);
        assert!(ExperimentConfig::from_cli(&a).is_ok());
    }

    #[test]
    fn unknown_family_rejected() {
        let a = args(&["--experiment", "distortion", "--families", "tt,fft"]);
        let err = ExperimentConfig::from_cli(&a).unwrap_err().to_string();
        assert!(err.contains("fft"), "{err}");
    }

    #[test]
    fn k_grid_must_increase() {
        let a = args(&["--experiment", "distortion", "--k-grid", "5,5,10"]);
        assert!(ExperimentConfig::from_cli(&a).is_err());
    }

    #[test]
    fn config_file_and_cli_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# medium distortion run\nexperiment = distortion\ntrials = 7\nseed = 9\nk-grid = 5, 10\nfixed-input = true\n",
        )
        .unwrap();
        let a = args(&["--config", path.to_str().unwrap(), "--seed", "11"]);
        let cfg = ExperimentConfig::from_cli(&a).unwrap();
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.seed, 11, "cli overrides file");
        assert_eq!(cfg.k_grid, vec![5, 10]);
        assert!(cfg.fixed_input);
    }

    #[test]
    fn config_file_rejects_unknown_key() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "experiment = verify\nrepeat = 3\n").unwrap();
        let a = args(&["--config", path.to_str().unwrap()]);
        let err = ExperimentConfig::from_cli(&a).unwrap_err().to_string();
        assert!(err.contains("repeat"), "{err}");
    }

    #[test]
    fn sparsity_below_one_rejected() {
        let a = args(&["--experiment", "distortion", "--regime", "small", "--sparsity", "0.5"]);
        assert!(ExperimentConfig::from_cli(&a).is_err());
    }
}
