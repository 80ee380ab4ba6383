//! Command-line flags, the flat TOML config file, and their merge into one
//! resolved [`ExperimentConfig`].

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Where `mixing` gets its end-state distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Exact class-mean propagation of the idealized walk.
    Exact,
    /// Monte Carlo over sampled idealized walks.
    Idealized,
    /// Monte Carlo over sampled lattice circuits.
    Circuit,
    /// Monte Carlo over uniform distinct tuples (a baseline for the estimator).
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Region census and color-class counts for one shape.
    #[command(after_long_help = "CSV columns: dims,side,k,safe,coll,ident,distinct,coll_ratio,\
collision_bound,color_classes,color_class_bound,strategy\n\
Exits 3 if a census bound fails, 2 if the shape is too large to count.")]
    Census,
    /// Spectral norm of the mixing walk minus the global walk, plus operator identity checks.
    #[command(after_long_help = "CSV columns: dims,side,k,t,norm,iterations,oracle_norm,\
oracle_delta,identity_checks,identity_max_residual\n\
oracle_* are empty above 2^12 states. Exits 3 if an identity fails.")]
    Spectral,
    /// TV distance to uniform on distinct tuples after t rounds, for t = 0..=t-max.
    #[command(after_long_help = "CSV columns: t,source,start,tv,bias,sigma,samples,low_samples\n\
Exact rows leave bias, sigma, samples and low_samples empty. \
Exits 3 if an exact trajectory increases.")]
    Mixing,
    /// Constructed versus predicted depth of the lattice circuit.
    #[command(
        after_long_help = "CSV columns: dims,side,t,base_layers,constructed_depth,predicted_depth\n\
Uses --t if given, otherwise t = 0..=t-max. Exits 3 on any mismatch."
    )]
    Depth,
    /// Applies a sampled lattice circuit to tuples read one per line.
    #[command(
        after_long_help = "Input lines hold members separated by '|', each as '+'/'-' per site \
in row-major order. Blank lines, '#' comments and a 'state' header are skipped.\n\
CSV columns: state"
    )]
    Simulate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Census => "census",
            Command::Spectral => "spectral",
            Command::Mixing => "mixing",
            Command::Depth => "depth",
            Command::Simulate => "simulate",
        }
    }

    fn default_side(&self) -> u32 {
        match self {
            Command::Depth | Command::Simulate => 3,
            _ => 2,
        }
    }
}

/// Settings shared by every subcommand. Each may also come from `--config`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Lattice dimension D [default: 2]
    #[arg(long, global = true)]
    pub dims: Option<u32>,
    /// Lattice side length [default: 3 for depth and simulate, otherwise 2]
    #[arg(long, global = true)]
    pub side: Option<u32>,
    /// Tuple size [default: 2]
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Rounds of the recursive construction or mixing walk
    #[arg(long, global = true)]
    pub t: Option<usize>,
    /// Largest t in a sweep [default: 4]
    #[arg(long, global = true)]
    pub t_max: Option<usize>,
    /// Brickwork layers of the one-dimensional base circuit [default: 8]
    #[arg(long, global = true)]
    pub base_layers: Option<usize>,
    /// Monte Carlo samples per point [default: 100000]
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Root seed [default: $LATTICEPERM_SEED, else 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: available parallelism]; never changes results
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file [default: stdout]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Apply the inverse circuit (simulate)
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub invert: Option<bool>,
    /// Input file for simulate [default: stdin]
    #[arg(long = "in", global = true)]
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    /// Distribution source for mixing [default: exact]
    #[arg(long, global = true, value_enum)]
    pub source: Option<Source>,
    /// Start state for mixing, as a packed integer [default: first safe tuple]
    #[arg(long, global = true)]
    pub start: Option<u64>,
}

impl Settings {
    /// Fills every unset field from `base`.
    fn or(self, base: Settings) -> Settings {
        Settings {
            dims: self.dims.or(base.dims),
            side: self.side.or(base.side),
            k: self.k.or(base.k),
            t: self.t.or(base.t),
            t_max: self.t_max.or(base.t_max),
            base_layers: self.base_layers.or(base.base_layers),
            samples: self.samples.or(base.samples),
            seed: self.seed.or(base.seed),
            threads: self.threads.or(base.threads),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            invert: self.invert.or(base.invert),
            input: self.input.or(base.input),
            source: self.source.or(base.source),
            start: self.start.or(base.start),
        }
    }
}

pub fn read_config_file(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

/// Every setting that can change a result. Output path and thread count are
/// excluded, so they never change the config hash.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub subcommand: Command,
    pub dims: u32,
    pub side: u32,
    pub k: u32,
    pub t: Option<usize>,
    pub t_max: usize,
    pub base_layers: usize,
    pub samples: u64,
    pub seed: u64,
    pub format: Format,
    pub invert: bool,
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    pub source: Source,
    pub start: Option<u64>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    /// Flags win over the file; the seed falls back to `env_seed`, then 0.
    pub fn resolve(
        command: Command,
        flags: Settings,
        file: Option<Settings>,
        env_seed: Option<u64>,
    ) -> Result<Self, CliError> {
        let s = flags.or(file.unwrap_or_default());
        if s.threads == Some(0) {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        Ok(ExperimentConfig {
            subcommand: command,
            dims: s.dims.unwrap_or(2),
            side: s.side.unwrap_or(command.default_side()),
            k: s.k.unwrap_or(2),
            t: s.t,
            t_max: s.t_max.unwrap_or(4),
            base_layers: s.base_layers.unwrap_or(8),
            samples: s.samples.unwrap_or(100_000),
            seed: s.seed.or(env_seed).unwrap_or(0),
            format: s.format.unwrap_or(Format::Csv),
            invert: s.invert.unwrap_or(false),
            input: s.input,
            source: s.source.unwrap_or(Source::Exact),
            start: s.start,
            out: s.out,
            threads: s.threads,
        })
    }

    /// SHA-256 of the canonical JSON form, in hex.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("configs always serialize");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `t` itself when given, otherwise `0..=t_max`.
    pub fn t_values(&self) -> Vec<usize> {
        match self.t {
            Some(t) => vec![t],
            None => (0..=self.t_max).collect(),
        }
    }
}
