use std::path::PathBuf;

use aad_core::harness::SamplingKind;
use aad_core::FOCUS_PREFIX;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "aad",
    version,
    about = "Audio-aware decoding for audio-language models",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Answer one question about one clip.
    Generate(GenerateArgs),
    /// Score a dataset at a single alpha and prefix.
    Eval(EvalArgs),
    /// Score a dataset over a grid of alphas and prefixes.
    Sweep(SweepArgs),
    /// Write a synthetic object-hallucination benchmark.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderChoice {
    /// Built-in deterministic provider over a synthetic sound world.
    Toy,
    /// HTTP logits server.
    Remote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyChoice {
    Random,
    Adversarial,
    Popular,
}

impl From<StrategyChoice> for SamplingKind {
    fn from(s: StrategyChoice) -> Self {
        match s {
            StrategyChoice::Random => SamplingKind::Random,
            StrategyChoice::Adversarial => SamplingKind::Adversarial,
            StrategyChoice::Popular => SamplingKind::Popular,
        }
    }
}

#[derive(Debug, Args)]
pub struct ProviderArgs {
    #[arg(long, value_enum, default_value_t = ProviderChoice::Toy)]
    pub provider: ProviderChoice,

    /// Base URL of the logits server.
    #[arg(long, env = "AAD_ENDPOINT")]
    pub endpoint: Option<String>,

    /// Per-request timeout for the remote provider, in seconds.
    #[arg(long, default_value_t = 60.0, value_parser = parse_positive)]
    pub timeout: f64,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Instruction placed before the question. Pass "" for none.
    #[arg(long, default_value = FOCUS_PREFIX)]
    pub prefix: String,

    /// Sampling seed. Also seeds the toy world.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Sample at this temperature instead of decoding greedily.
    #[arg(long, value_parser = parse_positive)]
    pub temperature: Option<f64>,

    #[arg(long = "max-tokens", default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_tokens: u64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub provider: ProviderArgs,

    /// WAV file to ask about.
    #[arg(long, conflicts_with = "present", required_unless_present = "present")]
    pub audio: Option<PathBuf>,

    /// Render a toy scene containing these objects instead of reading a file.
    #[arg(long, value_delimiter = ',')]
    pub present: Option<Vec<String>>,

    #[arg(long)]
    pub question: String,

    /// Contrast strength; 0 is plain decoding.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true, value_parser = parse_alpha)]
    pub alpha: f64,

    #[command(flatten)]
    pub decode: DecodeArgs,

    /// Size of the toy world.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..=256))]
    pub objects: u64,

    /// Print the per-step distributions.
    #[arg(long)]
    pub steps: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON-lines dataset written by `aad synth` or by hand.
    #[arg(long)]
    pub dataset: PathBuf,

    #[command(flatten)]
    pub provider: ProviderArgs,

    #[command(flatten)]
    pub decode: DecodeArgs,

    /// Write the metrics as CSV here.
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Worker threads; 0 uses one per processor.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub run: RunArgs,

    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true, value_parser = parse_alpha)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub dataset: PathBuf,

    #[command(flatten)]
    pub provider: ProviderArgs,

    /// Prefixes to sweep; repeat the flag for several. Pass "" for none.
    #[arg(long = "prefix", default_values_t = [FOCUS_PREFIX.to_owned()])]
    pub prefixes: Vec<String>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_parser = parse_positive)]
    pub temperature: Option<f64>,

    #[arg(long = "max-tokens", default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_tokens: u64,

    /// Comma-separated alpha grid.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.5,1,1.5,2",
        allow_negative_numbers = true,
        value_parser = parse_alpha
    )]
    pub alphas: Vec<f64>,

    #[arg(long)]
    pub report: Option<PathBuf>,

    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of objects in the synthetic world.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..=256))]
    pub objects: u64,

    /// Number of items; must be even.
    #[arg(long, default_value_t = 200, value_parser = parse_even)]
    pub items: usize,

    #[arg(long, value_enum, default_value_t = StrategyChoice::Random)]
    pub strategy: StrategyChoice,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: PathBuf,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let alpha: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a number"))?;
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(format!("alpha must satisfy α ≥ 0 (got {s})"));
    }
    Ok(alpha)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("must be a positive number (got {s})"));
    }
    Ok(v)
}

fn parse_even(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("{s:?} is not a count"))?;
    if n == 0 || !n.is_multiple_of(2) {
        return Err(format!("must be a positive even number (got {n})"));
    }
    Ok(n)
}
