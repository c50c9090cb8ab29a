use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use condec::bench::Method;
use condec::{AmbiguityMode, Scheme};

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: condec::Error| e.to_string())
}

fn parse_score(s: &str) -> Result<f64, String> {
    match s {
        "-inf" | "-infinity" | "-Infinity" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|e| format!("{e}")),
    }
}

/// Scheme-constrained sequence decoding, CRF diagnostics and corpus tools.
#[derive(Debug, Parser)]
#[command(name = "condec", version)]
pub struct Cli {
    /// Worker threads for per-sentence work; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decode a JSONL lattice file into CoNLL labels.
    Decode(DecodeArgs),
    /// Re-encode a CoNLL file under another tagging scheme.
    Convert(ConvertArgs),
    /// Report illegal label transitions; exits 1 if any are found.
    Validate(ValidateArgs),
    /// Entity-level precision, recall and F1 of a prediction file.
    Eval(EvalArgs),
    /// Tag ambiguity and boundary statistics of a corpus.
    Analyze(AnalyzeArgs),
    /// Time the decoders and the partition function on random lattices.
    Bench(BenchArgs),
    /// Compare analytic CRF gradients with finite differences.
    GradCheck(GradCheckArgs),
    /// Per-sentence CRF and token-level losses for lattices with gold labels.
    Loss(LossArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write data here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Emit one JSON record per line instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ColumnArgs {
    /// Zero-based column holding the token.
    #[arg(long, default_value_t = 0)]
    pub token_column: usize,

    /// Zero-based column holding the label [default: last column].
    #[arg(long)]
    pub label_column: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecodeMode {
    Greedy,
    Viterbi,
    Constrained,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Lattice file, one JSON record per line; `-` reads standard input.
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = DecodeMode::Constrained)]
    pub mode: DecodeMode,

    /// Transition matrix file; required by `viterbi`.
    #[arg(long, required_if_eq("mode", "viterbi"))]
    pub transitions: Option<PathBuf>,

    /// Scheme whose transition rules build the constraint mask.
    #[arg(long, value_parser = parse_scheme, default_value = "iobes")]
    pub scheme: Scheme,

    /// Score given to illegal transitions in `constrained` mode.
    #[arg(long, value_parser = parse_score, default_value = "-inf", allow_hyphen_values = true)]
    pub illegal_score: f64,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// CoNLL file; `-` reads standard input.
    pub input: PathBuf,

    #[arg(long, value_parser = parse_scheme)]
    pub from: Scheme,

    #[arg(long, value_parser = parse_scheme)]
    pub to: Scheme,

    #[command(flatten)]
    pub columns: ColumnArgs,

    /// Write here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// CoNLL file; `-` reads standard input.
    pub input: PathBuf,

    #[arg(long, value_parser = parse_scheme, default_value = "iobes")]
    pub scheme: Scheme,

    #[command(flatten)]
    pub columns: ColumnArgs,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub gold: PathBuf,
    pub pred: PathBuf,

    /// Scheme of the gold file.
    #[arg(long, value_parser = parse_scheme, default_value = "iobes")]
    pub scheme: Scheme,

    /// Scheme of the prediction file [default: same as --scheme].
    #[arg(long, value_parser = parse_scheme)]
    pub pred_scheme: Option<Scheme>,

    #[command(flatten)]
    pub columns: ColumnArgs,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ambiguity {
    Occurrences,
    Forms,
}

impl From<Ambiguity> for AmbiguityMode {
    fn from(a: Ambiguity) -> Self {
        match a {
            Ambiguity::Occurrences => AmbiguityMode::Occurrences,
            Ambiguity::Forms => AmbiguityMode::Forms,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// CoNLL files, or dataset directories whose `train*` file is read.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    /// Read every file of a dataset directory, not just the training split.
    #[arg(long)]
    pub all_splits: bool,

    /// Scheme of the input files.
    #[arg(long, value_parser = parse_scheme, default_value = "bio")]
    pub scheme: Scheme,

    /// Scheme whose labels the statistics are computed on.
    #[arg(long, value_parser = parse_scheme, default_value = "iobes")]
    pub target_scheme: Scheme,

    /// Lower-case tokens before grouping surface forms.
    #[arg(long)]
    pub case_fold: bool,

    #[arg(long, value_enum, default_value_t = Ambiguity::Occurrences)]
    pub ambiguity: Ambiguity,

    /// Row name in the table [default: first input's name].
    #[arg(long)]
    pub name: Option<String>,

    #[command(flatten)]
    pub columns: ColumnArgs,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMethod {
    Greedy,
    Viterbi,
    ConstrainedViterbi,
    LogPartition,
}

impl From<BenchMethod> for Method {
    fn from(m: BenchMethod) -> Self {
        match m {
            BenchMethod::Greedy => Method::Greedy,
            BenchMethod::Viterbi => Method::Viterbi,
            BenchMethod::ConstrainedViterbi => Method::ConstrainedViterbi,
            BenchMethod::LogPartition => Method::LogPartition,
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Sentence lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [20, 40])]
    pub lengths: Vec<usize>,

    /// Tag counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 16, 32])]
    pub tags: Vec<usize>,

    /// Lattices per shape.
    #[arg(long, default_value_t = 200)]
    pub sentences: usize,

    /// Timed passes per method; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,

    /// Methods to time [default: all].
    #[arg(long, value_enum, value_delimiter = ',')]
    pub methods: Vec<BenchMethod>,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GradCheckArgs {
    #[arg(long, default_value_t = 100)]
    pub instances: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 5)]
    pub max_len: usize,

    #[arg(long, default_value_t = 4)]
    pub max_tags: usize,

    /// Central-difference step.
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,

    /// Largest accepted relative error.
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,

    /// Negate the analytic transition gradient (negative control).
    #[arg(long, hide = true)]
    pub inject_sign_flip: bool,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LossArgs {
    /// Lattice file whose records carry `gold` labels; `-` reads standard input.
    pub input: PathBuf,

    /// Transition matrix file [default: all zeros].
    #[arg(long)]
    pub transitions: Option<PathBuf>,

    /// Add the scheme mask to the transitions at --illegal-score.
    #[arg(long, value_parser = parse_scheme)]
    pub mask: Option<Scheme>,

    #[arg(long, default_value_t = condec::CRF_ILLEGAL_SCORE, allow_hyphen_values = true)]
    pub illegal_score: f64,

    /// Write here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn scores_accept_negative_infinity() {
        assert_eq!(parse_score("-inf"), Ok(f64::NEG_INFINITY));
        assert_eq!(parse_score("-1e4"), Ok(-1e4));
        assert!(parse_score("x").is_err());
    }
}
