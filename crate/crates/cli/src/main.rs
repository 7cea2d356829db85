//! `gsdp`: build prototypes, describe objects and evaluate the results.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gsdp_core::{Error, Format, Taxonomy};

/// Exit status for a property suite that ran and failed.
pub const EXIT_SUITE_FAILED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "gsdp", version, about = "Prototype-based global semantic descriptors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a labelled Gaussian feature set and a fitted linear head.
    Synth(SynthArgs),
    /// Build one semantic prototype per category.
    Prototype(PrototypeArgs),
    /// Compute signatures for objects or categories.
    Describe(DescribeArgs),
    /// Rank one category's members by prototypical distance.
    Rank(RankArgs),
    /// Export (semantic value, prototypical distance) points.
    Organize(OrganizeArgs),
    /// Run k-means for a range of k and score it against the labels.
    ClusterEval(ClusterEvalArgs),
    /// Check the descriptor properties on a dataset.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Binary,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Binary => Format::Binary,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaxonomyArg {
    Object,
    AbstractPrototype,
    Category,
}

impl From<TaxonomyArg> for Taxonomy {
    fn from(t: TaxonomyArg) -> Taxonomy {
        match t {
            TaxonomyArg::Object => Taxonomy::Object,
            TaxonomyArg::AbstractPrototype => Taxonomy::AbstractPrototype,
            TaxonomyArg::Category => Taxonomy::Category,
        }
    }
}

/// How an object picks the prototype it is described against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AssignArg {
    /// Highest semantic value among the stored prototypes.
    Predicted,
    /// The object's own label.
    Label,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 5)]
    categories: usize,
    #[arg(long, default_value_t = 100)]
    per_category: usize,
    #[arg(long, default_value_t = 64)]
    m: usize,
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    /// Coordinates per category mean; all of them when omitted.
    #[arg(long)]
    support: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Binary)]
    format: FormatArg,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PrototypeArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    head: PathBuf,
    /// Prototype store (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DescribeArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    prototypes: PathBuf,
    #[arg(long, default_value_t = gsdp_core::descriptor::DEFAULT_BLOCK_SIDE)]
    r: usize,
    #[arg(long, value_enum, default_value_t = TaxonomyArg::Object)]
    taxonomy: TaxonomyArg,
    #[arg(long, value_enum, default_value_t = AssignArg::Predicted)]
    assign: AssignArg,
    /// Output encoding; inferred from the `--out` extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    prototypes: PathBuf,
    #[arg(long)]
    category: usize,
    /// Rows kept at each end of the ranking.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OrganizeArgs {
    #[arg(long, conflicts_with = "signatures", required_unless_present = "signatures")]
    features: Option<PathBuf>,
    #[arg(long)]
    signatures: Option<PathBuf>,
    #[arg(long, required_unless_present = "signatures")]
    prototypes: Option<PathBuf>,
    /// Keep only this category.
    #[arg(long)]
    category: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ClusterEvalArgs {
    #[arg(long, conflicts_with = "signatures", required_unless_present = "signatures")]
    features: Option<PathBuf>,
    #[arg(long, requires = "labels")]
    signatures: Option<PathBuf>,
    /// Feature set whose labels are matched to signatures by id.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    head: PathBuf,
    #[arg(long, default_value_t = gsdp_core::descriptor::DEFAULT_BLOCK_SIDE)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampled triples per category.
    #[arg(long, default_value_t = 1_000)]
    triples: usize,
    /// Sampled pairs per category.
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
}

fn exit_code(err: &Error) -> u8 {
    if err.is_io() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Prototype(a) => commands::prototype(a),
        Command::Describe(a) => commands::describe(a),
        Command::Rank(a) => commands::rank(a),
        Command::Organize(a) => commands::organize(a),
        Command::ClusterEval(a) => commands::cluster_eval(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
