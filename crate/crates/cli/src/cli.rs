//! Command-line syntax. Every flag can also be set in a `--config` file as
//! `flag-name = value`; flags win.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use manifold_core::features::FeatureKind;
use manifold_core::synthetic::SyntheticKind;
use manifold_core::Method;

#[derive(Debug, Parser)]
#[command(
    name = "manifold",
    version,
    about = "Spectral dimensionality reduction and KNN image annotation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce a feature file to d dimensions.
    Reduce(ReduceArgs),
    /// Run an annotation experiment grid and write mean AP per cell.
    Annotate(AnnotateArgs),
    /// Time each reducer on the same input.
    Bench(BenchArgs),
    /// Sample a synthetic manifold, embed it and score the embedding.
    Synth(SynthArgs),
    /// Extract image descriptors from a directory of PPM files.
    Features(FeaturesArgs),
}

/// Reducer hyperparameters shared by several commands.
#[derive(Debug, Clone, Default, Args)]
pub struct ReducerFlags {
    /// Diffusion-map kernel width [default: 1].
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Diffusion-map random-walk steps [default: 1].
    #[arg(long)]
    pub t: Option<u32>,
    /// Neighborhood size for LLE and LEM [default: 12; for LLE, max(12, d + 1)].
    #[arg(long)]
    pub knn: Option<usize>,
    /// LEM heat-kernel width [default: mean k-NN distance].
    #[arg(long = "lem-sigma")]
    pub lem_sigma: Option<f64>,
    /// LLE regularization relative to the local Gram trace [default: 0.001].
    #[arg(long = "lle-reg")]
    pub lle_reg: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ReduceArgs {
    /// Feature file (`<id> v1 ... vk` lines).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// dm, pca, lle, lem or identity [default: dm].
    #[arg(long)]
    pub method: Option<Method>,
    /// Target dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    #[command(flatten)]
    pub reducer: ReducerFlags,
    /// Recorded in the output header [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// `key = value` settings file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnnotateArgs {
    /// Feature file, as `kind=path` or `path`; repeatable.
    #[arg(long = "features", value_name = "KIND=PATH")]
    pub features: Vec<String>,
    /// Label file (`<id> <concept-index> ...` lines).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Vocabulary file (one concept per line).
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Methods, comma separated [default: pca,lle,lem,dm].
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Method>,
    /// Target dimensions, comma separated [default: 10,20,30,40,50].
    #[arg(long, value_delimiter = ',')]
    pub dim: Vec<usize>,
    /// Neighbor counts, comma separated [default: 8].
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[command(flatten)]
    pub reducer: ReducerFlags,
    /// Images with fewer labels are dropped [default: 5].
    #[arg(long = "prune-min")]
    pub prune_min: Option<usize>,
    /// transductive or nystrom [default: transductive].
    #[arg(long)]
    pub oos: Option<String>,
    /// Train/test split seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// `key = value` settings file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Feature file, as `kind=path` or `path`; repeatable.
    #[arg(long = "features", value_name = "KIND=PATH")]
    pub features: Vec<String>,
    /// Methods, comma separated [default: pca,lle,lem,dm].
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Method>,
    /// Target dimension [default: 30].
    #[arg(long)]
    pub dim: Option<usize>,
    #[command(flatten)]
    pub reducer: ReducerFlags,
    /// Recorded in the output header [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// `key = value` settings file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// swiss_roll or punctured_sphere.
    #[arg(long)]
    pub name: Option<SyntheticKind>,
    /// Number of points [default: 2000].
    #[arg(long)]
    pub n: Option<usize>,
    /// Vertical stretch of the punctured sphere [default: 1].
    #[arg(long)]
    pub height: Option<f64>,
    /// Reducer [default: dm].
    #[arg(long)]
    pub method: Option<Method>,
    /// Embedding dimension [default: 2].
    #[arg(long)]
    pub dim: Option<usize>,
    #[command(flatten)]
    pub reducer: ReducerFlags,
    /// Neighborhood size of the quality score [default: 10].
    #[arg(long = "k-eval")]
    pub k_eval: Option<usize>,
    /// Sampling seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// `key = value` settings file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sample CSV (ambient and intrinsic coordinates).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Embedding CSV.
    #[arg(long = "embedding-out")]
    pub embedding_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FeaturesArgs {
    /// Directory of binary PPM (P6) images; ids are the file stems.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// edh73, corr144 or cm225 [default: edh73].
    #[arg(long)]
    pub kind: Option<FeatureKind>,
    /// `key = value` settings file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output feature file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}
