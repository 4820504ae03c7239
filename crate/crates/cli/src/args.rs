use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "robpareto", version, about = "Robust multiobjective efficiency and scalarization")]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Globals {
    /// Lattice step for builtin, phantom and simplex-grid candidate sets.
    #[arg(long, global = true)]
    pub step: Option<f64>,
    /// Equality tolerance of the dominance tests.
    #[arg(long, global = true)]
    pub eq_tol: Option<f64>,
    /// Minimal total gap for strict dominance.
    #[arg(long, global = true)]
    pub strict_tol: Option<f64>,
    /// Seed for the `random` builtin.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for output files and the run manifest.
    #[arg(long, global = true)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Label every candidate as robust, convex hull, objectivewise efficient
    /// and set-valued minimal.
    Classify(Source),
    /// Minimize the worst case of one scalarizer.
    Scalarize(ScalarizeArgs),
    /// Minimize weighted p-norm worst cases for a list of exponents.
    Sweep(SweepArgs),
    /// Write the phantom instance document.
    Phantom(PhantomArgs),
    /// Write the instance, its images and its classification to `--emit`.
    Report(Source),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SourceChoice {
    /// Builtin instance: problem-1, problem-2 or random.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Instance document (JSON).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Phantom: `default` or a configuration file (JSON).
    #[arg(long)]
    pub phantom: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    #[command(flatten)]
    pub choice: SourceChoice,
    /// Divide each objective by its scale so images fit in the unit box.
    #[arg(long)]
    pub scaled: bool,
}

#[derive(Debug, Args)]
pub struct ScalarizeArgs {
    #[command(flatten)]
    pub source: Source,
    /// Scalarizer spec, e.g. `wsum:w=0.5,0.5`, `pnorm:p=2,w=1,ref=0`,
    /// `cheb:w=1,2` or `construct:anchor=0,mode=hull`.
    #[arg(long = "u")]
    pub spec: String,
    /// Also print the scalarized value in every scenario.
    #[arg(long)]
    pub trace: bool,
    /// Refinement passes of the lattice sweep.
    #[arg(long)]
    pub passes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: Source,
    /// Comma-separated exponents; `inf` is accepted.
    #[arg(long = "p", allow_hyphen_values = true)]
    pub p: String,
    /// Objective weights, one per objective or a single broadcast value.
    #[arg(long = "w")]
    pub weights: Option<String>,
    /// Refinement passes of the lattice sweep.
    #[arg(long)]
    pub passes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    /// Phantom configuration (JSON); defaults apply to missing fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Divide both objectives by their normalizers.
    #[arg(long)]
    pub scaled: bool,
    /// Output file; defaults to `phantom.json` under `--emit`, else stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
