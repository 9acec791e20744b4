use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod emit;

#[derive(Parser, Debug)]
#[command(name = "halluc", version, about = "Hallucination rates, concept classes and non-hallucinating learners on finite universes")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every randomized step; overrides `base_seed` in configs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file, or output directory for experiments.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for experiments.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Distances and rates between distributions.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Concept class utilities.
    #[command(subcommand)]
    Concepts(ConceptsCmd),
    /// Constrained maximization of an information measure.
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Run a learning rule on a sample.
    Learn(LearnArgs),
    /// Hard-instance generators.
    #[command(subcommand)]
    Adversary(AdversaryCmd),
    /// Monte Carlo experiments from a JSON config.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Closed-form bounds.
    #[command(subcommand)]
    Bounds(BoundsCmd),
}

#[derive(Subcommand, Debug)]
pub enum MeasureCmd {
    /// Mass of `p` outside the facts set.
    Hall {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        facts: PathBuf,
    },
    /// Largest `p[A]` over events with `q[A] <= eps`.
    HallEps {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    Tv {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    Kl {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    /// Information of `p`: `shannon`, `renyi:<alpha>` or `out-of-sample`.
    Entropy {
        #[arg(long)]
        p: PathBuf,
        #[arg(long, default_value = "shannon")]
        measure: String,
        /// Required for `out-of-sample`.
        #[arg(long)]
        sample: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ConceptsCmd {
    Vc {
        #[arg(long)]
        class: PathBuf,
        #[arg(long, default_value_t = 20)]
        cap: usize,
    },
    VersionSpace {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        sample: PathBuf,
    },
    /// Random packing of `d/2`-subsets with overlaps at most `d/4`.
    Packing {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = halluc_core::concepts::DEFAULT_MAX_TRIES)]
        max_tries: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum SolveCmd {
    /// Most informative distribution that keeps `hall <= eps` on every concept.
    MaxInfo {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = "shannon")]
        measure: String,
        #[arg(long)]
        sample: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LearnerKind {
    Empirical,
    Improper,
    Proper,
    Fixed,
}

#[derive(Args, Debug)]
pub struct LearnArgs {
    pub kind: LearnerKind,
    #[arg(long)]
    pub sample: PathBuf,
    #[arg(long)]
    pub class: Option<PathBuf>,
    /// JSON list of distributions.
    #[arg(long)]
    pub hypotheses: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value = "out-of-sample")]
    pub measure: String,
    /// For fixed learners: hypothesis index; hashes the sample when absent.
    #[arg(long)]
    pub index: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum AdversaryCmd {
    /// Draw an instance: example1, theorem1, example4, theorem3, example5 or appendix.
    Gen {
        name: String,
        /// Construction parameters as a JSON object.
        #[arg(long, default_value = "{}")]
        params: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCmd {
    /// Run every trial and write trials.jsonl, summary.csv and plot/.
    Run { config: PathBuf },
    /// Same as run, plus curve.csv with one row per sample size.
    Curve { config: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum BoundsCmd {
    Fano {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        class_size: u64,
        #[arg(long)]
        kl: f64,
    },
    RequiredN {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Root of `h(2e) + 5e = 1`.
    EntropyThreshold {
        #[arg(long, value_enum, default_value_t = Base::Bits)]
        base: Base,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Base {
    Bits,
    Nats,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
