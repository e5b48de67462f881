use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vgrowth::{run_experiment, Center, Experiment, ExperimentConfig, Family, Format, Suite};

/// Exact growth and structure experiments for Thompson's group V and the
/// Grigorchuk group.
#[derive(Debug, Parser)]
#[command(name = "vgrowth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for ball enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Memory budget for stored keys, in MiB.
    #[arg(long, global = true, default_value_t = 3072)]
    budget_mb: usize,
    /// Allow depths beyond the default safety caps.
    #[arg(long, global = true)]
    uncapped: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a seeded invariant suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Level for the construction suite.
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Random cases per check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Schreier graphs of the Grigorchuk group.
    Schreier {
        #[command(subcommand)]
        command: SchreierCommand,
    },
    /// Exact growth function and rate estimates.
    Growth {
        #[arg(long, value_enum, default_value_t = Family::En)]
        family: Family,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Also run every level from `--n` up to this one.
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Normal form of a word, e.g. `s:a,sym:(1 2),tau,x0inv`.
    NormalForm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        word: String,
    },
    /// Factor counts of the normal form for all words up to a length.
    CountFactors {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Debug, Subcommand)]
enum SchreierCommand {
    /// DOT (or JSON) export of a level graph or of a ball in it.
    Build {
        #[arg(long)]
        n: usize,
        /// Export only the ball of this radius.
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, value_enum, default_value_t = Center::Rho)]
        center: Center,
    },
    /// Distances between the two special vertices of each level.
    Separation {
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
    },
    /// Ball comparisons between level graphs and the boundary orbit.
    Balls {
        #[arg(long, default_value_t = 6)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
    },
    /// Inverted-orbit growth at the all-ones point.
    Orbits {
        #[arg(long, default_value_t = 20)]
        depth: usize,
        /// Use the vertex `1^n` of this level instead of the boundary point.
        #[arg(long)]
        n: Option<usize>,
    },
}

fn experiment(command: Command) -> Experiment {
    match command {
        Command::Verify { suite, n, samples } => Experiment::Verify { suite, n, samples },
        Command::Schreier { command } => match command {
            SchreierCommand::Build { n, radius, center } => Experiment::SchreierBuild { n, radius, center },
            SchreierCommand::Separation { n_min, n_max } => Experiment::SchreierSeparation { n_min, n_max },
            SchreierCommand::Balls { n_min, n_max } => Experiment::SchreierBalls { n_min, n_max },
            SchreierCommand::Orbits { depth, n } => Experiment::SchreierOrbits { depth, level: n },
        },
        Command::Growth { family, n, n_max, depth } => {
            Experiment::Growth { family, n_min: n, n_max: n_max.unwrap_or(n), depth }
        }
        Command::NormalForm { n, word } => Experiment::NormalForm { n, word },
        Command::CountFactors { n, depth } => Experiment::CountFactors { n, depth },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = cli.common;
    let config = ExperimentConfig {
        experiment: experiment(cli.command),
        out: c.out,
        format: c.format,
        threads: c.threads,
        seed: c.seed,
        budget_bytes: c.budget_mb.saturating_mul(1 << 20),
        uncapped: c.uncapped,
    };
    match run_experiment(&config) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
