//! Command-line front end: argument grammar, command dispatch and output
//! rendering. Every command produces a JSON envelope on stdout, or a CSV
//! table with `--csv`.

mod commands;
mod error;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;
pub use output::{Envelope, FORMAT_VERSION};

#[derive(Debug, Parser)]
#[command(
    name = "loves",
    version,
    about = "Play and analyse the LOVES digit-string game"
)]
pub struct Cli {
    /// Emit CSV instead of JSON
    #[arg(long, global = true)]
    pub csv: bool,

    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Width above which a game is declared divergent (default: 2 * w0 + 8)
    #[arg(long, global = true)]
    pub max_width: Option<usize>,

    /// Iterations before a game is reported undetermined
    #[arg(long = "max-iters", global = true, default_value_t = 10_000)]
    pub max_iters: u32,

    /// Evaluation budget for sweeps, phase fields and set rankings
    #[arg(long, global = true, env = "LOVES_BUDGET", default_value_t = loves::analysis::DEFAULT_BUDGET)]
    pub budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GameInput {
    /// Starting digits, e.g. 11010
    #[arg(long, conflicts_with = "names", required_unless_present = "names")]
    pub string: Option<String>,

    /// Two names whose keyword letter counts form the starting string
    #[arg(long, num_args = 2, value_names = ["NAME_A", "NAME_B"])]
    pub names: Option<Vec<String>>,

    #[arg(long, default_value = "LOVES")]
    pub keyword: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTable {
    /// result,count
    Results,
    /// m,terminated,looping,divergent,undetermined
    Magnitude,
    /// Per-magnitude verdict probabilities
    Profile,
    /// Per-(m, result) probabilities
    ResultMagnitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecayTable {
    /// d,count
    Histogram,
    /// start,d,max_width,increasing_steps
    Chains,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankBy {
    Average,
    High,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play one game and report its outcome
    Play(GameInput),
    /// Play one game and report its full chain and trace
    Classify(GameInput),
    /// Classify every string of width w with digits below cap
    Sweep {
        #[arg(long, default_value_t = 5)]
        w: usize,
        #[arg(long, default_value_t = 10)]
        cap: u32,
        /// Table written with --csv
        #[arg(long, value_enum, default_value_t = SweepTable::Results)]
        table: SweepTable,
    },
    /// Exact one-step averages over (w, m) cells
    Phase {
        #[arg(long, default_value_t = 2)]
        w_min: usize,
        #[arg(long, default_value_t = 8)]
        w_max: usize,
        #[arg(long, default_value_t = 0)]
        m_min: u32,
        #[arg(long, default_value_t = 45)]
        m_max: u32,
    },
    /// Play every unordered pair of roster names
    NamesPairings {
        #[arg(long)]
        roster: Option<PathBuf>,
        #[arg(long, default_value = "LOVES")]
        keyword: String,
    },
    /// Score letter-count sets against every roster name
    ScoreSets {
        #[arg(long)]
        roster: Option<PathBuf>,
        #[arg(long, default_value = "LOVES")]
        keyword: String,
        /// Score every set with all counts below this cap
        #[arg(long, default_value_t = 3)]
        cap: u32,
        /// Score only these sets, e.g. 02000
        #[arg(long = "set", num_args = 1..)]
        sets: Vec<String>,
        /// Ordering of the CSV rows
        #[arg(long, value_enum, default_value_t = RankBy::Average)]
        rank_by: RankBy,
    },
    /// Width-5 starting strings reaching a two-digit target with no growth
    Backtrack {
        /// Two digits, e.g. 54
        #[arg(long)]
        target: String,
    },
    /// Decay lengths and chain shapes of terminating strings
    DecayStats {
        #[arg(long, default_value_t = 5)]
        w: usize,
        #[arg(long, default_value_t = 10)]
        cap: u32,
        #[arg(long, value_enum, default_value_t = DecayTable::Histogram)]
        table: DecayTable,
    },
}

/// Parses `argv` (including the program name), runs the command and writes
/// the rendered output to `out`.
pub fn run<I, T, W>(argv: I, out: &mut W) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            write!(out, "{e}")?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(first_line(&e))),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Invalid("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::ThreadPool(e.to_string()))?;
    let rendered = pool.install(|| commands::execute(&cli))?;
    rendered.write(cli.csv, out)
}

fn first_line(e: &clap::Error) -> String {
    let text = e.render().to_string();
    text.lines()
        .next()
        .unwrap_or_default()
        .trim_start_matches("error: ")
        .to_string()
}
