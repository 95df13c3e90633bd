//! `slhash`: hashing and the analysis and attack experiments from the
//! command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation error, 3 budget
//! exceeded.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Settings;
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "slhash", version, about = "Cayley hash over SL_n(F_p) and its analysis tools")]
struct Cli {
    /// `key = value` settings file; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads for data-parallel analysis.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hash stdin, files, or a trit literal.
    Hash(HashArgs),
    /// Parameter checks.
    #[command(subcommand)]
    Params(ParamsCommand),
    /// Girth, mixing, indistinguishability and tail experiments.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Factorization and palindromic-attack tooling.
    #[command(subcommand)]
    Attack(AttackCommand),
}

#[derive(Args, Debug, Clone, Default)]
pub struct ParamArgs {
    /// Matrix dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Prime modulus (decimal, arbitrary size).
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long)]
    pub b: Option<u64>,
    /// Generator exponent.
    #[arg(long)]
    pub ell: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum OutputFormat {
    Hex,
    Matrix,
}

#[derive(Args, Debug)]
pub struct HashArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Hash this trit string (digits 1-3) instead of reading bytes.
    #[arg(long, conflicts_with = "files")]
    pub trits: Option<String>,
    /// Files to hash; stdin when absent.
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Hex)]
    pub format: OutputFormat,
    /// Split at good tails and hash segments on this many workers.
    #[arg(long, value_name = "WORKERS")]
    pub parallel: Option<usize>,
    /// Minimum segment length in trits for --parallel.
    #[arg(long, value_name = "TRITS")]
    pub min_segment: Option<usize>,
    /// Attribution table as a 4x3 grid file.
    #[arg(long, value_name = "PATH")]
    pub table: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum ParamsCommand {
    /// Check admissibility and report the witnesses.
    Validate(ParamArgs),
}

#[derive(Subcommand, Debug)]
pub enum AnalyzeCommand {
    /// Girth lower bound and BFS-measured girth.
    Girth {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Exact l-infinity distance to uniform for k = 0..=kmax (CSV).
    Mixing {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Indistinguishability game at input length k (CSV).
    Attack {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Group order and Cayley graph diameter by enumeration (CSV).
    Diameter {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Good and bad tails of length 2 (CSV).
    Tails {
        /// Attribution table as a 4x3 grid file.
        #[arg(long, value_name = "PATH")]
        table: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum ModeArg {
    Exhaustive,
    Bilinear,
}

#[derive(Subcommand, Debug)]
pub enum AttackCommand {
    /// Symmetrize the generators and run the palindrome experiment.
    Palindrome {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Also count symmetrizers over SL_n and GL_n.
        #[arg(long)]
        density: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check a factorization word against a target matrix.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        /// File of `k l` exponent pairs, one per line.
        #[arg(long, value_name = "PATH")]
        word: PathBuf,
        /// Target matrix file (`n p` header, then rows).
        #[arg(long, value_name = "PATH")]
        target: PathBuf,
    },
    /// Emit the polynomial system for A^k1 B^l1 ... A^km B^lm = target.
    EmitEm {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        m: usize,
        /// Target matrix file (`n p` header, then rows).
        #[arg(long, value_name = "PATH")]
        target: PathBuf,
    },
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let workers = settings.resolve(cli.workers, "workers", 0usize)?;
    if workers > 0 {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    match cli.command {
        Command::Hash(args) => commands::hash(&args, &settings, out),
        Command::Params(ParamsCommand::Validate(params)) => commands::validate(&params, &settings, out),
        Command::Analyze(cmd) => commands::analyze(cmd, &settings, out),
        Command::Attack(cmd) => commands::attack(cmd, &settings, out),
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
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match result.and(flushed.map_err(CliError::from)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slhash: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
