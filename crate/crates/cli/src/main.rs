use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hornrev::kernels::IncisionStrategy;
use hornrev::revision::Algorithm;
use hornrev::{parse_atom, parse_clause, Budget};
use hornrev_cli::{cmd_check, cmd_explain, cmd_kernels, cmd_revise, Format, Outcome, RunConfig, INPUT_ERROR};

/// Revise Horn knowledge bases and translate view insertions into changes
/// of stored facts.
#[derive(Parser)]
#[command(name = "hornrev", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Insert a view atom (or, with the kernel algorithm, a base fact).
    Revise {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "ATOM")]
        insert: String,
    },
    /// Show the SLD tree and explanations for a view atom.
    Explain {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "ATOM")]
        insert: String,
    },
    /// Revise, then audit the result against the rationality postulates.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "ATOM")]
        insert: String,
    },
    /// Show the kernel set and incision for a base fact or a denial.
    Kernels {
        #[command(flatten)]
        common: Common,
        /// A ground fact such as `a.` or a denial such as `:- p.`
        #[arg(long, value_name = "CLAUSE")]
        alpha: String,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    kb: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    #[arg(long, value_parser = parse_strategy, default_value = "minimal-lexicographic")]
    strategy: IncisionStrategy,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    depth_bound: Option<u64>,
    #[arg(long)]
    all_solutions: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long, value_name = "PATH")]
    write_back: Option<PathBuf>,
    #[arg(long)]
    check_postulates: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Structured,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_strategy(s: &str) -> Result<IncisionStrategy, String> {
    s.parse()
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            kb_path: self.kb.clone(),
            algorithm: self.algorithm,
            strategy: self.strategy,
            depth_bound: self.depth_bound.map(|d| d as usize),
            all_solutions: self.all_solutions,
            format: match self.format {
                OutputFormat::Text => Format::Text,
                OutputFormat::Structured => Format::Structured,
            },
            write_back: self.write_back.clone(),
            check_postulates: self.check_postulates,
            budget: Budget::from_env(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Revise { common, insert } => with_atom(insert, |a| cmd_revise(&common.config(), a)),
        Command::Explain { common, insert } => with_atom(insert, |a| cmd_explain(&common.config(), a)),
        Command::Check { common, insert } => with_atom(insert, |a| cmd_check(&common.config(), a)),
        Command::Kernels { common, alpha } => match parse_clause(alpha) {
            Ok(c) => cmd_kernels(&common.config(), &c),
            Err(e) => Outcome::from(e),
        },
    };
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.status as u8)
}

fn with_atom(text: &str, f: impl FnOnce(&hornrev::Atom) -> Outcome) -> Outcome {
    match parse_atom(text) {
        Ok(a) => f(&a),
        Err(e) => {
            let mut o = Outcome::from(e);
            o.status = INPUT_ERROR;
            o
        }
    }
}
