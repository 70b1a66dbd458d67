use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use regen::cli::{self, EXIT_OK, EXIT_VERIFY};
use regen::constructions::{Builder, BUDGET_ENV, DEFAULT_BUDGET};
use regen::tradeoff::SystemParams;
use regen::{Rational, Result};

#[derive(Parser)]
#[command(
    name = "regen",
    version,
    about = "Regenerating-code tradeoff curves and verified constructions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ParamArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
}

impl ParamArgs {
    fn params(&self) -> Result<SystemParams> {
        SystemParams::new(self.n, self.k, self.d)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tradeoff curve as CSV.
    Curve {
        #[command(flatten)]
        params: ParamArgs,
        /// Node size, integer or p/q.
        #[arg(long, default_value = "1")]
        alpha: Rational,
        #[arg(long, default_value_t = 99)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a code from a recipe and verify it; prints the JSON report.
    Construct {
        /// e.g. "blowup_full(base(3,2))"
        recipe: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest number of stored symbols a construction may produce.
        #[arg(long, env = BUDGET_ENV, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Also probe with every unit message.
        #[arg(long)]
        strict_basis: bool,
    },
    /// Convergence table along (n+M, k+M, d+M).
    Asymptotic {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',', default_value = "1/4,1/2,1")]
        s: Vec<Rational>,
        #[arg(long = "m", value_delimiter = ',', default_value = "100,1000,10000,100000,1000000")]
        m: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every bound and construction at one (alpha, gamma).
    Compare {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "1")]
        alpha: Rational,
        #[arg(long)]
        gamma: Rational,
    },
}

fn emit(text: &str, out: &Option<PathBuf>) {
    if out.is_none() {
        print!("{text}");
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Curve {
            params,
            alpha,
            samples,
            out,
        } => {
            let csv = cli::run_curve(&params.params()?, &alpha, samples, out.as_deref())?;
            emit(&csv, &out);
        }
        Command::Construct {
            recipe,
            out,
            seed,
            budget,
            strict_basis,
        } => {
            let report = cli::run_construct_verify(&recipe, &Builder::new(budget), seed, strict_basis, out.as_deref())?;
            emit(&format!("{}\n", report.to_json()?), &out);
            if !report.passed() {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Asymptotic { params, s, m, out } => {
            let csv = cli::run_asymptotic(&params.params()?, &s, &m, out.as_deref())?;
            emit(&csv, &out);
        }
        Command::Compare { params, alpha, gamma } => {
            print!("{}", cli::compare(&params.params()?, &alpha, &gamma)?);
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_INPUT } else { EXIT_OK });
        }
    };
    match run(args.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("regen: {e}");
            ExitCode::from(cli::exit_code(&e))
        }
    }
}
