mod commands;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gradedlc::monomial::DEFAULT_MAX_VARS;

/// Exact multigraded local cohomology of squarefree monomial ideals over Z.
#[derive(Parser, Debug)]
#[command(name = "gradedlc", version)]
struct Cli {
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Refuse ideals in more variables than this.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_VARS)]
    max_vars: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Cmd {
    /// Local cohomology H^j_I(S) class by class.
    Lc {
        /// Ideal file, or builtin:NAME.
        ideal: String,
        #[arg(long)]
        j: Option<usize>,
        /// Degree class as comma-separated variable numbers, e.g. 1,2,3 (empty for {}).
        #[arg(long)]
        class: Option<String>,
    },
    /// Support and associated primes of each H^j_I(S).
    Support {
        ideal: String,
        #[arg(long)]
        j: Option<usize>,
    },
    /// Primes that are zero divisors on some H^j_I(S).
    BadPrimes { ideal: String },
    /// Lyubeznik tables at p, optionally with the mixed-characteristic tables.
    Lyubeznik {
        ideal: String,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        mixed: bool,
        #[arg(long)]
        trunc: Option<u32>,
        /// Also evaluate the Bass-number identities at p.
        #[arg(long)]
        identities: bool,
    },
    /// H^i_at H^j_I(S) (or H^i_at H^j_{I+pS}(S) with --plus-p) with its injectivity verdict.
    Iterated {
        ideal: String,
        i: usize,
        j: usize,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, value_enum, default_value_t = At::M)]
        at: At,
        #[arg(long)]
        plus_p: bool,
        #[arg(long)]
        trunc: Option<u32>,
    },
    /// Checks every claim of the injective-dimension counterexample on the built-in Reisner ideal.
    VerifyCounterexample {
        #[arg(long, default_value_t = 2)]
        prime: u64,
    },
    /// Cross-checks the main routes against independent recomputations on random ideals.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Largest number of variables of the random ideals.
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        prime: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum At {
    /// n = (x_1..x_n)
    N,
    /// m = (p, x_1..x_n)
    M,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = std::env::var("GRADEDLC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a second initialization only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    match commands::run(&cli.cmd, cli.max_vars) {
        Ok(out) => {
            if cli.json {
                println!("{}", out.json);
            } else {
                print!("{}", out.text);
                for w in &out.warnings {
                    eprintln!("warning [{}]: {}", w.code, w.message);
                }
            }
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
