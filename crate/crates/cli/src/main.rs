use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use harmonic_cli::commands::{self, exit_code, Output, TableKind};
use harmonic_cli::config::{CachePolicy, RunConfig};
use harmonic_cli::suites::{KunzeSteinOptions, Suite};
use harmonic_core::{Error, Result};

#[derive(Parser)]
#[command(name = "harmonic", version, about = "Radial harmonic analysis on harmonic manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// read-write, read-only or off (overrides the config).
    #[arg(long)]
    cache: Option<CachePolicy>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the density hypotheses and write check_model.csv.
    CheckModel(Common),
    /// Generate phi, c or plancherel-density tables.
    Tables {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        what: TableKind,
    },
    /// Run a verification suite and write verify_<suite>.csv.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// Exponents for the kunze-stein suite.
        #[arg(long, value_delimiter = ',', default_value = "1,1.5,1.9")]
        p: Vec<f64>,
        /// Random families for the kunze-stein suite.
        #[arg(long, default_value_t = 20)]
        families: usize,
    },
    /// Write closed-form Jacobi-function values on the configured grids.
    OracleDump(Common),
}

fn setup(c: &Common) -> Result<(RunConfig, Output)> {
    if let Some(n) = c.threads {
        if n == 0 {
            return Err(Error::Validation("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Validation(format!("cannot start thread pool: {e}")))?;
    }
    let cfg = RunConfig::load(&c.config)?;
    let out = Output::resolve(&cfg, c.out.as_deref(), c.cache);
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::CheckModel(c) => {
            let (cfg, out) = setup(&c)?;
            commands::check_model(&cfg, &out)
        }
        Command::Tables { common, what } => {
            let (cfg, out) = setup(&common)?;
            let path = commands::tables(&cfg, what, &out)?;
            println!("{}", path.display());
            Ok(0)
        }
        Command::Verify { common, suite, p, families } => {
            let (cfg, out) = setup(&common)?;
            commands::verify(&cfg, suite, &KunzeSteinOptions { exponents: p, families }, &out)
        }
        Command::OracleDump(c) => {
            let (cfg, out) = setup(&c)?;
            commands::oracle_dump(&cfg, &out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation failures, not numeric ones
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
