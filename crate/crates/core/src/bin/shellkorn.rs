use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shell_korn::cli::{
    cmd_ansatz_quotient, cmd_geom_check, cmd_korn_constant, cmd_report, RunConfig, EXIT_USAGE,
};
use shell_korn::Error;

/// Korn-constant laboratory for thin shells of nonzero Gaussian curvature.
#[derive(Parser)]
#[command(name = "shellkorn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the `key = value` run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force single-threaded execution (byte-stable CSV output).
    #[arg(long)]
    serial: bool,
    /// Seed override for randomized checks.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the Codazzi-Gauss relations and the admissibility bounds.
    GeomCheck {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Thickness sweep of a sharp test-field Korn quotient, with power-law fit.
    AnsatzQuotient {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Thickness sweep of the discrete Korn constant (or the uniform
    /// Korn-Poincare minimum).
    KornConstant {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Merge sweep CSVs into a comparison table and a log-log SVG plot.
    Report {
        #[command(flatten)]
        common: CommonArgs,
        /// Sweep CSV files to merge.
        csv_paths: Vec<PathBuf>,
    },
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if common.serial {
        cfg.serial = true;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn thread_count(cfg: &RunConfig) -> usize {
    if cfg.serial {
        return 1;
    }
    match std::env::var("SHELL_KORN_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).unwrap_or_else(|| {
            eprintln!("warning: ignoring invalid SHELL_KORN_THREADS value `{v}`");
            num_threads_default()
        }),
        Err(_) => num_threads_default(),
    }
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::InvalidParameter(_) => EXIT_USAGE,
        _ => 1,
    }
}

fn run() -> i32 {
    let cli = Cli::parse();
    let (common, action): (&CommonArgs, Box<dyn FnOnce(&RunConfig) -> Result<i32, Error>>) =
        match &cli.command {
            Command::GeomCheck { common } => (common, Box::new(cmd_geom_check)),
            Command::AnsatzQuotient { common } => (common, Box::new(cmd_ansatz_quotient)),
            Command::KornConstant { common } => (common, Box::new(cmd_korn_constant)),
            Command::Report { common, csv_paths } => {
                let paths = csv_paths.clone();
                (common, Box::new(move |cfg: &RunConfig| cmd_report(cfg, &paths)))
            }
        };
    let cfg = match load_config(common) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_USAGE;
        }
    };
    let threads = thread_count(&cfg);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("warning: thread pool already initialized: {e}");
    }
    match action(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(u8::try_from(run()).unwrap_or(1))
}
