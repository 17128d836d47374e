//! `tpi`: spectra, schedules and simulations of stiff BGK kinetic equations
//! with telescopic projective integration.

mod commands;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Command-line front end of the telescopic projective integration kit.
#[derive(Debug, Parser)]
#[command(name = "tpi", version, about)]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print progress and diagnostics to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to `$TPI_OUT_DIR/<command>-<config name>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root for default output directories.
    #[arg(long, env = "TPI_OUT_DIR", default_value = "tpi-out", hide_env_values = true)]
    out_root: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues and clusters of the linearized operator.
    Spectrum(Common),
    /// Projective schedule for a configuration.
    Plan(Common),
    /// Integrate a configuration to its end time.
    Run(Common),
    /// Check the configured schedule against the operator spectrum.
    Verify(Common),
    /// Repeat a run over several values of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary.
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

/// Parameters that `sweep` can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Epsilon,
    Dx,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let ctx = commands::Context { verbose: cli.verbose };
    let result = match cli.command {
        Command::Spectrum(c) => commands::spectrum(&ctx, &c.config, out_dir(&c, "spectrum")),
        Command::Plan(c) => commands::plan(&ctx, &c.config, out_dir(&c, "plan")),
        Command::Run(c) => commands::run(&ctx, &c.config, out_dir(&c, "run")),
        Command::Verify(c) => commands::verify(&ctx, &c.config, out_dir(&c, "verify")),
        Command::Sweep { common, param, values } => {
            commands::sweep(&ctx, &common.config, out_dir(&common, "sweep"), param, &values)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn out_dir(c: &Common, command: &str) -> PathBuf {
    c.out.clone().unwrap_or_else(|| {
        let stem = c
            .config
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "config".into());
        c.out_root.join(format!("{command}-{stem}"))
    })
}
