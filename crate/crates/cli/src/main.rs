use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sapd_cli::commands::{cmd_oracle, cmd_solve, cmd_sweep, Overrides};
use sapd_cli::report::to_json;
use sapd_cli::scenario_file::{load, ObjectiveName};
use sapd_cli::CliError;
use sapd_core::LogBase;

#[derive(Parser)]
#[command(name = "sapd", version, about = "Two-user spectrum allocation and power distribution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Best of the disjoint, fully shared and partially shared allocations.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive search over a channel/power grid.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Number of equal-width channels.
        #[arg(long)]
        channels: Option<usize>,
        /// Power units per user.
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Total capacity along the partial-overlap solution curves, as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Number of sigma2 samples.
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    objective: Option<ObjectiveName>,
    #[arg(long, value_enum)]
    log_base: Option<BaseArg>,
    /// Relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            objective: self.objective.map(Into::into),
            log_base: self.log_base.map(|b| match b {
                BaseArg::Two => LogBase::Two,
                BaseArg::E => LogBase::E,
            }),
            tol: self.tol,
            ..Overrides::default()
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_owned(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()).map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, text) = match cli.command {
        Command::Solve { common } => {
            let loaded = load(&common.scenario)?;
            let text = to_json(&cmd_solve(&loaded, &common.overrides())?);
            (common, text)
        }
        Command::Oracle { common, channels, levels } => {
            let loaded = load(&common.scenario)?;
            let o = Overrides {
                channels,
                levels,
                ..common.overrides()
            };
            let text = to_json(&cmd_oracle(&loaded, &o)?);
            (common, text)
        }
        Command::Sweep { common, samples } => {
            let loaded = load(&common.scenario)?;
            let o = Overrides {
                samples,
                ..common.overrides()
            };
            let text = cmd_sweep(&loaded, &o)?;
            (common, text)
        }
    };
    emit(common.out.as_deref(), &text)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sapd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
