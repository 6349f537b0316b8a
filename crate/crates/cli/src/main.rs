//! `dephase`: separability checks for pure-dephasing models.
//!
//! Exit status: 0 separable (or success), 3 entangled, 1 error.

mod commands;
mod format;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dephase::criteria::DEFAULT_TOL_COMM;
use dephase::model::Family;

use commands::{Format, RandomArgs, SweepArgs, EXIT_ERROR};

#[derive(Parser)]
#[command(
    name = "dephase",
    version,
    about = "Separability checks for pure-dephasing system-environment models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Text => Format::Text,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(alias = "GenericHermitian")]
    GenericHermitian,
    #[value(alias = "CommutingFamily")]
    CommutingFamily,
    #[value(alias = "MixedEnvironment")]
    MixedEnvironment,
    #[value(alias = "PureEnvironment")]
    PureEnvironment,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::GenericHermitian => Family::GenericHermitian,
            FamilyArg::CommutingFamily => Family::CommutingFamily,
            FamilyArg::MixedEnvironment => Family::MixedEnvironment,
            FamilyArg::PureEnvironment => Family::PureEnvironment,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide separability at one instant.
    Check {
        #[arg(long)]
        model: PathBuf,
        /// Defaults to the stored instant for propagator-mode files.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        #[arg(long, default_value_t = DEFAULT_TOL_COMM)]
        tol_comm: f64,
    },
    /// Evaluate a uniform time grid and write CSV.
    Sweep {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t_start: f64,
        #[arg(long, allow_negative_numbers = true)]
        t_end: f64,
        #[arg(long)]
        steps: usize,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL_COMM)]
        tol_comm: f64,
    },
    /// Reproduce the built-in qutrit example and check its spectrum.
    Example {
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        #[arg(long, default_value_t = DEFAULT_TOL_COMM)]
        tol_comm: f64,
    },
    /// Write a seeded random ensemble and a verdict summary.
    Random {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Instant used for the summary verdicts.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = DEFAULT_TOL_COMM)]
        tol_comm: f64,
    },
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Check {
            model,
            t,
            format,
            tol_comm,
        } => commands::check(&model, t, format.into(), tol_comm, &mut stdout),
        Command::Sweep {
            model,
            t_start,
            t_end,
            steps,
            out,
            tol_comm,
        } => commands::sweep(
            SweepArgs {
                model: &model,
                t_start,
                t_end,
                steps,
                out: out.as_deref(),
                tol_comm,
            },
            &mut stdout,
        ),
        Command::Example { format, tol_comm } => {
            commands::example(format.into(), tol_comm, &mut stdout)
        }
        Command::Random {
            family,
            n,
            m,
            count,
            seed,
            out,
            t,
            tol_comm,
        } => commands::random(RandomArgs {
            family: family.into(),
            n,
            m,
            count,
            seed,
            out: &out,
            t,
            tol_comm,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
