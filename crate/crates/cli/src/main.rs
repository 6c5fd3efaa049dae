//! `gwsym`: run verification suites of the four-wave symbol calculus.
//!
//! Exit codes: 0 when every verdict passes, 1 when a verdict fails,
//! 2 for usage errors, unreadable or malformed scenarios and output failures.

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gwsym::suite::{self, Command, Target};
use gwsym::{Format, Report, Scenario};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "gwsym",
    version,
    about = "Exact symbol calculus for four interacting gravitational waves"
)]
struct Cli {
    /// Scenario file (key = value lines).
    #[arg(long, global = true, value_name = "PATH")]
    scenario: Option<PathBuf>,

    /// Report format; overrides the scenario's `format` key.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Also write the report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Tabulate the null configuration.
    Report {
        #[command(subcommand)]
        what: ReportCmd,
    },
    /// Derive the reduced Ricci forms.
    Derive {
        #[command(subcommand)]
        what: DeriveCmd,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        target: TargetArg,
    },
    /// Compare exact evaluation with the floating-point oracle.
    ///
    /// `oracle --rho 2.0 verify total` runs the total-symbol suite at the given samples.
    Oracle {
        /// Sample value of rho; repeatable. Defaults to the scenario's `oracle_rho`.
        #[arg(long, value_name = "DECIMAL")]
        rho: Vec<f64>,
        /// Optional trailing `verify total`.
        #[arg(num_args = 0..)]
        then: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum ReportCmd {
    PairingTable,
}

#[derive(Subcommand, Debug)]
enum DeriveCmd {
    Forms,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TargetArg {
    Gauge,
    Cancellation,
    Items,
    Total,
    Conformal,
    Orders,
    All,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Target {
        match t {
            TargetArg::Gauge => Target::Gauge,
            TargetArg::Cancellation => Target::Cancellation,
            TargetArg::Items => Target::Items,
            TargetArg::Total => Target::Total,
            TargetArg::Conformal => Target::Conformal,
            TargetArg::Orders => Target::Orders,
            TargetArg::All => Target::All,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(report) if report.all_passed() => ExitCode::SUCCESS,
        Ok(report) => {
            for v in report.failing() {
                eprintln!("gwsym: verdict failed: {}", v.id);
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("gwsym: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<Report> {
    let mut scenario = match &cli.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading scenario {}", path.display()))?;
            Scenario::parse(&text).with_context(|| format!("scenario {}", path.display()))?
        }
        None => Scenario::default(),
    };
    if let Some(f) = cli.format {
        scenario.format = match f {
            FormatArg::Text => Format::Text,
            FormatArg::Machine => Format::Machine,
        };
    }
    let command = match cli.command {
        Cmd::Report {
            what: ReportCmd::PairingTable,
        } => Command::PairingTable,
        Cmd::Derive { what: DeriveCmd::Forms } => Command::DeriveForms,
        Cmd::Verify { target } => Command::Verify(target.into()),
        Cmd::Oracle { rho, then } => {
            if let Some(bad) = rho.iter().find(|r| !r.is_finite() || **r <= 0.0) {
                bail!("--rho must be positive and finite, got {bad}");
            }
            if !rho.is_empty() {
                scenario.oracle_rho = rho;
            }
            match then.as_slice() {
                [] => Command::Oracle(scenario.oracle_rho.clone()),
                [v, t] if v == "verify" && t == "total" => Command::Verify(Target::Total),
                other => bail!("unexpected arguments after oracle: {}", other.join(" ")),
            }
        }
    };
    let report = suite::run(&command, &scenario);
    let rendered = match scenario.format {
        Format::Text => report.to_text(),
        Format::Machine => report.to_machine(),
    };
    print!("{rendered}");
    if let Some(path) = &cli.out {
        std::fs::write(path, &rendered).with_context(|| format!("writing report to {}", path.display()))?;
    }
    Ok(report)
}
