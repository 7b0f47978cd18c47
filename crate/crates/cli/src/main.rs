mod commands;
mod contour;
mod error;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvteleport::SteeringDirection;

use commands::{Report, VerifyArgs};
use contour::{ContourSpec, GridOverrides, Kind};
use error::{CliError, CliResult};

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(
    name = "cvteleport",
    version,
    about = "Steering-limited secure teleportation of coherent states: channel classification, optimal resources, Monte Carlo checks and figure data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GridFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the phase-insensitive channel (tau, y). Unphysical points
    /// are a verdict, not an error.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Optimal channel, fidelity and minimal-energy resource at a fixed
    /// steering budget. Exits 3 when the optimum needs unbounded energy.
    Optimal {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        /// Steering budget in the chosen direction (`inf` allowed).
        #[arg(long, allow_negative_numbers = true)]
        steering: f64,
        /// `ba` (Bob steers Alice) or `ab`.
        #[arg(long)]
        direction: SteeringDirection,
        #[command(flatten)]
        output: Output,
    },
    /// No-cloning benchmark, minimal A->B steerability and the tangency
    /// point for an alphabet width.
    Threshold {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Resource state of the fixed-steerability family that simulates
    /// the boundary channel at `tau`.
    Resource {
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, allow_negative_numbers = true)]
        steering: f64,
        #[arg(long)]
        direction: SteeringDirection,
        /// Family parameter; defaults to the minimal-energy member.
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Security report for (tau, y) with a Monte Carlo cross-check of the
    /// average fidelity.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, env = "CVTELEPORT_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// B->A steering budget for the accessibility check (unbounded if absent).
        #[arg(long, allow_negative_numbers = true)]
        s_ba: Option<f64>,
        /// A->B steering budget for the accessibility check (unbounded if absent).
        #[arg(long, allow_negative_numbers = true)]
        s_ab: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Export figure grid data as CSV or JSON (JSON adds overlay curves).
    Contour {
        #[arg(value_enum)]
        kind: Kind,
        /// Alphabet width (fig1 only; default 0.2).
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        /// Steering budget (fig1 only; default 0.4 for fig1a, 0.6 for fig1b).
        #[arg(long, allow_negative_numbers = true)]
        steering: Option<f64>,
        /// Step on both axes unless overridden per axis.
        #[arg(long)]
        step: Option<f64>,
        /// First axis: tau for fig1, lambda for fig2.
        #[arg(long, allow_negative_numbers = true)]
        x_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x_max: Option<f64>,
        #[arg(long)]
        x_step: Option<f64>,
        /// Second axis: y for fig1, s for fig2.
        #[arg(long, allow_negative_numbers = true)]
        y_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y_max: Option<f64>,
        #[arg(long)]
        y_step: Option<f64>,
        #[arg(long, value_enum, default_value_t = GridFormat::Csv)]
        format: GridFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn wants_json(&self) -> bool {
        match self {
            Command::Contour { format, .. } => *format == GridFormat::Json,
            Command::Classify { output, .. }
            | Command::Optimal { output, .. }
            | Command::Threshold { output, .. }
            | Command::Resource { output, .. }
            | Command::Verify { output, .. } => output.format == Format::Json,
        }
    }
}

fn render(report: Report, output: &Output) -> CliResult<Option<CliError>> {
    let text = match output.format {
        Format::Json => output::to_json(&output::envelope(report.params, report.data)),
        Format::Text => {
            let mut data = report.data;
            output::round_all(&mut data);
            output::to_text(&data)
        }
    };
    output::emit(&text, output.out.as_deref())?;
    Ok(report.failure)
}

fn run(command: Command) -> CliResult<Option<CliError>> {
    match command {
        Command::Classify { tau, y, output } => render(commands::classify(tau, y)?, &output),
        Command::Optimal {
            lambda,
            steering,
            direction,
            output,
        } => render(commands::optimal(lambda, steering, direction)?, &output),
        Command::Threshold { lambda, output } => render(commands::threshold(lambda)?, &output),
        Command::Resource {
            tau,
            steering,
            direction,
            a,
            output,
        } => render(commands::resource(tau, steering, direction, a)?, &output),
        Command::Verify {
            tau,
            y,
            lambda,
            n,
            seed,
            s_ba,
            s_ab,
            output,
        } => {
            let args = VerifyArgs {
                tau,
                y,
                lambda,
                n,
                seed,
                s_ba,
                s_ab,
            };
            render(commands::verify(&args)?, &output)
        }
        Command::Contour {
            kind,
            lambda,
            steering,
            step,
            x_min,
            x_max,
            x_step,
            y_min,
            y_max,
            y_step,
            format,
            out,
        } => {
            let grid = GridOverrides {
                x_min,
                x_max,
                x_step,
                y_min,
                y_max,
                y_step,
                step,
            };
            let spec = ContourSpec::new(kind, lambda, steering, grid)?;
            let cells = contour::cells(&spec)?;
            let text = match format {
                GridFormat::Csv => contour::to_csv(&spec, &cells),
                GridFormat::Json => contour::to_json_document(&spec, &cells)?,
            };
            output::emit(&text, out.as_deref())?;
            Ok(None)
        }
    }
}

fn report_error(err: &CliError, json: bool) {
    let mut stderr = std::io::stderr().lock();
    let _ = if json {
        writeln!(stderr, "{}", serde_json::json!({ "error": err.to_json() }))
    } else {
        writeln!(stderr, "error: {err}")
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.command.wants_json();
    match run(cli.command) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) | Err(failure) => {
            report_error(&failure, json);
            failure.exit()
        }
    }
}
