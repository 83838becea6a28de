//! `orbex`: exclusion measurements for symmetric state families.
//!
//! Every command prints exactly one JSON document to stdout. Output is
//! byte-identical across runs: fields appear in a fixed order and floats
//! carry 17 significant digits. Wall-clock timing, being inherently
//! nondeterministic, goes to stderr and only on request (`--timing`).
//!
//! Exit codes: 0 when the command ran (whatever the verdict), 1 when it
//! failed with a machine-readable error document, 2 on usage errors.

mod commands;
mod errors;
mod report;
mod scenario;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{
    capacity_output, check_output, construct_output, demo_output, graph_csv_path, load_instance,
    oracle_output, pbr_output, verify_output, AngleUnit, CommandOutput, DemoName,
    MeasurementChoice, ToleranceProfile, Tolerances,
};
use errors::CliError;
use report::{render, Json};
use scenario::load_scenario;

#[derive(Parser)]
#[command(
    name = "orbex",
    version,
    about = "Exclusion measurements for group orbits of quantum states",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Gate thresholds applied when classifying numerical results.
    #[arg(long, global = true, value_enum, default_value = "default")]
    tolerance_profile: ToleranceProfile,
    /// Print wall-clock timing to stderr (stdout stays deterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide excludability and summarize the certificate.
    Check {
        /// Scenario file (JSON).
        #[arg(long)]
        instance: PathBuf,
    },
    /// Build the measurement and print its length/angle table.
    Construct {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Build the measurement and recheck every claimed invariant.
    Verify {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Evaluate the product-family excludability condition.
    Pbr {
        /// Preparation angle.
        #[arg(long)]
        theta: f64,
        /// Unit of the angle.
        #[arg(long, value_enum, default_value = "rad")]
        unit: AngleUnit,
        /// Number of copies; defaults to the minimal sufficient count.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Zero-error capacity bound from the confusability structure.
    Capacity {
        #[arg(long)]
        instance: PathBuf,
        /// Which zero-error measurement induces the graph.
        #[arg(long, value_enum, default_value = "constructed")]
        measurement: MeasurementChoice,
        /// Also write the confusability graph as CSV to this path.
        #[arg(long)]
        graph_csv: Option<PathBuf>,
    },
    /// Certified numerical bracketing of the optimal exclusion error.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Run a built-in demonstration.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Check { .. } => "check",
        Command::Construct { .. } => "construct",
        Command::Verify { .. } => "verify",
        Command::Pbr { .. } => "pbr",
        Command::Capacity { .. } => "capacity",
        Command::Oracle { .. } => "oracle",
        Command::Demo { .. } => "demo",
    }
}

fn envelope(command: &str, output: CommandOutput, tol: &Tolerances) -> Json {
    Json::Obj(vec![
        ("command", Json::str(command)),
        ("verdict", Json::Str(output.verdict)),
        ("result", output.result),
        (
            "provenance",
            Json::Obj(vec![
                ("tool", Json::str("orbex")),
                ("version", Json::str(env!("CARGO_PKG_VERSION"))),
                ("tolerance_profile", Json::str(tol.profile)),
                ("tolerances", tol.to_json()),
            ]),
        ),
    ])
}

fn run(cli: &Cli) -> Result<Json, CliError> {
    let name = command_name(&cli.command);
    let mut tol = Tolerances::from_profile(cli.tolerance_profile);
    let output = match &cli.command {
        Command::Check { instance } => {
            let scenario = load_scenario(instance)?;
            tol.apply_overrides(&scenario.options);
            let instance = load_instance(&scenario)?;
            check_output(&instance, scenario.shifts.as_ref())?
        }
        Command::Construct { instance } => {
            let scenario = load_scenario(instance)?;
            tol.apply_overrides(&scenario.options);
            let instance = load_instance(&scenario)?;
            construct_output(&instance, scenario.shifts.as_ref())?
        }
        Command::Verify { instance } => {
            let scenario = load_scenario(instance)?;
            tol.apply_overrides(&scenario.options);
            let instance = load_instance(&scenario)?;
            verify_output(&instance, scenario.shifts.as_ref(), &tol)?
        }
        Command::Pbr { theta, unit, n } => pbr_output(*theta, *unit, *n)?,
        Command::Capacity { instance, measurement, graph_csv } => {
            let scenario = load_scenario(instance)?;
            tol.apply_overrides(&scenario.options);
            let instance = load_instance(&scenario)?;
            capacity_output(
                &instance,
                scenario.shifts.as_ref(),
                *measurement,
                graph_csv_path(graph_csv.as_ref()),
                &tol,
            )?
        }
        Command::Oracle { instance } => {
            let scenario = load_scenario(instance)?;
            tol.apply_overrides(&scenario.options);
            let instance = load_instance(&scenario)?;
            oracle_output(&instance)?
        }
        Command::Demo { name } => demo_output(*name, &tol)?,
    };
    Ok(envelope(name, output, &tol))
}

/// Writes one line to stdout. A consumer closing the pipe early (e.g.
/// `head`) ends the program quietly instead of panicking with a trace.
fn emit(doc: &Json) {
    use std::io::Write;
    if let Err(e) = writeln!(std::io::stdout(), "{}", render(doc)) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("orbex: cannot write to stdout: {e}");
        std::process::exit(1);
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let doc = Json::Obj(vec![(
                "error",
                Json::Obj(vec![
                    ("code", Json::str("cli/usage")),
                    ("message", Json::str(e.to_string())),
                ]),
            )]);
            emit(&doc);
            std::process::exit(2);
        }
    };
    let started = Instant::now();
    let outcome = run(&cli);
    if cli.timing {
        eprintln!(
            "timing command={} wall_ms={:.3}",
            command_name(&cli.command),
            started.elapsed().as_secs_f64() * 1e3
        );
    }
    match outcome {
        Ok(doc) => emit(&doc),
        Err(e) => {
            emit(&e.to_json());
            std::process::exit(1);
        }
    }
}
